#pragma once

#include <span>

#include "cssd/borrowing.hpp"

namespace cssd {

// Reparameterizes each elicited weight w -> w' so that the source's precision
// 1/xi^2(w'), and with it the sample size, is affine in w while keeping
// w = 0 and w = 1 fixed.

/// Source precision at the two ends of the weight range; at_zero > at_one.
struct PrecisionEndpoints {
    double at_zero = 0.0;
    double at_one = 0.0;
};

/// Slack allowed when inverting a precision that composition has pushed just
/// outside [at_one, at_zero].
inline constexpr double kEndpointSlack = 1e-12;

PrecisionEndpoints precision_endpoints(const HistoricalSource& source,
                                       const GammaMixtureHyperparams& hyper);

/// Straight line between the endpoint precisions.
double interpolate_precision(double w, const PrecisionEndpoints& ep);

/// Closed-form inverse of w -> 1/xi^2(w). Throws std::range_error when the
/// precision lies outside the endpoint interval by more than the slack.
double invert_precision(double precision, const HistoricalSource& source,
                        const GammaMixtureHyperparams& hyper);

/// f(w) = invert(interpolate(w)). f(0) = 0 and f(1) = 1 exactly.
double linearize_weight(double w, const HistoricalSource& source, const GammaMixtureHyperparams& hyper);

/// Elementwise linearize_weight. Input must be tagged Raw; the result is
/// tagged Transformed.
WeightVector linearize_all(std::span<const HistoricalSource> sources, const WeightVector& raw,
                           const GammaMixtureHyperparams& hyper);

}  // namespace cssd
