#pragma once

#include <optional>

namespace cssd {

/// A probability in [0, 1]. Construction validates the range.
class Probability {
public:
    Probability() = default;
    explicit Probability(double value);

    double value() const { return value_; }
    operator double() const { return value_; }

private:
    double value_ = 0.0;
};

/// Standard normal CDF. Throws std::invalid_argument on non-finite input.
Probability std_normal_cdf(double x);

/// Inverse of the standard normal CDF for p in (0, 1).
/// Rational approximation (Acklam) followed by one Newton step on the CDF.
/// Throws std::domain_error outside (0, 1).
double std_normal_quantile(double p);

/// Hyperparameters of the Gamma mixture prior on the commensurability
/// precision: w * Ga(a01, b01) + (1 - w) * Ga(a02, b02).
///
/// The first component carries the discounting mass (small precision, large
/// variance b01/(a01-1)); the second the borrowing mass. Construction rejects
/// parameter sets where the discount variance does not exceed the borrow
/// variance, since every monotonicity result downstream depends on it.
class GammaMixtureHyperparams {
public:
    static constexpr double kDefaultA01 = 1.01;
    static constexpr double kDefaultB01 = 1.01;
    static constexpr double kDefaultA02 = 1e6;
    static constexpr double kDefaultB02 = 1.0;
    static constexpr double kDefaultC0 = 0.05;

    GammaMixtureHyperparams();
    GammaMixtureHyperparams(double a01, double b01, double a02, double b02,
                            std::optional<double> c0 = kDefaultC0);

    double a01() const { return a01_; }
    double b01() const { return b01_; }
    double a02() const { return a02_; }
    double b02() const { return b02_; }
    std::optional<double> c0() const { return c0_; }

    /// b01 / (a01 - 1): between-trial variance at w = 1.
    double discount_variance() const { return discount_variance_; }
    /// b02 / (a02 - 1): between-trial variance at w = 0.
    double borrow_variance() const { return borrow_variance_; }

private:
    double a01_, b01_, a02_, b02_;
    std::optional<double> c0_;
    double discount_variance_, borrow_variance_;
};

/// Two-moment approximation of E[1/nu]: w*b01/(a01-1) + (1-w)*b02/(a02-1).
/// Throws std::domain_error for w outside [0, 1].
double inverse_gamma_mixture_mean(double w, const GammaMixtureHyperparams& hyper);

/// Throws std::domain_error unless 0 <= w <= 1.
void require_unit_interval(double w, const char* what);

}  // namespace cssd
