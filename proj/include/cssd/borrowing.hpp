#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cssd/stats_core.hpp"

namespace cssd {

/// One historical trial summarized as lambda_q ~ N(theta, tau_sq).
struct HistoricalSource {
    std::string id;
    double theta = 0.0;
    double tau_sq = 1.0;

    /// Throws std::invalid_argument unless theta is finite and tau_sq > 0.
    void validate() const;
};

/// Sources whose variance is below this are accepted but flagged.
inline constexpr double kDegenerateTauSq = 1e-12;

enum class WeightScale { Raw, Transformed };

std::string_view to_string(WeightScale scale);

/// Per-source discrepancy weights, tagged with whether they are the elicited
/// (raw) values or the output of the linearizing transform.
class WeightVector {
public:
    WeightVector() = default;
    WeightVector(std::vector<double> values, WeightScale scale);

    static WeightVector raw(std::vector<double> values) { return {std::move(values), WeightScale::Raw}; }
    static WeightVector transformed(std::vector<double> values) {
        return {std::move(values), WeightScale::Transformed};
    }

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    WeightScale scale() const { return scale_; }

private:
    std::vector<double> values_;
    WeightScale scale_ = WeightScale::Raw;
};

enum class AggregationMethod { Star, Legacy };

std::string_view to_string(AggregationMethod method);

/// Normal collective prior for the treatment effect in the new trial.
struct CollectivePrior {
    double mean = 0.0;
    double variance = 1.0;
    std::vector<double> synthesis_weights;
    AggregationMethod method = AggregationMethod::Star;
    WeightScale weight_scale = WeightScale::Transformed;
    /// Ids of sources with tau_sq below kDegenerateTauSq.
    std::vector<std::string> degenerate_sources;

    double precision() const { return 1.0 / variance; }
};

/// xi_q^2 = tau_q^2 + w b01/(a01-1) + (1-w) b02/(a02-1).
double commensurate_variance(const HistoricalSource& source, double w,
                             const GammaMixtureHyperparams& hyper);

/// Precision-weighted aggregation: the collective precision is the sum of the
/// per-source precisions 1/xi_q^2 and the mean is their weighted average.
CollectivePrior aggregate_star(std::span<const HistoricalSource> sources, const WeightVector& weights,
                               const GammaMixtureHyperparams& hyper);

/// Star-aggregated precision only (no allocation); the hot path of sweeps.
double star_precision(std::span<const HistoricalSource> sources, std::span<const double> weights,
                      const GammaMixtureHyperparams& hyper);

/// p_q proportional to exp(-w_q^2 / c0). Throws std::domain_error if c0 <= 0.
std::vector<double> synthesis_weights_legacy(const WeightVector& weights, double c0);

/// Exponential-synthesis aggregation: mean sum p_q theta_q, variance
/// sum p_q^2 xi_q^2. Not monotone in the weights when Q > 1; kept for
/// comparison. Uses hyper.c0(), or the default concentration when absent.
CollectivePrior aggregate_legacy(std::span<const HistoricalSource> sources, const WeightVector& weights,
                                 const GammaMixtureHyperparams& hyper);

}  // namespace cssd
