#include "cssd/borrowing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cssd {

void HistoricalSource::validate() const {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("source '" + id + "': theta must be finite");
    }
    if (!(tau_sq > 0.0) || !std::isfinite(tau_sq)) {
        throw std::invalid_argument("source '" + id + "': tau_sq must be positive and finite");
    }
}

std::string_view to_string(WeightScale scale) {
    return scale == WeightScale::Raw ? "raw" : "transformed";
}

std::string_view to_string(AggregationMethod method) {
    return method == AggregationMethod::Star ? "star" : "legacy";
}

WeightVector::WeightVector(std::vector<double> values, WeightScale scale)
    : values_(std::move(values)), scale_(scale) {
    for (double w : values_) require_unit_interval(w, "discrepancy weight");
}

double commensurate_variance(const HistoricalSource& source, double w,
                             const GammaMixtureHyperparams& hyper) {
    source.validate();
    return source.tau_sq + inverse_gamma_mixture_mean(w, hyper);
}

namespace {

void check_inputs(std::span<const HistoricalSource> sources, std::size_t n_weights) {
    if (sources.empty()) {
        throw std::invalid_argument("aggregation needs at least one historical source");
    }
    if (n_weights != sources.size()) {
        throw std::invalid_argument("weight vector length does not match source count");
    }
}

std::vector<std::string> degenerate_ids(std::span<const HistoricalSource> sources) {
    std::vector<std::string> ids;
    for (const auto& s : sources) {
        if (s.tau_sq < kDegenerateTauSq) ids.push_back(s.id);
    }
    return ids;
}

}  // namespace

CollectivePrior aggregate_star(std::span<const HistoricalSource> sources, const WeightVector& weights,
                               const GammaMixtureHyperparams& hyper) {
    check_inputs(sources, weights.size());

    std::vector<double> precision(sources.size());
    double total = 0.0;
    for (std::size_t q = 0; q < sources.size(); ++q) {
        precision[q] = 1.0 / commensurate_variance(sources[q], weights[q], hyper);
        total += precision[q];
    }

    CollectivePrior prior;
    prior.method = AggregationMethod::Star;
    prior.weight_scale = weights.scale();
    prior.variance = 1.0 / total;
    prior.synthesis_weights.resize(sources.size());
    double mean = 0.0;
    for (std::size_t q = 0; q < sources.size(); ++q) {
        prior.synthesis_weights[q] = precision[q] / total;
        mean += prior.synthesis_weights[q] * sources[q].theta;
    }
    prior.mean = mean;
    prior.degenerate_sources = degenerate_ids(sources);
    return prior;
}

double star_precision(std::span<const HistoricalSource> sources, std::span<const double> weights,
                      const GammaMixtureHyperparams& hyper) {
    check_inputs(sources, weights.size());
    double total = 0.0;
    for (std::size_t q = 0; q < sources.size(); ++q) {
        total += 1.0 / commensurate_variance(sources[q], weights[q], hyper);
    }
    return total;
}

std::vector<double> synthesis_weights_legacy(const WeightVector& weights, double c0) {
    if (!(c0 > 0.0)) throw std::domain_error("concentration c0 must be positive");
    if (weights.size() == 0) return {};

    // Shift by the smallest exponent so the largest term is exp(0) = 1.
    const auto w = weights.values();
    const double w_min = *std::min_element(w.begin(), w.end());
    std::vector<double> p(w.size());
    double total = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) {
        p[q] = std::exp(-(w[q] * w[q] - w_min * w_min) / c0);
        total += p[q];
    }
    for (double& x : p) x /= total;
    return p;
}

CollectivePrior aggregate_legacy(std::span<const HistoricalSource> sources, const WeightVector& weights,
                                 const GammaMixtureHyperparams& hyper) {
    check_inputs(sources, weights.size());

    CollectivePrior prior;
    prior.method = AggregationMethod::Legacy;
    prior.weight_scale = weights.scale();
    prior.synthesis_weights =
        synthesis_weights_legacy(weights, hyper.c0().value_or(GammaMixtureHyperparams::kDefaultC0));

    double mean = 0.0;
    double variance = 0.0;
    for (std::size_t q = 0; q < sources.size(); ++q) {
        const double p = prior.synthesis_weights[q];
        mean += p * sources[q].theta;
        variance += p * p * commensurate_variance(sources[q], weights[q], hyper);
    }
    prior.mean = mean;
    prior.variance = variance;
    prior.degenerate_sources = degenerate_ids(sources);
    return prior;
}

}  // namespace cssd
