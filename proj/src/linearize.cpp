#include "cssd/linearize.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cssd {

PrecisionEndpoints precision_endpoints(const HistoricalSource& source,
                                       const GammaMixtureHyperparams& hyper) {
    source.validate();
    return {1.0 / (source.tau_sq + hyper.borrow_variance()),
            1.0 / (source.tau_sq + hyper.discount_variance())};
}

double interpolate_precision(double w, const PrecisionEndpoints& ep) {
    require_unit_interval(w, "weight");
    if (w == 1.0) return ep.at_one;
    return ep.at_zero + w * (ep.at_one - ep.at_zero);
}

double invert_precision(double precision, const HistoricalSource& source,
                        const GammaMixtureHyperparams& hyper) {
    const PrecisionEndpoints ep = precision_endpoints(source, hyper);
    if (precision == ep.at_zero) return 0.0;
    if (precision == ep.at_one) return 1.0;

    const double slack = kEndpointSlack * ep.at_zero;
    if (!(precision >= ep.at_one - slack && precision <= ep.at_zero + slack)) {
        throw std::range_error("precision " + std::to_string(precision) +
                               " outside the attainable interval [" + std::to_string(ep.at_one) + ", " +
                               std::to_string(ep.at_zero) + "]");
    }
    const double k1 = hyper.discount_variance();
    const double k2 = hyper.borrow_variance();
    const double w = (1.0 / precision - source.tau_sq - k2) / (k1 - k2);
    return std::clamp(w, 0.0, 1.0);
}

double linearize_weight(double w, const HistoricalSource& source, const GammaMixtureHyperparams& hyper) {
    require_unit_interval(w, "weight");
    if (w == 0.0 || w == 1.0) return w;
    return invert_precision(interpolate_precision(w, precision_endpoints(source, hyper)), source, hyper);
}

WeightVector linearize_all(std::span<const HistoricalSource> sources, const WeightVector& raw,
                           const GammaMixtureHyperparams& hyper) {
    if (raw.scale() != WeightScale::Raw) {
        throw std::invalid_argument("linearize_all expects raw (elicited) weights");
    }
    if (raw.size() != sources.size()) {
        throw std::invalid_argument("weight vector length does not match source count");
    }
    std::vector<double> out(raw.size());
    for (std::size_t q = 0; q < raw.size(); ++q) {
        out[q] = linearize_weight(raw[q], sources[q], hyper);
    }
    return WeightVector::transformed(std::move(out));
}

}  // namespace cssd
