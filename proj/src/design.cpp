#include "cssd/design.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cssd {

void DesignParams::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
    if (!(sigma0_sq > 0.0) || !std::isfinite(sigma0_sq)) {
        throw std::invalid_argument("sigma0_sq must be positive");
    }
    if (!(allocation > 0.0 && allocation < 1.0)) throw std::invalid_argument("allocation R must lie in (0,1)");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
    if (!(zeta > 0.0 && zeta < 1.0)) throw std::invalid_argument("zeta must lie in (0,1)");
    if (!std::isfinite(mu0)) throw std::invalid_argument("mu0 must be finite");
    if (!(s0_sq > 0.0)) throw std::invalid_argument("s0_sq must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
}

std::string_view endpoint_name(const EndpointModel& model) {
    struct {
        std::string_view operator()(const endpoint::Normal&) const { return "normal"; }
        std::string_view operator()(const endpoint::BinaryTwoArm&) const { return "binary_two_arm"; }
        std::string_view operator()(const endpoint::TimeToEvent&) const { return "time_to_event"; }
        std::string_view operator()(const endpoint::SingleArmBinary&) const { return "single_arm_binary"; }
    } name;
    return std::visit(name, model);
}

std::string_view to_string(SizeConvention convention) {
    switch (convention) {
        case SizeConvention::Total: return "total";
        case SizeConvention::PerArm: return "per_arm";
        case SizeConvention::Events: return "events";
    }
    return "total";
}

namespace {

double decisive_precision(double z_sum, double delta) {
    // A non-positive z sum is met by every posterior.
    if (z_sum <= 0.0) return 0.0;
    const double r = z_sum / delta;
    return r * r;
}

void require_open_unit(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error(std::string(what) + " must lie strictly inside (0,1)");
    }
}

void require_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
}

void require_prior_precision(double prior_precision) {
    if (!(prior_precision >= 0.0) || !std::isfinite(prior_precision)) {
        throw std::invalid_argument("prior precision must be finite and non-negative");
    }
}

SampleSizeResult finish(double n_bound, double prior_precision, SizeConvention convention) {
    SampleSizeResult r;
    r.n_bound = n_bound;
    r.n_real = std::max(n_bound, 0.0);
    r.decisive_by_prior = n_bound <= 0.0;
    r.prior_precision_used = prior_precision;
    r.convention = convention;
    return r;
}

void apply_allocation_rounding(SampleSizeResult& r, double allocation) {
    const AllocationRounding rounding = round_allocation_detail(r.n_real, allocation);
    r.n = rounding.n;
    if (rounding.fallback) {
        r.warnings.push_back("allocation has no denominator <= " + std::to_string(kMaxAllocationDenominator) +
                             "; plain ceiling used");
    } else if (allocation != 0.5) {
        r.warnings.push_back("rounded up to a multiple of " + std::to_string(rounding.granularity) +
                             " so both arms are whole");
    }
}

SampleSizeResult normal_total(const DesignParams& design, double target_precision, double prior_precision) {
    design.validate();
    const double r = design.allocation;
    const double n_bound = design.sigma0_sq / (r * (1.0 - r)) * (target_precision - prior_precision);
    SampleSizeResult result = finish(n_bound, prior_precision, SizeConvention::Total);
    apply_allocation_rounding(result, r);
    return result;
}

}  // namespace

double required_precision(double delta, Probability eta, Probability zeta) {
    require_delta(delta);
    require_open_unit(eta, "eta");
    require_open_unit(zeta, "zeta");
    return decisive_precision(std_normal_quantile(eta) + std_normal_quantile(zeta), delta);
}

AllocationRounding round_allocation_detail(double n_real, double allocation) {
    if (!std::isfinite(n_real)) throw std::invalid_argument("round_allocation: n_real must be finite");
    require_open_unit(allocation, "allocation");
    const double target = std::max(n_real, 0.0);

    for (long q = 1; q <= kMaxAllocationDenominator; ++q) {
        const double scaled = allocation * static_cast<double>(q);
        if (std::abs(scaled - std::round(scaled)) < 1e-9) {
            const double blocks = std::ceil(target / static_cast<double>(q));
            return {static_cast<long>(blocks) * q, q, false};
        }
    }
    return {static_cast<long>(std::ceil(target)), 1, true};
}

long round_allocation(double n_real, double allocation) {
    return round_allocation_detail(n_real, allocation).n;
}

SampleSizeResult sample_size_frequentist(const DesignParams& design) {
    design.validate();
    const double z = std_normal_quantile(1.0 - design.alpha) + std_normal_quantile(1.0 - design.beta);
    return normal_total(design, decisive_precision(z, design.delta), 0.0);
}

SampleSizeResult sample_size_no_borrow(const DesignParams& design) {
    design.validate();
    return normal_total(design, required_precision(design.delta, design.eta, design.zeta), 1.0 / design.s0_sq);
}

SampleSizeResult sample_size_borrow_normal(const DesignParams& design, const CollectivePrior& prior) {
    design.validate();
    if (!(prior.variance > 0.0)) throw std::invalid_argument("collective prior variance must be positive");
    SampleSizeResult result =
        normal_total(design, required_precision(design.delta, design.eta, design.zeta), prior.precision());
    if (prior.method == AggregationMethod::Legacy) {
        result.warnings.push_back("legacy aggregation is not monotone in the weights; use star for design");
    }
    if (prior.weight_scale == WeightScale::Raw) {
        result.warnings.push_back(
            "prior built from raw weights: over-discounts historical data (Alzheimer's example: n=332 raw vs "
            "176 linearized)");
    }
    for (const auto& id : prior.degenerate_sources) {
        result.warnings.push_back("source '" + id + "' has near-zero variance and dominates the prior");
    }
    return result;
}

SampleSizeResult sample_size_binary_two_arm(double rho_t, double rho_c, double delta, Probability eta,
                                            Probability zeta, double prior_precision) {
    require_open_unit(rho_t, "rho_t");
    require_open_unit(rho_c, "rho_c");
    require_prior_precision(prior_precision);
    const double scale = 1.0 / (rho_t * (1.0 - rho_t)) + 1.0 / (rho_c * (1.0 - rho_c));
    SampleSizeResult r =
        finish(scale * (required_precision(delta, eta, zeta) - prior_precision), prior_precision,
               SizeConvention::PerArm);
    const long per_arm = static_cast<long>(std::ceil(r.n_real));
    r.per_arm = per_arm;
    r.n = 2 * per_arm;
    return r;
}

SampleSizeResult events_required_tte(double delta, double allocation, Probability eta, Probability zeta,
                                     double prior_precision) {
    require_open_unit(allocation, "allocation");
    require_prior_precision(prior_precision);
    const double scale = 1.0 / (allocation * (1.0 - allocation));
    SampleSizeResult r = finish(scale * (required_precision(delta, eta, zeta) - prior_precision),
                                prior_precision, SizeConvention::Events);
    apply_allocation_rounding(r, allocation);
    return r;
}

SampleSizeResult sample_size_single_arm_binary(double p, double delta, Probability eta, Probability zeta,
                                               double prior_precision) {
    require_open_unit(p, "p");
    require_prior_precision(prior_precision);
    const double scale = 1.0 / (p * (1.0 - p));
    SampleSizeResult r = finish(scale * (required_precision(delta, eta, zeta) - prior_precision),
                                prior_precision, SizeConvention::Total);
    r.n = static_cast<long>(std::ceil(r.n_real));
    return r;
}

SampleSizeResult sample_size_for(const EndpointModel& model, const DesignParams& design,
                                 double prior_precision) {
    struct Visitor {
        const DesignParams& d;
        double prec;
        SampleSizeResult operator()(const endpoint::Normal&) const {
            require_prior_precision(prec);
            return normal_total(d, required_precision(d.delta, d.eta, d.zeta), prec);
        }
        SampleSizeResult operator()(const endpoint::BinaryTwoArm& m) const {
            return sample_size_binary_two_arm(m.rho_t, m.rho_c, d.delta, d.eta, d.zeta, prec);
        }
        SampleSizeResult operator()(const endpoint::TimeToEvent&) const {
            return events_required_tte(d.delta, d.allocation, d.eta, d.zeta, prec);
        }
        SampleSizeResult operator()(const endpoint::SingleArmBinary& m) const {
            return sample_size_single_arm_binary(m.p, d.delta, d.eta, d.zeta, prec);
        }
    };
    return std::visit(Visitor{design, prior_precision}, model);
}

}  // namespace cssd
