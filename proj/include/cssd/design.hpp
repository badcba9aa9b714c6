#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cssd/borrowing.hpp"
#include "cssd/stats_core.hpp"

namespace cssd {

/// Design inputs for the new trial. `delta` is on the scale of the endpoint
/// (outcome units for normal, log odds / log rate ratio otherwise).
struct DesignParams {
    double delta = 1.0;
    double sigma0_sq = 1.0;
    double allocation = 0.5;  ///< R = n_T / n
    Probability eta{0.95};
    Probability zeta{0.80};
    double mu0 = 0.0;
    double s0_sq = 100.0;
    Probability alpha{0.05};
    Probability beta{0.20};

    /// Throws std::invalid_argument on the first violated invariant.
    void validate() const;
};

namespace endpoint {
struct Normal {};
struct BinaryTwoArm {
    double rho_t = 0.5;
    double rho_c = 0.5;
};
struct TimeToEvent {};
struct SingleArmBinary {
    double p = 0.5;
};
}  // namespace endpoint

using EndpointModel =
    std::variant<endpoint::Normal, endpoint::BinaryTwoArm, endpoint::TimeToEvent, endpoint::SingleArmBinary>;

std::string_view endpoint_name(const EndpointModel& model);

enum class SizeConvention { Total, PerArm, Events };

std::string_view to_string(SizeConvention convention);

struct SampleSizeResult {
    double n_bound = 0.0;  ///< formula value before clamping; negative when the prior alone suffices
    double n_real = 0.0;   ///< max(n_bound, 0)
    long n = 0;            ///< rounded total (or events)
    std::optional<long> per_arm;
    double prior_precision_used = 0.0;
    bool decisive_by_prior = false;
    SizeConvention convention = SizeConvention::Total;
    std::vector<std::string> warnings;
};

/// ((z_eta + z_zeta) / delta)^2, the posterior precision that guarantees a
/// decisive conclusion for every observed effect.
double required_precision(double delta, Probability eta, Probability zeta);

/// Smallest n >= max(n_real, 0) with n*R and n*(1-R) integral.
struct AllocationRounding {
    long n = 0;
    long granularity = 1;   ///< denominator of R
    bool fallback = false;  ///< R has no denominator <= 1000; plain ceiling used
};

inline constexpr long kMaxAllocationDenominator = 1000;

AllocationRounding round_allocation_detail(double n_real, double allocation);
long round_allocation(double n_real, double allocation);

SampleSizeResult sample_size_frequentist(const DesignParams& design);
SampleSizeResult sample_size_no_borrow(const DesignParams& design);
/// Warns when the prior is Legacy-aggregated or built from raw weights.
SampleSizeResult sample_size_borrow_normal(const DesignParams& design, const CollectivePrior& prior);

/// Per-arm size for a log odds ratio; n_T = n_C.
SampleSizeResult sample_size_binary_two_arm(double rho_t, double rho_c, double delta, Probability eta,
                                            Probability zeta, double prior_precision);
/// Total events for a log rate ratio under exponential event times.
SampleSizeResult events_required_tte(double delta, double allocation, Probability eta, Probability zeta,
                                     double prior_precision);
/// Total size for a single-arm log-odds design.
SampleSizeResult sample_size_single_arm_binary(double p, double delta, Probability eta, Probability zeta,
                                               double prior_precision);

/// Dispatch on the endpoint model with a given prior precision.
SampleSizeResult sample_size_for(const EndpointModel& model, const DesignParams& design,
                                 double prior_precision);

/// One grid point of a weight sweep. `n_*` are unclamped formula values.
struct SweepRow {
    std::vector<double> w;  ///< one entry per swept axis
    double precision_star = 0.0;
    double precision_legacy = 0.0;
    double n_star_raw = 0.0;
    double n_star_linearized = 0.0;
};

struct SweepSpec {
    std::vector<std::size_t> axes;  ///< one or two source indices
    double step = 0.01;
};

/// Grid values 0, step, 2 step, ..., 1 (1 is always included).
std::vector<double> sweep_grid(double step);

/// Evaluates the precision and sample-size surfaces over the weight grid of
/// the selected axes; other sources keep `base_weights`. Rows are ordered
/// with the first axis varying slowest. OpenMP-parallel over grid points.
std::vector<SweepRow> sweep_surface(std::span<const HistoricalSource> sources,
                                    const GammaMixtureHyperparams& hyper, const DesignParams& design,
                                    std::span<const double> base_weights, const SweepSpec& spec);

/// Serial reference for sweep_surface; identical output.
std::vector<SweepRow> sweep_surface_serial(std::span<const HistoricalSource> sources,
                                           const GammaMixtureHyperparams& hyper, const DesignParams& design,
                                           std::span<const double> base_weights, const SweepSpec& spec);

}  // namespace cssd
