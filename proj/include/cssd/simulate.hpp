#pragma once

#include <cstdint>
#include <optional>

#include "cssd/design.hpp"
#include "cssd/inference.hpp"

namespace cssd {

struct SimulationConfig {
    DesignParams design;
    NormalPrior prior;
    long n = 0;  ///< total sample size; n * R must be integral
    double true_mu_delta = 0.0;
    long replicates = 10000;
    std::uint64_t seed = 0;
    /// Boundary for the futility tally; design.delta when unset.
    std::optional<double> futility_delta;

    void validate() const;
    long n_treatment() const;
    long n_control() const { return n - n_treatment(); }
};

struct SimulationResult {
    double pct_efficacious = 0.0;
    double pct_futile = 0.0;
    double pct_inconclusive = 0.0;
    long efficacious = 0;
    long futile = 0;
    long inconclusive = 0;
    long replicates = 0;
    std::uint64_t seed = 0;
    double mc_stderr = 0.0;  ///< standard error of the efficacy proportion
};

/// Observed difference in arm means for replicate `rep_index`.
double simulate_ybar_delta(std::uint64_t rep_index, const SimulationConfig& config);

/// Posterior update and decision for a given observed difference. Lets tests
/// drive the replicate path with a fixed ybar.
DecisionOutcome analyze_replicate(double ybar_delta, const SimulationConfig& config);

DecisionOutcome run_replicate(std::uint64_t rep_index, const SimulationConfig& config);

/// Tally over all replicates, OpenMP-parallel. Bitwise identical to the
/// serial reference for any thread count.
SimulationResult run_simulation(const SimulationConfig& config);

SimulationResult run_simulation_serial(const SimulationConfig& config);

}  // namespace cssd
