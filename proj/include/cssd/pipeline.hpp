#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssd/scenario.hpp"

namespace cssd {

enum class DesignMode { Borrow, NoBorrow, Frequentist };

struct PipelineOptions {
    DesignMode mode = DesignMode::Borrow;
    AggregationMethod method = AggregationMethod::Star;
    /// Transform raw weights before aggregation (the intended procedure).
    bool linearize = true;
};

/// Result of running a scenario through transform -> aggregate -> design.
struct DesignOutcome {
    std::optional<WeightVector> weights;  ///< weights fed to the aggregation
    std::optional<CollectivePrior> prior;
    SampleSizeResult size;
    std::vector<std::string> warnings;
};

/// Weights as they enter the aggregation: raw weights are linearized unless
/// `linearize` is false; transformed weights pass through.
WeightVector design_weights(const ScenarioFile& scenario, bool linearize);

CollectivePrior build_prior(const ScenarioFile& scenario, const WeightVector& weights, AggregationMethod method);

DesignOutcome run_design(const ScenarioFile& scenario, const PipelineOptions& options);

/// Simulation settings for one true effect. `n` defaults to the scenario's
/// simulation.n and then to the borrowing design size.
SimulationConfig simulation_config(const ScenarioFile& scenario, const CollectivePrior& prior, long n,
                                   double true_mu_delta);

struct SimulationRow {
    double true_mu_delta = 0.0;
    SimulationResult result;
};

struct SimulationReport {
    long n = 0;
    CollectivePrior prior;
    std::vector<SimulationRow> rows;
};

/// Normal endpoint only. Uses the star prior from linearized weights.
SimulationReport run_scenario_simulation(const ScenarioFile& scenario);

/// Full pipeline output: the scenario echoed at top level (so the report can
/// be fed back in as a scenario) plus a "results" object.
nlohmann::json build_report(const ScenarioFile& scenario, bool with_simulation);

nlohmann::json to_json(const SampleSizeResult& r);
nlohmann::json to_json(const CollectivePrior& p);
nlohmann::json to_json(const SimulationResult& r);
nlohmann::json to_json(const WeightVector& w);
nlohmann::json sweep_to_json(std::span<const SweepRow> rows, std::span<const std::size_t> axes);

// Text output. Numbers use 6 significant digits unless `exact`.

std::string format_number(double x, bool exact);
void print_transform_table(std::ostream& out, const ScenarioFile& scenario, const WeightVector& transformed,
                           bool exact);
void print_prior(std::ostream& out, const ScenarioFile& scenario, const CollectivePrior& prior, bool exact);
void print_sample_size(std::ostream& out, const SampleSizeResult& r, std::string_view label, bool exact);
void print_simulation_table(std::ostream& out, std::string_view name, const SimulationReport& report,
                            bool exact);
void write_simulation_csv(std::ostream& out, std::string_view name, const SimulationReport& report);
/// Header row then one row per grid point; '.' decimals, LF endings.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::span<const std::size_t> axes,
                     bool exact);

}  // namespace cssd
