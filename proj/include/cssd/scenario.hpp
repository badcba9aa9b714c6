#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cssd/borrowing.hpp"
#include "cssd/design.hpp"
#include "cssd/simulate.hpp"

namespace cssd {

inline constexpr int kScenarioSchemaVersion = 1;

/// Optional simulation block of a scenario.
struct SimulationFragment {
    std::optional<long> n;  ///< defaults to the borrowing design size
    std::vector<double> true_mu_delta{1.0, 0.0};
    long replicates = 10000;
    std::uint64_t seed = 0;
    std::optional<double> futility_delta;
};

/// Everything needed to run transform, prior, design and simulation for one
/// new trial. JSON layout is documented in docs/scenario-schema.md.
struct ScenarioFile {
    int schema_version = kScenarioSchemaVersion;
    std::string name;
    std::string description;
    std::vector<HistoricalSource> sources;
    std::vector<double> weights;
    WeightScale weights_scale = WeightScale::Raw;
    GammaMixtureHyperparams hyper;
    DesignParams design;
    EndpointModel endpoint = endpoint::Normal{};
    std::optional<SimulationFragment> simulation;

    WeightVector weight_vector() const { return {weights, weights_scale}; }
};

struct FieldError {
    std::string path;
    std::string message;
    int line = 0;  ///< 0 when the position is unknown
    int column = 0;

    std::string to_string() const;
};

/// All field-level problems found in one scenario, not just the first.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<FieldError> errors);
    const std::vector<FieldError>& errors() const { return errors_; }

private:
    std::vector<FieldError> errors_;
};

/// Throws ScenarioError for malformed or invalid input, std::runtime_error
/// when the file cannot be read.
ScenarioFile parse_scenario(const std::filesystem::path& path);
ScenarioFile parse_scenario_text(std::string_view text);
/// Validates an already-parsed document (no position information).
ScenarioFile scenario_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ScenarioFile& scenario);
nlohmann::json to_json(const EndpointModel& model);
nlohmann::json to_json(const GammaMixtureHyperparams& hyper);
nlohmann::json to_json(const DesignParams& design);

}  // namespace cssd
