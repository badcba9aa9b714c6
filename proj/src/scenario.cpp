#include "cssd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json_positions.hpp"

namespace cssd {

using nlohmann::json;

std::string FieldError::to_string() const {
    std::string out = path.empty() ? "<document>" : path;
    if (line > 0) out += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    return out + ": " + message;
}

namespace {

std::string summarize(const std::vector<FieldError>& errors) {
    std::string out = std::to_string(errors.size()) + " scenario error(s)";
    for (const auto& e : errors) out += "\n  " + e.to_string();
    return out;
}

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

std::string index(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

class Reader {
public:
    explicit Reader(const std::map<std::string, detail::TextPosition>* positions) : positions_(positions) {}

    std::vector<FieldError> errors;

    void error(const std::string& path, std::string message) {
        FieldError e{path, std::move(message), 0, 0};
        if (positions_) {
            // Fall back to the closest enclosing value that has a position.
            std::string probe = path;
            for (;;) {
                if (auto it = positions_->find(probe); it != positions_->end()) {
                    e.line = it->second.line;
                    e.column = it->second.column;
                    break;
                }
                const auto cut = probe.find_last_of(".[");
                if (cut == std::string::npos) break;
                probe.resize(cut);
            }
        }
        errors.push_back(std::move(e));
    }

    void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& item : obj.items()) {
            if (!keys.count(item.key())) error(join(path, item.key()), "unknown field");
        }
    }

    const json* object(const json& parent, const std::string& parent_path, const char* key, bool required) {
        const std::string path = join(parent_path, key);
        if (!parent.contains(key)) {
            if (required) error(path, "missing required field");
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            error(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    std::optional<double> number(const json& obj, const std::string& parent, const char* key, bool required) {
        const std::string path = join(parent, key);
        if (!obj.contains(key) || obj.at(key).is_null()) {
            if (required) error(path, "missing required field");
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            error(path, "expected a number");
            return std::nullopt;
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            error(path, "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long> integer(const json& obj, const std::string& parent, const char* key, bool required) {
        const std::string path = join(parent, key);
        const auto x = number(obj, parent, key, required);
        if (!x) return std::nullopt;
        if (*x != std::floor(*x) || std::abs(*x) > 9e15) {
            error(path, "expected an integer");
            return std::nullopt;
        }
        return static_cast<long>(*x);
    }

    // Checks a numeric field against a predicate; returns the value or the fallback.
    template <typename Pred>
    double checked(const json& obj, const std::string& parent, const char* key, bool required, double fallback,
                   Pred ok, const char* requirement) {
        const auto x = number(obj, parent, key, required);
        if (!x) return fallback;
        if (!ok(*x)) {
            error(join(parent, key), std::string(requirement) + ", got " + json(*x).dump());
            return fallback;
        }
        return *x;
    }

private:
    const std::map<std::string, detail::TextPosition>* positions_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
const auto closed_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
const auto any_value = [](double) { return true; };

void read_sources(Reader& rd, const json& doc, ScenarioFile& out) {
    if (!doc.contains("sources")) {
        rd.error("sources", "missing required field (use [] for no borrowing)");
        return;
    }
    const json& arr = doc.at("sources");
    if (!arr.is_array()) {
        rd.error("sources", "expected an array");
        return;
    }
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string path = index("sources", k);
        const json& s = arr[k];
        if (!s.is_object()) {
            rd.error(path, "expected an object");
            continue;
        }
        rd.reject_unknown(s, path, {"id", "theta", "tau_sq", "w"});
        HistoricalSource src;
        src.id = "S" + std::to_string(k + 1);
        if (s.contains("id")) {
            if (s.at("id").is_string()) {
                src.id = s.at("id").get<std::string>();
            } else {
                rd.error(join(path, "id"), "expected a string");
            }
        }
        src.theta = rd.checked(s, path, "theta", true, 0.0, any_value, "");
        src.tau_sq = rd.checked(s, path, "tau_sq", true, 1.0, positive, "must be > 0");
        const double w = rd.checked(s, path, "w", true, 0.0, closed_unit, "must lie in [0,1]");
        out.sources.push_back(std::move(src));
        out.weights.push_back(w);
    }
}

void read_hyper(Reader& rd, const json& doc, ScenarioFile& out) {
    const json* h = rd.object(doc, "", "hyper", false);
    if (!h) return;
    rd.reject_unknown(*h, "hyper", {"a01", "b01", "a02", "b02", "c0"});
    const std::size_t before = rd.errors.size();
    const auto gt1 = [](double x) { return x > 1.0; };
    using H = GammaMixtureHyperparams;
    const double a01 = rd.checked(*h, "hyper", "a01", false, H::kDefaultA01, gt1, "must be > 1");
    const double b01 = rd.checked(*h, "hyper", "b01", false, H::kDefaultB01, positive, "must be > 0");
    const double a02 = rd.checked(*h, "hyper", "a02", false, H::kDefaultA02, gt1, "must be > 1");
    const double b02 = rd.checked(*h, "hyper", "b02", false, H::kDefaultB02, positive, "must be > 0");
    const double c0 = rd.checked(*h, "hyper", "c0", false, H::kDefaultC0, positive, "must be > 0");
    if (rd.errors.size() != before) return;
    try {
        out.hyper = GammaMixtureHyperparams(a01, b01, a02, b02, c0);
    } catch (const std::invalid_argument& e) {
        rd.error("hyper", e.what());
    }
}

void read_endpoint(Reader& rd, const json& doc, ScenarioFile& out) {
    const json* e = rd.object(doc, "", "endpoint", false);
    if (!e) return;
    if (!e->contains("model") || !e->at("model").is_string()) {
        rd.error("endpoint.model", "expected one of normal, binary_two_arm, time_to_event, single_arm_binary");
        return;
    }
    const std::string model = e->at("model").get<std::string>();
    if (model == "normal") {
        rd.reject_unknown(*e, "endpoint", {"model"});
        out.endpoint = endpoint::Normal{};
    } else if (model == "binary_two_arm") {
        rd.reject_unknown(*e, "endpoint", {"model", "rho_t", "rho_c"});
        out.endpoint = endpoint::BinaryTwoArm{
            rd.checked(*e, "endpoint", "rho_t", true, 0.5, open_unit, "must lie strictly inside (0,1)"),
            rd.checked(*e, "endpoint", "rho_c", true, 0.5, open_unit, "must lie strictly inside (0,1)")};
    } else if (model == "time_to_event") {
        rd.reject_unknown(*e, "endpoint", {"model"});
        out.endpoint = endpoint::TimeToEvent{};
    } else if (model == "single_arm_binary") {
        rd.reject_unknown(*e, "endpoint", {"model", "p"});
        out.endpoint = endpoint::SingleArmBinary{
            rd.checked(*e, "endpoint", "p", true, 0.5, open_unit, "must lie strictly inside (0,1)")};
    } else {
        rd.error("endpoint.model", "unknown endpoint model '" + model + "'");
    }
}

void read_design(Reader& rd, const json& doc, ScenarioFile& out) {
    const json* d = rd.object(doc, "", "design", true);
    if (!d) return;
    rd.reject_unknown(*d, "design",
                      {"delta", "sigma0_sq", "allocation", "eta", "zeta", "mu0", "s0_sq", "alpha", "beta"});
    DesignParams p;
    const bool normal = std::holds_alternative<endpoint::Normal>(out.endpoint);
    p.delta = rd.checked(*d, "design", "delta", true, 1.0, positive, "must be > 0");
    p.sigma0_sq = rd.checked(*d, "design", "sigma0_sq", normal, 1.0, positive, "must be > 0");
    p.allocation = rd.checked(*d, "design", "allocation", false, 0.5, open_unit, "must lie in (0,1)");
    p.eta = Probability(rd.checked(*d, "design", "eta", false, 0.95, open_unit, "must lie in (0,1)"));
    p.zeta = Probability(rd.checked(*d, "design", "zeta", false, 0.80, open_unit, "must lie in (0,1)"));
    p.mu0 = rd.checked(*d, "design", "mu0", false, 0.0, any_value, "");
    p.s0_sq = rd.checked(*d, "design", "s0_sq", false, 100.0, positive, "must be > 0");
    p.alpha = Probability(rd.checked(*d, "design", "alpha", false, 0.05, open_unit, "must lie in (0,1)"));
    p.beta = Probability(rd.checked(*d, "design", "beta", false, 0.20, open_unit, "must lie in (0,1)"));
    out.design = p;
}

void read_simulation(Reader& rd, const json& doc, ScenarioFile& out) {
    const json* s = rd.object(doc, "", "simulation", false);
    if (!s) return;
    rd.reject_unknown(*s, "simulation", {"n", "true_mu_delta", "replicates", "seed", "futility_delta"});
    SimulationFragment f;
    if (auto n = rd.integer(*s, "simulation", "n", false)) {
        if (*n < 2) {
            rd.error("simulation.n", "must be >= 2");
        } else {
            f.n = *n;
        }
    }
    if (s->contains("true_mu_delta")) {
        const json& mu = s->at("true_mu_delta");
        if (mu.is_number()) {
            f.true_mu_delta = {mu.get<double>()};
        } else if (mu.is_array() && !mu.empty() &&
                   std::all_of(mu.begin(), mu.end(), [](const json& x) { return x.is_number(); })) {
            f.true_mu_delta = mu.get<std::vector<double>>();
        } else {
            rd.error("simulation.true_mu_delta", "expected a number or a non-empty array of numbers");
        }
    }
    if (auto r = rd.integer(*s, "simulation", "replicates", false)) {
        if (*r < 1) {
            rd.error("simulation.replicates", "must be >= 1");
        } else {
            f.replicates = *r;
        }
    }
    if (s->contains("seed")) {
        const json& seed = s->at("seed");
        if (seed.is_number_unsigned()) {
            f.seed = seed.get<std::uint64_t>();
        } else if (seed.is_number_integer() && seed.get<long long>() >= 0) {
            f.seed = static_cast<std::uint64_t>(seed.get<long long>());
        } else {
            rd.error("simulation.seed", "expected a non-negative integer");
        }
    }
    if (auto fd = rd.number(*s, "simulation", "futility_delta", false)) f.futility_delta = *fd;
    out.simulation = f;
}

ScenarioFile read_document(const json& doc, const std::map<std::string, detail::TextPosition>* positions) {
    Reader rd(positions);
    ScenarioFile out;
    if (!doc.is_object()) {
        rd.error("", "scenario must be a JSON object");
        throw ScenarioError(rd.errors);
    }
    rd.reject_unknown(doc, "",
                      {"schema_version", "name", "description", "sources", "weights_scale", "hyper", "design",
                       "endpoint", "simulation", "results"});
    if (auto v = rd.integer(doc, "", "schema_version", true)) {
        if (*v != kScenarioSchemaVersion) {
            rd.error("schema_version", "unknown schema_version " + std::to_string(*v) + " (supported: 1)");
        }
    }
    for (const char* key : {"name", "description"}) {
        if (!doc.contains(key)) continue;
        if (!doc.at(key).is_string()) {
            rd.error(key, "expected a string");
        } else {
            (std::string_view(key) == "name" ? out.name : out.description) = doc.at(key).get<std::string>();
        }
    }
    read_sources(rd, doc, out);
    if (doc.contains("weights_scale")) {
        const json& s = doc.at("weights_scale");
        if (s == "raw") {
            out.weights_scale = WeightScale::Raw;
        } else if (s == "transformed") {
            out.weights_scale = WeightScale::Transformed;
        } else {
            rd.error("weights_scale", "expected \"raw\" or \"transformed\"");
        }
    }
    read_hyper(rd, doc, out);
    read_endpoint(rd, doc, out);
    read_design(rd, doc, out);
    read_simulation(rd, doc, out);
    if (!rd.errors.empty()) throw ScenarioError(rd.errors);
    return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<FieldError> errors)
    : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

ScenarioFile parse_scenario_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // Byte offset -> line/column.
        int line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ScenarioError({FieldError{"", std::string("malformed JSON: ") + e.what(), line, column}});
    }
    const auto positions = detail::index_json_positions(text);
    return read_document(doc, &positions);
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

ScenarioFile scenario_from_json(const json& doc) { return read_document(doc, nullptr); }

json to_json(const EndpointModel& model) {
    json j{{"model", std::string(endpoint_name(model))}};
    if (const auto* b = std::get_if<endpoint::BinaryTwoArm>(&model)) {
        j["rho_t"] = b->rho_t;
        j["rho_c"] = b->rho_c;
    } else if (const auto* s = std::get_if<endpoint::SingleArmBinary>(&model)) {
        j["p"] = s->p;
    }
    return j;
}

json to_json(const GammaMixtureHyperparams& hyper) {
    json j{{"a01", hyper.a01()}, {"b01", hyper.b01()}, {"a02", hyper.a02()}, {"b02", hyper.b02()}};
    if (hyper.c0()) j["c0"] = *hyper.c0();
    return j;
}

json to_json(const DesignParams& d) {
    return {{"delta", d.delta},   {"sigma0_sq", d.sigma0_sq}, {"allocation", d.allocation},
            {"eta", d.eta.value()}, {"zeta", d.zeta.value()}, {"mu0", d.mu0},
            {"s0_sq", d.s0_sq},   {"alpha", d.alpha.value()}, {"beta", d.beta.value()}};
}

json to_json(const ScenarioFile& s) {
    json j;
    j["schema_version"] = s.schema_version;
    if (!s.name.empty()) j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["sources"] = json::array();
    for (std::size_t q = 0; q < s.sources.size(); ++q) {
        j["sources"].push_back(
            {{"id", s.sources[q].id}, {"theta", s.sources[q].theta}, {"tau_sq", s.sources[q].tau_sq},
             {"w", s.weights[q]}});
    }
    j["weights_scale"] = std::string(to_string(s.weights_scale));
    j["hyper"] = to_json(s.hyper);
    j["design"] = to_json(s.design);
    j["endpoint"] = to_json(s.endpoint);
    if (s.simulation) {
        const auto& f = *s.simulation;
        json sim{{"true_mu_delta", f.true_mu_delta}, {"replicates", f.replicates}, {"seed", f.seed}};
        if (f.n) sim["n"] = *f.n;
        if (f.futility_delta) sim["futility_delta"] = *f.futility_delta;
        j["simulation"] = sim;
    }
    return j;
}

}  // namespace cssd
