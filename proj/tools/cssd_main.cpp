// cssd: batch front end for scenario files.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cssd/linearize.hpp"
#include "cssd/pipeline.hpp"
#include "cssd/scenario.hpp"

namespace {

using namespace cssd;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

/// Usage errors and the raw-weight guard; exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string scenario;
    bool exact = false;
    bool json_errors = false;
    std::string method = "star";
    bool no_linearize = false;
    bool raw_ok = false;
    bool no_borrow = false;
    bool frequentist = false;
    std::vector<double> mu;
    std::string csv;
    std::optional<double> futility_delta;
    std::optional<long> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<long> n;
    std::string axes = "w1";
    double step = 0.01;
    std::string out;
    bool no_simulation = false;
};

AggregationMethod parse_method(const std::string& m) {
    if (m == "star") return AggregationMethod::Star;
    if (m == "legacy") return AggregationMethod::Legacy;
    throw UsageError("--method must be star or legacy");
}

/// Weights for prior/design. Raw weights are linearized unless the caller
/// insists, and insisting needs --raw-ok.
bool linearize_flag(const Options& o, const ScenarioFile& s) {
    if (o.no_linearize && s.weights_scale == WeightScale::Raw && !o.raw_ok) {
        throw UsageError(
            "--no-linearize would aggregate RAW weights as if they were transformed; for the Alzheimer's "
            "scenario this gives n=332 instead of the intended design. Pass --raw-ok to do it anyway");
    }
    return !o.no_linearize;
}

std::vector<std::size_t> parse_axes(const std::string& text, std::size_t n_sources) {
    std::vector<std::size_t> axes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty() && (item[0] == 'w' || item[0] == 'W')) item.erase(0, 1);
        std::size_t used = 0;
        long k = 0;
        try {
            k = std::stol(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || k < 1 || static_cast<std::size_t>(k) > n_sources) {
            throw UsageError("--axes: expected source numbers like w1,w2 within 1.." + std::to_string(n_sources));
        }
        axes.push_back(static_cast<std::size_t>(k - 1));
    }
    if (axes.empty() || axes.size() > 2) throw UsageError("--axes: one or two sources");
    return axes;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

int cmd_transform(const Options& o) {
    const ScenarioFile s = parse_scenario(o.scenario);
    if (s.weights_scale != WeightScale::Raw) throw UsageError("weights are already transformed");
    const WeightVector t = linearize_all(s.sources, s.weight_vector(), s.hyper);
    print_transform_table(std::cout, s, t, o.exact);
    return 0;
}

int cmd_prior(const Options& o) {
    const ScenarioFile s = parse_scenario(o.scenario);
    if (s.sources.empty()) throw UsageError("prior needs at least one historical source");
    const WeightVector w = design_weights(s, linearize_flag(o, s));
    const CollectivePrior p = build_prior(s, w, parse_method(o.method));
    print_prior(std::cout, s, p, o.exact);
    return 0;
}

int cmd_sample_size(const Options& o) {
    const ScenarioFile s = parse_scenario(o.scenario);
    if (o.no_borrow && o.frequentist) throw UsageError("--no-borrow and --frequentist are exclusive");
    PipelineOptions po;
    po.method = parse_method(o.method);
    std::string label = "borrowing";
    if (o.frequentist) {
        po.mode = DesignMode::Frequentist;
        label = "frequentist";
    } else if (o.no_borrow) {
        po.mode = DesignMode::NoBorrow;
        label = "no borrowing";
    } else {
        po.linearize = linearize_flag(o, s);
    }
    const DesignOutcome d = run_design(s, po);
    print_sample_size(std::cout, d.size, label, o.exact);
    return 0;
}

int cmd_simulate(const Options& o) {
    ScenarioFile s = parse_scenario(o.scenario);
    if (!s.simulation) s.simulation = SimulationFragment{};
    if (!o.mu.empty()) s.simulation->true_mu_delta = o.mu;
    if (o.replicates) s.simulation->replicates = *o.replicates;
    if (o.seed) s.simulation->seed = *o.seed;
    if (o.futility_delta) s.simulation->futility_delta = o.futility_delta;
    if (o.n) s.simulation->n = o.n;
    const SimulationReport r = run_scenario_simulation(s);
    print_simulation_table(std::cout, s.name, r, o.exact);
    if (!o.csv.empty()) {
        std::ostringstream csv;
        write_simulation_csv(csv, s.name, r);
        write_text(o.csv, csv.str());
    }
    return 0;
}

int cmd_sweep(const Options& o) {
    const ScenarioFile s = parse_scenario(o.scenario);
    SweepSpec spec{parse_axes(o.axes, s.sources.size()), o.step};
    const auto rows = sweep_surface(s.sources, s.hyper, s.design, s.weights, spec);
    std::ostringstream csv;
    write_sweep_csv(csv, rows, spec.axes, o.exact);
    write_text(o.out, csv.str());
    return 0;
}

int cmd_report(const Options& o) {
    const ScenarioFile s = parse_scenario(o.scenario);
    const json report = build_report(s, !o.no_simulation);
    write_text(o.out, report.dump(2) + "\n");
    return 0;
}

void report_error(const Options& o, const std::string& kind, const std::vector<FieldError>& fields,
                  const std::string& message) {
    if (o.json_errors) {
        json errors = json::array();
        for (const auto& f : fields) {
            json e{{"path", f.path}, {"message", f.message}};
            if (f.line > 0) {
                e["line"] = f.line;
                e["column"] = f.column;
            }
            errors.push_back(e);
        }
        std::cerr << json{{"kind", kind}, {"message", message}, {"errors", errors}}.dump() << '\n';
        return;
    }
    if (fields.empty()) {
        std::cerr << "error: " << message << '\n';
        return;
    }
    for (const auto& f : fields) std::cerr << "error: " << f.to_string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Bayesian sample size with commensurate priors from several historical sources"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--exact", o.exact, "Print full precision instead of 6 significant digits");
    app.add_flag("--json-errors", o.json_errors, "Errors as one JSON object on stderr");

    auto scenario_arg = [&](CLI::App* sub) {
        sub->add_option("scenario", o.scenario, "Scenario JSON file")->required();
    };
    auto weight_flags = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "star or legacy")->capture_default_str();
        sub->add_flag("--no-linearize", o.no_linearize, "Aggregate the given weights without transforming");
        sub->add_flag("--raw-ok", o.raw_ok, "Allow --no-linearize on raw weights");
    };

    auto* transform = app.add_subcommand("transform-weights", "Raw to transformed weights");
    scenario_arg(transform);

    auto* prior = app.add_subcommand("prior", "Collective prior");
    scenario_arg(prior);
    weight_flags(prior);

    auto* size = app.add_subcommand("sample-size", "Sample size (or events) for the new trial");
    scenario_arg(size);
    weight_flags(size);
    size->add_flag("--no-borrow", o.no_borrow, "Vague prior, no historical data");
    size->add_flag("--frequentist", o.frequentist, "Frequentist z-test size");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo operating characteristics");
    scenario_arg(simulate);
    simulate->add_option("--mu", o.mu, "True effect(s)")->delimiter(',');
    simulate->add_option("--n", o.n, "Total sample size (default: borrowing design)");
    simulate->add_option("--replicates", o.replicates);
    simulate->add_option("--seed", o.seed);
    simulate->add_option("--futility-delta", o.futility_delta, "Threshold for futility tallies (default delta)");
    simulate->add_option("--csv", o.csv, "Also write a CSV summary");

    auto* sweep = app.add_subcommand("sweep", "Precision and n over a weight grid, as CSV");
    scenario_arg(sweep);
    sweep->add_option("--axes", o.axes, "One or two sources, e.g. w1,w2")->capture_default_str();
    sweep->add_option("--step", o.step)->capture_default_str();
    sweep->add_option("--out", o.out, "Output file (default stdout)");

    auto* report = app.add_subcommand("report", "Full pipeline as one JSON report");
    scenario_arg(report);
    report->add_option("--out", o.out, "Output file (default stdout)");
    report->add_flag("--no-simulation", o.no_simulation);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*transform) return cmd_transform(o);
        if (*prior) return cmd_prior(o);
        if (*size) return cmd_sample_size(o);
        if (*simulate) return cmd_simulate(o);
        if (*sweep) return cmd_sweep(o);
        if (*report) return cmd_report(o);
    } catch (const ScenarioError& e) {
        report_error(o, "validation", e.errors(), e.what());
        return kExitValidation;
    } catch (const UsageError& e) {
        report_error(o, "validation", {}, e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        report_error(o, "runtime", {}, e.what());
        return kExitRuntime;
    }
    return kExitRuntime;
}
