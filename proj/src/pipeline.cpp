#include "cssd/pipeline.hpp"

#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cssd/linearize.hpp"

namespace cssd {

using nlohmann::json;

WeightVector design_weights(const ScenarioFile& scenario, bool linearize) {
    const WeightVector given = scenario.weight_vector();
    if (given.scale() == WeightScale::Raw && linearize) {
        return linearize_all(scenario.sources, given, scenario.hyper);
    }
    return given;
}

CollectivePrior build_prior(const ScenarioFile& scenario, const WeightVector& weights, AggregationMethod method) {
    return method == AggregationMethod::Star ? aggregate_star(scenario.sources, weights, scenario.hyper)
                                             : aggregate_legacy(scenario.sources, weights, scenario.hyper);
}

DesignOutcome run_design(const ScenarioFile& scenario, const PipelineOptions& options) {
    DesignOutcome out;
    const DesignParams& d = scenario.design;
    const bool normal = std::holds_alternative<endpoint::Normal>(scenario.endpoint);

    switch (options.mode) {
        case DesignMode::Frequentist: {
            if (normal) {
                out.size = sample_size_frequentist(d);
            } else {
                DesignParams f = d;
                f.eta = Probability(1.0 - d.alpha);
                f.zeta = Probability(1.0 - d.beta);
                out.size = sample_size_for(scenario.endpoint, f, 0.0);
            }
            break;
        }
        case DesignMode::NoBorrow:
            out.size = normal ? sample_size_no_borrow(d) : sample_size_for(scenario.endpoint, d, 1.0 / d.s0_sq);
            break;
        case DesignMode::Borrow: {
            if (scenario.sources.empty()) {
                throw std::invalid_argument("borrowing design needs at least one historical source");
            }
            out.weights = design_weights(scenario, options.linearize);
            out.prior = build_prior(scenario, *out.weights, options.method);
            out.size = normal ? sample_size_borrow_normal(d, *out.prior)
                              : sample_size_for(scenario.endpoint, d, out.prior->precision());
            if (!normal) {
                if (out.prior->method == AggregationMethod::Legacy) {
                    out.size.warnings.push_back("legacy aggregation is not monotone in the weights");
                }
                if (out.prior->weight_scale == WeightScale::Raw) {
                    out.size.warnings.push_back("prior built from raw weights: over-discounts historical data");
                }
            }
            break;
        }
    }
    out.warnings = out.size.warnings;
    return out;
}

SimulationConfig simulation_config(const ScenarioFile& scenario, const CollectivePrior& prior, long n,
                                   double true_mu_delta) {
    SimulationConfig c;
    c.design = scenario.design;
    c.prior = NormalPrior::from(prior);
    c.n = n;
    c.true_mu_delta = true_mu_delta;
    if (scenario.simulation) {
        c.replicates = scenario.simulation->replicates;
        c.seed = scenario.simulation->seed;
        c.futility_delta = scenario.simulation->futility_delta;
    }
    return c;
}

SimulationReport run_scenario_simulation(const ScenarioFile& scenario) {
    if (!std::holds_alternative<endpoint::Normal>(scenario.endpoint)) {
        throw std::invalid_argument("simulation is implemented for the normal endpoint only");
    }
    const DesignOutcome design = run_design(scenario, {});
    SimulationReport report;
    report.prior = *design.prior;
    report.n = design.size.n;
    if (scenario.simulation && scenario.simulation->n) report.n = *scenario.simulation->n;

    const std::vector<double> mus =
        scenario.simulation ? scenario.simulation->true_mu_delta : SimulationFragment{}.true_mu_delta;
    for (double mu : mus) {
        report.rows.push_back({mu, run_simulation(simulation_config(scenario, report.prior, report.n, mu))});
    }
    return report;
}

json to_json(const SampleSizeResult& r) {
    json j{{"n", r.n},
           {"n_real", r.n_real},
           {"n_bound", r.n_bound},
           {"convention", std::string(to_string(r.convention))},
           {"prior_precision_used", r.prior_precision_used},
           {"decisive_by_prior", r.decisive_by_prior},
           {"warnings", r.warnings}};
    if (r.per_arm) j["per_arm"] = *r.per_arm;
    return j;
}

json to_json(const CollectivePrior& p) {
    return {{"mean", p.mean},
            {"variance", p.variance},
            {"precision", p.precision()},
            {"synthesis_weights", p.synthesis_weights},
            {"method", std::string(to_string(p.method))},
            {"weights_scale", std::string(to_string(p.weight_scale))},
            {"degenerate_sources", p.degenerate_sources}};
}

json to_json(const SimulationResult& r) {
    return {{"pct_efficacious", r.pct_efficacious},
            {"pct_futile", r.pct_futile},
            {"pct_inconclusive", r.pct_inconclusive},
            {"efficacious", r.efficacious},
            {"futile", r.futile},
            {"inconclusive", r.inconclusive},
            {"replicates", r.replicates},
            {"seed", r.seed},
            {"mc_stderr", r.mc_stderr}};
}

json to_json(const WeightVector& w) {
    return {{"values", std::vector<double>(w.values().begin(), w.values().end())},
            {"scale", std::string(to_string(w.scale()))}};
}

json sweep_to_json(std::span<const SweepRow> rows, std::span<const std::size_t> axes) {
    json j;
    j["axes"] = json::array();
    for (std::size_t a : axes) j["axes"].push_back(a + 1);
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"w", r.w},
                             {"precision_star", r.precision_star},
                             {"precision_legacy", r.precision_legacy},
                             {"n_star_raw", r.n_star_raw},
                             {"n_star_linearized", r.n_star_linearized}});
    }
    return j;
}

json build_report(const ScenarioFile& scenario, bool with_simulation) {
    json report = to_json(scenario);
    json results;
    const bool normal = std::holds_alternative<endpoint::Normal>(scenario.endpoint);

    json sizes;
    if (normal) sizes["frequentist"] = to_json(run_design(scenario, {.mode = DesignMode::Frequentist}).size);
    sizes["no_borrow"] = to_json(run_design(scenario, {.mode = DesignMode::NoBorrow}).size);
    if (!scenario.sources.empty()) {
        const DesignOutcome borrow = run_design(scenario, {});
        results["transformed_weights"] = to_json(*borrow.weights);
        results["prior"] = to_json(*borrow.prior);
        sizes["borrow"] = to_json(borrow.size);
        if (scenario.weights_scale == WeightScale::Raw) {
            // Shown for contrast only: what the raw weights would have given.
            const DesignOutcome raw = run_design(scenario, {.linearize = false});
            sizes["borrow_raw_weights"] = to_json(raw.size);
        }
        if (with_simulation && normal && scenario.simulation) {
            const SimulationReport sim = run_scenario_simulation(scenario);
            json rows = json::array();
            for (const auto& row : sim.rows) {
                json r = to_json(row.result);
                r["true_mu_delta"] = row.true_mu_delta;
                rows.push_back(r);
            }
            results["simulation"] = {{"n", sim.n}, {"rows", rows}};
        }
    }
    results["sample_size"] = sizes;
    report["results"] = results;
    return report;
}

std::string format_number(double x, bool exact) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(exact ? std::numeric_limits<double>::max_digits10 : 6) << x;
    return s.str();
}

void print_transform_table(std::ostream& out, const ScenarioFile& scenario, const WeightVector& transformed,
                           bool exact) {
    out << std::left << std::setw(24) << "source" << std::setw(14) << "tau_sq" << std::setw(14) << "w"
        << "w'\n";
    for (std::size_t q = 0; q < scenario.sources.size(); ++q) {
        out << std::setw(24) << scenario.sources[q].id << std::setw(14)
            << format_number(scenario.sources[q].tau_sq, exact) << std::setw(14)
            << format_number(scenario.weights[q], exact) << format_number(transformed[q], exact) << '\n';
    }
}

void print_prior(std::ostream& out, const ScenarioFile& scenario, const CollectivePrior& prior, bool exact) {
    out << "method      " << to_string(prior.method) << " (" << to_string(prior.weight_scale) << " weights)\n"
        << "mean        " << format_number(prior.mean, exact) << '\n'
        << "variance    " << format_number(prior.variance, exact) << '\n'
        << "precision   " << format_number(prior.precision(), exact) << '\n'
        << "synthesis weights:\n";
    for (std::size_t q = 0; q < scenario.sources.size(); ++q) {
        out << "  " << std::left << std::setw(24) << scenario.sources[q].id
            << format_number(prior.synthesis_weights[q], exact) << '\n';
    }
    for (const auto& id : prior.degenerate_sources) {
        out << "warning: source '" << id << "' has near-zero variance\n";
    }
}

void print_sample_size(std::ostream& out, const SampleSizeResult& r, std::string_view label, bool exact) {
    out << label << ": n = " << r.n << " (" << to_string(r.convention) << ")";
    if (r.per_arm) out << ", per arm " << *r.per_arm;
    out << "\n  n_real = " << format_number(r.n_real, exact)
        << ", prior precision = " << format_number(r.prior_precision_used, exact);
    if (r.decisive_by_prior) out << ", decisive by prior";
    out << '\n';
    for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
}

void print_simulation_table(std::ostream& out, std::string_view name, const SimulationReport& report,
                            bool exact) {
    out << std::left << std::setw(16) << "config" << std::setw(8) << "n";
    for (const auto& row : report.rows) {
        const std::string mu = "mu=" + format_number(row.true_mu_delta, exact);
        out << std::setw(10) << ("%Eff " + mu) << ' ' << std::setw(10) << ("%Fut " + mu) << ' ' << std::setw(10)
            << "Total %" << ' ';
    }
    out << '\n' << std::setw(16) << (name.empty() ? std::string("-") : std::string(name)) << std::setw(8)
        << report.n;
    for (const auto& row : report.rows) {
        const auto& r = row.result;
        out << std::setw(10) << format_number(r.pct_efficacious, exact) << ' ' << std::setw(10)
            << format_number(r.pct_futile, exact) << ' ' << std::setw(10)
            << format_number(r.pct_efficacious + r.pct_futile, exact) << ' ';
    }
    out << '\n';
    for (const auto& row : report.rows) {
        if (row.result.inconclusive > 0) {
            out << "warning: " << row.result.inconclusive << " inconclusive replicates at mu="
                << format_number(row.true_mu_delta, exact) << '\n';
        }
    }
    if (!report.rows.empty()) {
        out << "replicates " << report.rows.front().result.replicates << ", seed " << report.rows.front().result.seed
            << '\n';
    }
}

void write_simulation_csv(std::ostream& out, std::string_view name, const SimulationReport& report) {
    out << "config,n,true_mu_delta,pct_efficacious,pct_futile,pct_inconclusive,replicates,seed,mc_stderr\n";
    for (const auto& row : report.rows) {
        const auto& r = row.result;
        out << name << ',' << report.n << ',' << format_number(row.true_mu_delta, true) << ','
            << format_number(r.pct_efficacious, true) << ',' << format_number(r.pct_futile, true) << ','
            << format_number(r.pct_inconclusive, true) << ',' << r.replicates << ',' << r.seed << ','
            << format_number(r.mc_stderr, true) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::span<const std::size_t> axes,
                     bool exact) {
    for (std::size_t a : axes) out << 'w' << (a + 1) << ',';
    out << "precision_star,precision_legacy,n_star_raw,n_star_linearized\n";
    for (const auto& r : rows) {
        for (double w : r.w) out << format_number(w, exact) << ',';
        out << format_number(r.precision_star, exact) << ',' << format_number(r.precision_legacy, exact) << ','
            << format_number(r.n_star_raw, exact) << ',' << format_number(r.n_star_linearized, exact) << '\n';
    }
}

}  // namespace cssd
