#include "cssd/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "cssd/rng.hpp"

namespace cssd {

double CounterRng::normal() { return std_normal_quantile(uniform()); }

void SimulationConfig::validate() const {
    design.validate();
    if (!(prior.variance > 0.0)) throw std::invalid_argument("prior variance must be positive");
    if (replicates < 1) throw std::invalid_argument("replicates must be at least 1");
    if (n < 2) throw std::invalid_argument("simulation needs n >= 2");
    const double treated = static_cast<double>(n) * design.allocation;
    if (std::abs(treated - std::round(treated)) > 1e-9) {
        throw std::invalid_argument("n * R must be a whole number of patients");
    }
    if (n_treatment() < 1 || n_control() < 1) throw std::invalid_argument("both arms need at least one patient");
    if (!std::isfinite(true_mu_delta)) throw std::invalid_argument("true_mu_delta must be finite");
}

long SimulationConfig::n_treatment() const {
    return std::lround(static_cast<double>(n) * design.allocation);
}

double simulate_ybar_delta(std::uint64_t rep_index, const SimulationConfig& config) {
    CounterRng rng(config.seed, rep_index);
    const double sigma = std::sqrt(config.design.sigma0_sq);
    const long n_t = config.n_treatment();
    const long n_c = config.n_control();

    double sum_t = 0.0;
    for (long i = 0; i < n_t; ++i) sum_t += config.true_mu_delta + sigma * rng.normal();
    double sum_c = 0.0;
    for (long i = 0; i < n_c; ++i) sum_c += sigma * rng.normal();
    return sum_t / static_cast<double>(n_t) - sum_c / static_cast<double>(n_c);
}

namespace {

DecisionRule rule_for(const SimulationConfig& config) {
    return DecisionRule(config.futility_delta.value_or(config.design.delta), config.design.eta,
                        config.design.zeta);
}

DecisionOutcome analyze(double ybar_delta, const SimulationConfig& config, const DecisionRule& rule) {
    const auto& d = config.design;
    return rule(posterior_update(config.prior, ybar_delta, config.n, d.allocation, d.sigma0_sq));
}

SimulationResult summarize(const SimulationConfig& config, long eff, long fut, long inc) {
    SimulationResult r;
    r.efficacious = eff;
    r.futile = fut;
    r.inconclusive = inc;
    r.replicates = config.replicates;
    r.seed = config.seed;
    const auto reps = static_cast<double>(config.replicates);
    r.pct_efficacious = 100.0 * static_cast<double>(eff) / reps;
    r.pct_futile = 100.0 * static_cast<double>(fut) / reps;
    r.pct_inconclusive = 100.0 * static_cast<double>(inc) / reps;
    const double p = static_cast<double>(eff) / reps;
    r.mc_stderr = std::sqrt(p * (1.0 - p) / reps);
    return r;
}

}  // namespace

DecisionOutcome analyze_replicate(double ybar_delta, const SimulationConfig& config) {
    config.validate();
    return analyze(ybar_delta, config, rule_for(config));
}

DecisionOutcome run_replicate(std::uint64_t rep_index, const SimulationConfig& config) {
    return analyze_replicate(simulate_ybar_delta(rep_index, config), config);
}

SimulationResult run_simulation_serial(const SimulationConfig& config) {
    config.validate();
    const DecisionRule rule = rule_for(config);
    long eff = 0, fut = 0, inc = 0;
    for (long r = 0; r < config.replicates; ++r) {
        const auto v = analyze(simulate_ybar_delta(static_cast<std::uint64_t>(r), config), config, rule).verdict;
        eff += v == Verdict::Efficacious;
        fut += v == Verdict::Futile;
        inc += v == Verdict::Inconclusive;
    }
    return summarize(config, eff, fut, inc);
}

SimulationResult run_simulation(const SimulationConfig& config) {
    config.validate();
    const DecisionRule rule = rule_for(config);
    long eff = 0, fut = 0, inc = 0;
#pragma omp parallel for schedule(static) reduction(+ : eff, fut, inc)
    for (long r = 0; r < config.replicates; ++r) {
        const auto v = analyze(simulate_ybar_delta(static_cast<std::uint64_t>(r), config), config, rule).verdict;
        eff += v == Verdict::Efficacious;
        fut += v == Verdict::Futile;
        inc += v == Verdict::Inconclusive;
    }
    return summarize(config, eff, fut, inc);
}

}  // namespace cssd
