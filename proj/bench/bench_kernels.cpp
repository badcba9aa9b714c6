// Serial reference vs OpenMP kernels: wall time and agreement.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "cssd/design.hpp"
#include "cssd/simulate.hpp"

namespace {

using namespace cssd;
using Clock = std::chrono::steady_clock;

template <class F>
double seconds(F&& f) {
    const auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    SimulationConfig sim;
    sim.design.delta = 1.0;
    sim.design.sigma0_sq = 13.6161;
    sim.prior = {0.1306, 0.4048};
    sim.n = 204;
    sim.true_mu_delta = 1.0;
    sim.replicates = 200000;
    sim.seed = 7;
    SimulationResult serial, parallel;
    const double ts = seconds([&] { serial = run_simulation_serial(sim); });
    const double tp = seconds([&] { parallel = run_simulation(sim); });
    std::printf("simulate  %ld reps  serial %.3fs  omp %.3fs  speedup %.2fx  identical %s\n", sim.replicates, ts,
                tp, ts / tp,
                serial.efficacious == parallel.efficacious && serial.futile == parallel.futile ? "yes" : "NO");

    std::vector<HistoricalSource> sources{
        {"S1", 2.74, 0.2}, {"S2", 1.36, 0.6}, {"S3", 0.5, 0.9}, {"S4", 1.1, 0.3}, {"S5", 0.2, 0.5}};
    const std::vector<double> w{0.2, 0.4, 0.8, 0.6, 0.7};
    GammaMixtureHyperparams hyper;
    DesignParams d;
    d.delta = 1.0;
    d.sigma0_sq = 13.6161;
    const SweepSpec spec{{0, 1}, 0.002};
    std::vector<SweepRow> a, b;
    const double ss = seconds([&] { a = sweep_surface_serial(sources, hyper, d, w, spec); });
    const double sp = seconds([&] { b = sweep_surface(sources, hyper, d, w, spec); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
        same = a[i].precision_star == b[i].precision_star && a[i].n_star_linearized == b[i].n_star_linearized;
    }
    std::printf("sweep     %zu rows  serial %.3fs  omp %.3fs  speedup %.2fx  identical %s\n", a.size(), ss, sp,
                ss / sp, same ? "yes" : "NO");
    return 0;
}
