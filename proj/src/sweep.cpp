#include <cmath>
#include <stdexcept>
#include <string>

#include "cssd/design.hpp"
#include "cssd/linearize.hpp"

namespace cssd {

std::vector<double> sweep_grid(double step) {
    if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must lie in (0, 0.5]");
    std::vector<double> grid;
    const auto count = static_cast<long>(std::floor(1.0 / step + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(std::min(static_cast<double>(i) * step, 1.0));
    if (grid.back() < 1.0) {
        if (1.0 - grid.back() < 1e-9) {
            grid.back() = 1.0;
        } else {
            grid.push_back(1.0);
        }
    }
    return grid;
}

namespace {

struct SweepContext {
    std::span<const HistoricalSource> sources;
    const GammaMixtureHyperparams& hyper;
    std::span<const double> base;
    std::vector<std::size_t> axes;
    std::vector<double> grid;
    double n_scale;        // sigma0^2 / (R (1 - R))
    double target;         // required posterior precision
    std::vector<double> base_linearized;

    std::size_t rows() const {
        std::size_t total = 1;
        for (std::size_t i = 0; i < axes.size(); ++i) total *= grid.size();
        return total;
    }

    SweepRow row(std::size_t index) const {
        std::vector<double> w(base.begin(), base.end());
        std::vector<double> w_lin = base_linearized;
        SweepRow out;
        out.w.resize(axes.size());
        // First axis varies slowest.
        for (std::size_t k = axes.size(); k-- > 0;) {
            const double value = grid[index % grid.size()];
            index /= grid.size();
            out.w[k] = value;
            w[axes[k]] = value;
            w_lin[axes[k]] = linearize_weight(value, sources[axes[k]], hyper);
        }
        out.precision_star = star_precision(sources, w, hyper);
        out.precision_legacy = aggregate_legacy(sources, WeightVector::raw(w), hyper).precision();
        const double prec_lin = star_precision(sources, w_lin, hyper);
        out.n_star_raw = n_scale * (target - out.precision_star);
        out.n_star_linearized = n_scale * (target - prec_lin);
        return out;
    }
};

SweepContext make_context(std::span<const HistoricalSource> sources, const GammaMixtureHyperparams& hyper,
                          const DesignParams& design, std::span<const double> base_weights,
                          const SweepSpec& spec) {
    design.validate();
    if (sources.empty()) throw std::invalid_argument("sweep needs at least one source");
    if (base_weights.size() != sources.size()) {
        throw std::invalid_argument("weight vector length does not match source count");
    }
    if (spec.axes.empty() || spec.axes.size() > 2) throw std::invalid_argument("sweep takes one or two axes");
    for (std::size_t a : spec.axes) {
        if (a >= sources.size()) {
            throw std::out_of_range("sweep axis " + std::to_string(a + 1) + " exceeds source count " +
                                    std::to_string(sources.size()));
        }
    }
    if (spec.axes.size() == 2 && spec.axes[0] == spec.axes[1]) {
        throw std::invalid_argument("sweep axes must be distinct");
    }
    for (double w : base_weights) require_unit_interval(w, "base weight");

    SweepContext ctx{sources, hyper, base_weights, spec.axes, sweep_grid(spec.step),
                     design.sigma0_sq / (design.allocation * (1.0 - design.allocation)),
                     required_precision(design.delta, design.eta, design.zeta), {}};
    ctx.base_linearized.resize(sources.size());
    for (std::size_t q = 0; q < sources.size(); ++q) {
        ctx.base_linearized[q] = linearize_weight(base_weights[q], sources[q], hyper);
    }
    return ctx;
}

}  // namespace

std::vector<SweepRow> sweep_surface_serial(std::span<const HistoricalSource> sources,
                                           const GammaMixtureHyperparams& hyper, const DesignParams& design,
                                           std::span<const double> base_weights, const SweepSpec& spec) {
    const SweepContext ctx = make_context(sources, hyper, design, base_weights, spec);
    std::vector<SweepRow> rows(ctx.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = ctx.row(i);
    return rows;
}

std::vector<SweepRow> sweep_surface(std::span<const HistoricalSource> sources,
                                    const GammaMixtureHyperparams& hyper, const DesignParams& design,
                                    std::span<const double> base_weights, const SweepSpec& spec) {
    const SweepContext ctx = make_context(sources, hyper, design, base_weights, spec);
    const auto count = static_cast<long>(ctx.rows());
    std::vector<SweepRow> rows(ctx.rows());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) rows[i] = ctx.row(static_cast<std::size_t>(i));
    return rows;
}

}  // namespace cssd
