#include <doctest.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cssd/borrowing.hpp"
#include "cssd/linearize.hpp"

using namespace cssd;

namespace {

const GammaMixtureHyperparams kFig1(1.1, 1.1, 1e6, 1.0, 0.05);

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::vector<HistoricalSource> random_sources(std::mt19937_64& gen, int q) {
    std::uniform_real_distribution<double> th(-3.0, 3.0), tau(0.01, 5.0);
    std::vector<HistoricalSource> s;
    for (int i = 0; i < q; ++i) s.push_back({"S" + std::to_string(i + 1), th(gen), tau(gen)});
    return s;
}

}  // namespace

TEST_CASE("source validation") {
    CHECK_NOTHROW(HistoricalSource{"a", 1.0, 0.5}.validate());
    CHECK_THROWS_AS(HistoricalSource({"a", 1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(HistoricalSource({"a", 1.0, -1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(HistoricalSource({"a", std::nan(""), 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("weight vector validation") {
    CHECK_NOTHROW(WeightVector::raw({0.0, 0.5, 1.0}));
    CHECK_THROWS_AS(WeightVector::raw({0.0, 1.5}), std::domain_error);
    CHECK_THROWS_AS(WeightVector::transformed({-0.1}), std::domain_error);
    CHECK(WeightVector::transformed({0.2}).scale() == WeightScale::Transformed);
}

TEST_CASE("commensurate variance examples") {
    const GammaMixtureHyperparams paper(1.01, 1.01, 1e6, 1.0);
    CHECK(std::fabs(commensurate_variance({"", 0, 0.1}, 0.0, kFig1) - 0.100001) < 1e-9);
    CHECK(std::fabs(commensurate_variance({"", 0, 0.1}, 1.0, kFig1) - 11.1) < 1e-12);
    CHECK(std::fabs(commensurate_variance({"", 0, 4.21}, 0.65, paper) - 69.860001) < 1e-4);
}

TEST_CASE("commensurate variance strictly increasing in w") {
    std::mt19937_64 gen(1);
    for (const auto& s : random_sources(gen, 20)) {
        double prev = commensurate_variance(s, 0.0, kFig1);
        for (int k = 1; k <= 100; ++k) {
            const double v = commensurate_variance(s, k / 100.0, kFig1);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("star aggregation examples") {
    const GammaMixtureHyperparams paper(1.01, 1.01, 1e6, 1.0);
    // Config A with its published transformed weights.
    const std::vector<HistoricalSource> a{
        {"1", 0.10, 1.25}, {"2", 0.24, 0.73}, {"3", 0.37, 0.92}, {"4", 0.0, 1.29}, {"5", -0.05, 0.66}};
    const auto pa = aggregate_star(a, WeightVector::transformed({3.05e-3, 4.76e-3, 3.48e-2, 1.86e-2, 1.49e-2}), paper);
    CHECK(std::fabs(pa.mean - 0.131) <= 0.001);
    CHECK(std::fabs(pa.variance - 0.405) <= 0.001);
    CHECK(pa.method == AggregationMethod::Star);

    const std::vector<HistoricalSource> one{{"x", 2.5, 0.3}};
    const auto p1 = aggregate_star(one, WeightVector::transformed({0.0}), paper);
    CHECK(p1.mean == 2.5);
    CHECK(std::fabs(p1.variance - (0.3 + 1.0 / 999999.0)) < 1e-15);

    const GammaMixtureHyperparams sharp(1.1, 1.1, 1e15, 1.0);
    const std::vector<HistoricalSource> twin{{"a", 1.0, 0.5}, {"b", 1.0, 0.5}};
    const auto p2 = aggregate_star(twin, WeightVector::transformed({0.0, 0.0}), sharp);
    CHECK(std::fabs(p2.mean - 1.0) < 1e-15);
    CHECK(std::fabs(p2.variance - 0.25) < 1e-12);

    CHECK_THROWS_AS(aggregate_star({}, WeightVector::transformed({}), paper), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_star(twin, WeightVector::transformed({0.0}), paper), std::invalid_argument);
}

TEST_CASE("star aggregation records raw scale and degenerate sources") {
    const std::vector<HistoricalSource> s{{"tiny", 1.0, 1e-13}, {"ok", 0.0, 1.0}};
    const auto p = aggregate_star(s, WeightVector::raw({0.5, 0.5}), GammaMixtureHyperparams{});
    CHECK(p.weight_scale == WeightScale::Raw);
    REQUIRE(p.degenerate_sources.size() == 1);
    CHECK(p.degenerate_sources[0] == "tiny");
}

TEST_CASE("star aggregation properties") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_sources(gen, 2 + trial % 6);
        std::vector<double> w(s.size());
        for (auto& x : w) x = u(gen);
        const GammaMixtureHyperparams h;
        const auto p = aggregate_star(s, WeightVector::transformed(w), h);

        CHECK(std::fabs(sum(p.synthesis_weights) - 1.0) <= 1e-12);
        for (double x : p.synthesis_weights) CHECK((x >= 0.0 && x <= 1.0));
        CHECK(p.variance > 0.0);
        CHECK(p.precision() == doctest::Approx(star_precision(s, w, h)).epsilon(1e-15));

        // additivity over a split of the sources
        const std::size_t cut = s.size() / 2;
        const std::vector<HistoricalSource> s1(s.begin(), s.begin() + cut), s2(s.begin() + cut, s.end());
        const std::vector<double> w1(w.begin(), w.begin() + cut), w2(w.begin() + cut, w.end());
        const double whole = star_precision(s, w, h);
        const double parts = star_precision(s1, w1, h) + star_precision(s2, w2, h);
        CHECK(std::fabs(whole - parts) <= 4 * s.size() * std::numeric_limits<double>::epsilon() * whole);

        // permutation
        std::vector<std::size_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<HistoricalSource> sp;
        std::vector<double> wp;
        for (auto i : perm) {
            sp.push_back(s[i]);
            wp.push_back(w[i]);
        }
        const auto pp = aggregate_star(sp, WeightVector::transformed(wp), h);
        CHECK(pp.mean == doctest::Approx(p.mean).epsilon(1e-12));
        CHECK(pp.variance == doctest::Approx(p.variance).epsilon(1e-12));
        for (std::size_t k = 0; k < perm.size(); ++k) {
            CHECK(pp.synthesis_weights[k] == doctest::Approx(p.synthesis_weights[perm[k]]).epsilon(1e-12));
        }
    }
}

TEST_CASE("star precision strictly decreasing in each weight") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = random_sources(gen, 3);
        const GammaMixtureHyperparams h;
        for (std::size_t q = 0; q < s.size(); ++q) {
            std::vector<double> w{0.3, 0.6, 0.9};
            w[q] = 0.0;
            double prev = star_precision(s, w, h);
            for (int k = 1; k <= 50; ++k) {
                w[q] = k / 50.0;
                const double p = star_precision(s, w, h);
                CHECK(p < prev);
                prev = p;
            }
        }
    }
}

TEST_CASE("star with zero weights is fixed-effect pooling") {
    const GammaMixtureHyperparams sharp(1.1, 1.1, 1e300, 1.0);
    const std::vector<HistoricalSource> s{{"a", 1.0, 0.5}, {"b", 3.0, 2.0}, {"c", -1.0, 1.0}};
    const auto p = aggregate_star(s, WeightVector::transformed({0, 0, 0}), sharp);
    const double prec = 1 / 0.5 + 1 / 2.0 + 1 / 1.0;
    CHECK(p.precision() == doctest::Approx(prec).epsilon(1e-14));
    CHECK(p.mean == doctest::Approx((1.0 / 0.5 + 3.0 / 2.0 - 1.0 / 1.0) / prec).epsilon(1e-14));
}

TEST_CASE("legacy synthesis weights") {
    const auto eq = synthesis_weights_legacy(WeightVector::raw({0.3, 0.3, 0.3}), 0.05);
    for (double p : eq) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(synthesis_weights_legacy(WeightVector::raw({0.77}), 0.05)[0] == 1.0);

    const auto p = synthesis_weights_legacy(WeightVector::raw({0.0, 1.0}), 0.05);
    const double e = std::exp(-20.0) / (1.0 + std::exp(-20.0));
    CHECK(std::fabs(p[1] - 2.06e-9) < 0.01e-9);
    CHECK(p[1] == doctest::Approx(e).epsilon(1e-13));
    CHECK(std::fabs(p[0] - (1.0 - e)) <= std::numeric_limits<double>::epsilon());
    CHECK(std::fabs(sum(p) - 1.0) <= 1e-12);

    CHECK_THROWS_AS(synthesis_weights_legacy(WeightVector::raw({0.1}), 0.0), std::domain_error);
    CHECK_THROWS_AS(synthesis_weights_legacy(WeightVector::raw({0.1}), -1.0), std::domain_error);
}

TEST_CASE("legacy aggregation examples") {
    const std::vector<HistoricalSource> s{{"1", 1.0, 0.1}, {"2", 0.0, 0.1}};
    const auto p00 = aggregate_legacy(s, WeightVector::raw({0.0, 0.0}), kFig1);
    CHECK(std::fabs(p00.mean - 0.5) < 1e-15);
    CHECK(std::fabs(p00.variance - 0.0500005) < 1e-6);
    CHECK(p00.method == AggregationMethod::Legacy);

    const auto p10 = aggregate_legacy(s, WeightVector::raw({1.0, 0.0}), kFig1);
    CHECK(std::fabs(p10.variance - 0.1) < 1e-3);
    CHECK(std::fabs(p10.precision() - 10.0) < 0.01);

    const std::vector<HistoricalSource> one{{"1", 0.7, 0.4}};
    const auto p1 = aggregate_legacy(one, WeightVector::raw({0.6}), kFig1);
    CHECK(p1.mean == 0.7);
    CHECK(p1.variance == doctest::Approx(commensurate_variance(one[0], 0.6, kFig1)).epsilon(1e-15));
}

TEST_CASE("legacy precision is not monotone on the two-source example") {
    const std::vector<HistoricalSource> s{{"1", 1.0, 0.1}, {"2", 0.0, 0.1}};
    const double at_1_0 = aggregate_legacy(s, WeightVector::raw({1.0, 0.0}), kFig1).precision();
    const double at_03_0 = aggregate_legacy(s, WeightVector::raw({0.3, 0.0}), kFig1).precision();
    CHECK(at_1_0 > at_03_0);
    CHECK(at_1_0 == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(at_03_0 == doctest::Approx(7.04).epsilon(2e-3));
}

TEST_CASE("legacy without c0 uses the default concentration") {
    const GammaMixtureHyperparams no_c0(1.1, 1.1, 1e6, 1.0, std::nullopt);
    const std::vector<HistoricalSource> s{{"1", 1.0, 0.1}, {"2", 0.0, 0.1}};
    const auto a = aggregate_legacy(s, WeightVector::raw({0.3, 0.0}), no_c0);
    const auto b = aggregate_legacy(s, WeightVector::raw({0.3, 0.0}), kFig1);
    CHECK(a.variance == b.variance);
}
