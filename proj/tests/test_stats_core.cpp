#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "cssd/stats_core.hpp"
#include "oracle.hpp"

using namespace cssd;

TEST_CASE("probability range") {
    CHECK(Probability(0.0).value() == 0.0);
    CHECK(Probability(1.0).value() == 1.0);
    CHECK_THROWS_AS(Probability(-1e-12), std::domain_error);
    CHECK_THROWS_AS(Probability(1.0000001), std::domain_error);
    CHECK_THROWS_AS(Probability(std::nan("")), std::domain_error);
}

TEST_CASE("normal cdf examples") {
    CHECK(std_normal_cdf(0.0).value() == 0.5);
    CHECK(std::fabs(std_normal_cdf(1.644854) - 0.95) < 1e-6);
    CHECK(std_normal_cdf(-1e9).value() == doctest::Approx(0.0));
    CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::invalid_argument);
}

TEST_CASE("normal cdf agrees with series oracle") {
    for (double x = -8.0; x <= 8.0; x += 0.0625) {
        const double ref = static_cast<double>(oracle::cdf(x));
        CHECK(std::fabs(std_normal_cdf(x) - ref) <= 1e-15 + 1e-13 * ref);
    }
}

TEST_CASE("normal cdf symmetry and monotonicity") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(gen);
        CHECK(std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) <= 1e-15);
    }
    double prev = 0.0;
    for (double x = -12.0; x <= 12.0; x += 0.001) {
        const double c = std_normal_cdf(x);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("normal quantile examples") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK(std::fabs(std_normal_quantile(0.95) - 1.644854) < 1e-6);
    CHECK(std::fabs(std_normal_quantile(0.80) - 0.841621) < 1e-6);
    CHECK(std::fabs(std_normal_quantile(0.95) - static_cast<double>(oracle::quantile(0.95L))) < 1e-13);
    CHECK(std::fabs(std_normal_quantile(0.80) - static_cast<double>(oracle::quantile(0.80L))) < 1e-13);
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("cdf of quantile round trip") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double p = u(gen);
        if (p <= 0.0) continue;
        CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-12);
    }
    for (double p : {1e-12, 1e-10, 1e-6, 0.001, 0.025, 0.5 + 1e-9, 0.975, 0.999, 1 - 1e-6, 1 - 1e-10, 1 - 1e-12}) {
        CAPTURE(p);
        CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-12);
    }
}

TEST_CASE("quantile matches bisection oracle across the range") {
    for (double p = 0.001; p < 1.0; p += 0.00731) {
        const double ref = static_cast<double>(oracle::quantile(p));
        CAPTURE(p);
        CHECK(std::fabs(std_normal_quantile(p) - ref) <= 1e-12 * std::fmax(1.0, std::fabs(ref)));
    }
}

TEST_CASE("hyperparameter validation") {
    GammaMixtureHyperparams def;
    CHECK(def.a01() == 1.01);
    CHECK(def.b01() == 1.01);
    CHECK(def.a02() == 1e6);
    CHECK(def.b02() == 1.0);
    REQUIRE(def.c0().has_value());
    CHECK(*def.c0() == 0.05);

    CHECK_THROWS_AS(GammaMixtureHyperparams(1.0, 1.0, 1e6, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaMixtureHyperparams(1.1, 0.0, 1e6, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaMixtureHyperparams(1.1, 1.1, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaMixtureHyperparams(1.1, 1.1, 1e6, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaMixtureHyperparams(1.1, 1.1, 1e6, 1.0, -0.05), std::invalid_argument);
    // discount variance must exceed borrow variance
    CHECK_THROWS_AS(GammaMixtureHyperparams(2.0, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GammaMixtureHyperparams(3.0, 1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(GammaMixtureHyperparams(1.1, 1.1, 1e6, 1.0, std::nullopt));
}

TEST_CASE("inverse gamma mixture mean examples") {
    const GammaMixtureHyperparams h(1.1, 1.1, 1e6, 1.0);
    CHECK(inverse_gamma_mixture_mean(0.0, h) == doctest::Approx(1.0 / 999999.0).epsilon(1e-15));
    CHECK(std::fabs(inverse_gamma_mixture_mean(0.0, h) - 1e-6) < 1e-11);
    CHECK(std::fabs(inverse_gamma_mixture_mean(1.0, h) - 11.0) < 1e-12);
    CHECK(std::fabs(inverse_gamma_mixture_mean(0.5, h) - 5.5000005) < 1e-9);
    CHECK_THROWS_AS(inverse_gamma_mixture_mean(-0.01, h), std::domain_error);
    CHECK_THROWS_AS(inverse_gamma_mixture_mean(1.01, h), std::domain_error);
}

TEST_CASE("inverse gamma mixture mean is affine and increasing") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> a(1.001, 3.0), b(0.01, 5.0);
    for (int i = 0; i < 200; ++i) {
        const GammaMixtureHyperparams h(a(gen), b(gen) * 10.0, 1e6, b(gen));
        const double step = 0.1;
        for (int k = 0; k + 2 <= 10; ++k) {
            const double f0 = inverse_gamma_mixture_mean(k * step, h);
            const double f1 = inverse_gamma_mixture_mean((k + 1) * step, h);
            const double f2 = inverse_gamma_mixture_mean((k + 2) * step, h);
            CHECK(f1 > f0);
            CHECK(std::fabs(f2 - 2 * f1 + f0) <= 8 * std::numeric_limits<double>::epsilon() * f2);
        }
    }
}
