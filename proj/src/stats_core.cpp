#include "cssd/stats_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cssd {

Probability::Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::domain_error("probability outside [0,1]: " + std::to_string(value));
    }
}

Probability std_normal_cdf(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("std_normal_cdf: non-finite argument");
    }
    return Probability(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

namespace {

// Acklam's rational approximation, relative error ~1.15e-9 before refinement.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                         -2.759285104469687e+02, 1.383577518672690e+02,
                         -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                         -1.556989798598866e+02, 6.680131188771972e+01,
                         -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                         -2.400758277161838e+00, -2.549732539343734e+00,
                         4.374664141464968e+00, 2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01,
                         2.445134137142996e+00, 3.754408661907416e+00};

constexpr double kLow = 0.02425;

double acklam(double p) {
    if (p < kLow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    if (p > 1.0 - kLow) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
           (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
    }
    if (p == 0.5) return 0.0;
    double x = acklam(p);
    // Newton step. In the upper tail work with the complement so the residual
    // is not swamped by cancellation against 1.
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    double residual;  // Phi(x) - p
    if (p > 0.5) {
        residual = (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    } else {
        residual = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    }
    x -= residual / density;
    return x;
}

GammaMixtureHyperparams::GammaMixtureHyperparams()
    : GammaMixtureHyperparams(kDefaultA01, kDefaultB01, kDefaultA02, kDefaultB02, kDefaultC0) {}

GammaMixtureHyperparams::GammaMixtureHyperparams(double a01, double b01, double a02, double b02,
                                                 std::optional<double> c0)
    : a01_(a01), b01_(b01), a02_(a02), b02_(b02), c0_(c0) {
    if (!(a01 > 1.0) || !(a02 > 1.0)) {
        throw std::invalid_argument("Gamma mixture shapes a01, a02 must exceed 1");
    }
    if (!(b01 > 0.0) || !(b02 > 0.0)) {
        throw std::invalid_argument("Gamma mixture rates b01, b02 must be positive");
    }
    if (c0 && !(*c0 > 0.0)) {
        throw std::invalid_argument("concentration c0 must be positive");
    }
    discount_variance_ = b01 / (a01 - 1.0);
    borrow_variance_ = b02 / (a02 - 1.0);
    if (!std::isfinite(discount_variance_) || !std::isfinite(borrow_variance_)) {
        throw std::invalid_argument("Gamma mixture variances must be finite");
    }
    if (!(discount_variance_ > borrow_variance_)) {
        throw std::invalid_argument(
            "b01/(a01-1) must exceed b02/(a02-1): the first component must carry the discounting mass");
    }
}

void require_unit_interval(double w, const char* what) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0,1], got " + std::to_string(w));
    }
}

double inverse_gamma_mixture_mean(double w, const GammaMixtureHyperparams& hyper) {
    require_unit_interval(w, "weight");
    return w * hyper.discount_variance() + (1.0 - w) * hyper.borrow_variance();
}

}  // namespace cssd
