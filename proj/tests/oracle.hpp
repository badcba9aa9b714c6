#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library; everything is long double and deliberately slow.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

namespace oracle {

using real = long double;

inline constexpr real kPi = 3.141592653589793238462643383279502884L;

inline real density(real x) { return std::exp(-0.5L * x * x) / std::sqrt(2.0L * kPi); }

/// Upper tail Q(x) for x > 0 by the Laplace continued fraction, evaluated
/// bottom-up with a fixed depth.
inline real upper_tail_cf(real x) {
    real t = x;
    for (int k = 300; k >= 1; --k) t = x + static_cast<real>(k) / t;
    return density(x) / t;
}

/// Phi(x) - 1/2 by the power series x phi(x) sum x^{2k} / (2k+1)!!.
inline real half_series(real x) {
    real term = x;
    real sum = x;
    for (int k = 1; k < 400; ++k) {
        term *= x * x / static_cast<real>(2 * k + 1);
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
    }
    return density(x) * sum;
}

inline real cdf(real x) {
    if (x > 3.0L) return 1.0L - upper_tail_cf(x);
    if (x < -3.0L) return upper_tail_cf(-x);
    return 0.5L + half_series(x);
}

/// Bisection on cdf. Decreasing functions are handled by the caller.
inline real bisect(const std::function<real(real)>& f, real lo, real hi, int iterations = 200) {
    real flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const real mid = 0.5L * (lo + hi);
        const real fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5L * (lo + hi);
}

inline real quantile(real p) {
    return bisect([p](real x) { return cdf(x) - p; }, -40.0L, 40.0L);
}

/// Source precision 1 / (tau^2 + w K1 + (1 - w) K2).
inline real source_precision(real w, real tau_sq, real k1, real k2) {
    return 1.0L / (tau_sq + w * k1 + (1.0L - w) * k2);
}

/// Weight with the given source precision, found by bisection on [0, 1].
inline real weight_for_precision(real precision, real tau_sq, real k1, real k2) {
    return bisect([&](real w) { return source_precision(w, tau_sq, k1, k2) - precision; }, 0.0L, 1.0L);
}

/// Linearized weight: the weight whose precision sits a fraction w of the
/// way from the w=0 precision to the w=1 precision.
inline real linearized_weight(real w, real tau_sq, real k1, real k2) {
    const real p0 = source_precision(0, tau_sq, k1, k2);
    const real p1 = source_precision(1, tau_sq, k1, k2);
    return weight_for_precision(p0 + w * (p1 - p0), tau_sq, k1, k2);
}

inline real z_sum_sq(real eta, real zeta, real delta) {
    const real s = quantile(eta) + quantile(zeta);
    return s * s / (delta * delta);
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::fmax(std::fabs(a), std::fabs(b));
}

}  // namespace oracle
