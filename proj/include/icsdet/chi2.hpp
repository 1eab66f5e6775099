#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "icsdet/types.hpp"

// ============================================================================
// Noncentral chi-squared distribution kernel.
//
// Everything here works with the survival function Q(tau; p, lambda) of a
// chi-squared variable with p degrees of freedom and noncentrality lambda:
// the probability that the variable exceeds tau. Detector operating points,
// threshold calibration, and attack-energy budgets are all expressed through
// Q and its inverses in tau and lambda.
// ============================================================================

namespace icsdet::chi2 {

/// Degrees of freedom and noncentrality of a chi-squared statistic.
struct Params {
    int degrees = 1;          // p >= 1
    double noncentrality = 0; // lambda >= 0
};

namespace detail {

inline constexpr int kMaxGammaIter = 2'000'000;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

/// Regularized lower incomplete gamma P(a, x) by power series. Valid for
/// x < a + 1 where the series converges quickly.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < kMaxGammaIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericalError("chi2: incomplete gamma series did not converge");
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction
/// (modified Lentz). Valid for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxGammaIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NumericalError("chi2: incomplete gamma continued fraction did not converge");
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double reg_gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        throw ValidationError("chi2: incomplete gamma requires a > 0, x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

inline void check(const Params& params) {
    if (params.degrees < 1) {
        throw ValidationError("chi2: degrees of freedom must be >= 1");
    }
    if (!(params.noncentrality >= 0.0) || !std::isfinite(params.noncentrality)) {
        throw ValidationError("chi2: noncentrality must be finite and >= 0");
    }
}

}  // namespace detail

/// Survival function Q(tau; p, lambda) = Pr[X > tau].
///
/// The noncentral case is a Poisson(lambda/2) mixture of central chi-squared
/// survival values. The mixture is summed outward from the Poisson mode so
/// that large noncentralities do not underflow, and truncated once the
/// unexplored Poisson mass drops below 1e-14.
inline double q_survival(double tau, const Params& params) {
    detail::check(params);
    if (!std::isfinite(tau)) throw ValidationError("chi2: tau must be finite");
    if (tau <= 0.0) return 1.0;

    const double a0 = params.degrees / 2.0;
    const double x = tau / 2.0;
    const double h = params.noncentrality / 2.0;
    if (h == 0.0) return detail::reg_gamma_q(a0, x);

    // Central survival values S_j = Q(a0 + j, x) obey S_{j+1} = S_j + t_j with
    // t_j = x^(a0+j) e^{-x} / Gamma(a0+j+1); Poisson weights w_j step by
    // factors of h/j. Both recurrences are anchored at the Poisson mode.
    const auto j0 = static_cast<long long>(std::floor(h));
    const double lw0 = -h + j0 * std::log(h) - std::lgamma(static_cast<double>(j0) + 1.0);
    const double w0 = std::exp(lw0);
    const double s0 = detail::reg_gamma_q(a0 + static_cast<double>(j0), x);
    const double lt0 =
        (a0 + static_cast<double>(j0)) * std::log(x) - x - std::lgamma(a0 + static_cast<double>(j0) + 1.0);
    const double t0 = std::exp(lt0);

    constexpr double kMassTol = 1e-14;
    double acc = w0 * s0;
    double mass = w0;

    // Downward sweep j0-1, j0-2, ..., 0. Bounded by the mode index, so it
    // always runs to completion and accounts for the whole lower tail.
    {
        double w = w0;
        double s = s0;
        double t = t0;
        for (long long j = j0; j-- > 0;) {
            w *= static_cast<double>(j + 1) / h;
            t *= (a0 + static_cast<double>(j + 1)) / x;
            s -= t;
            if (s < 0.0) s = 0.0;
            acc += w * s;
            mass += w;
        }
    }
    // Upward sweep j0+1, j0+2, ...
    {
        double w = w0;
        double s = s0;
        double t = t0;
        for (long long j = j0 + 1; ; ++j) {
            w *= h / static_cast<double>(j);
            s += t;  // t holds the increment from S_{j-1} to S_j
            if (s > 1.0) s = 1.0;
            acc += w * s;
            mass += w;
            t *= x / (a0 + static_cast<double>(j));
            if (1.0 - mass < kMassTol) break;
            // Past the mode the weights decay geometrically with ratio
            // r = h/(j+1), so the unexplored mass is at most w*r/(1-r). The
            // direct 1 - mass test alone can stall on accumulated rounding.
            const double r = h / static_cast<double>(j + 1);
            if (r < 1.0 && w * r / (1.0 - r) < kMassTol) break;
            if (j - j0 > detail::kMaxGammaIter) {
                throw NumericalError("chi2: Poisson mixture did not reach mass tolerance");
            }
        }
    }
    return std::clamp(acc, 0.0, 1.0);
}

/// Threshold tau with Q(tau; p, 0) = alpha, i.e. the detector threshold whose
/// central false-alarm probability equals alpha. Bracketing bisection.
inline double q_inverse_tau(double alpha, int degrees) {
    detail::check({degrees, 0.0});
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ValidationError("chi2: false-alarm level must lie strictly in (0, 1)");
    }
    const Params central{degrees, 0.0};
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * degrees);
    while (q_survival(hi, central) > alpha) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("chi2: threshold bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (q_survival(mid, central) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Noncentrality lambda with Q(tau; p, lambda) = delta for fixed tau, i.e.
/// the attack energy that produces detection probability delta. Throws
/// InfeasibleError when delta is below the lambda = 0 floor Q(tau; p, 0).
inline double q_inverse_lambda(double delta, int degrees, double tau) {
    detail::check({degrees, 0.0});
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ValidationError("chi2: detection level must lie strictly in (0, 1)");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ValidationError("chi2: tau must be finite and >= 0");
    }
    const double floor = q_survival(tau, {degrees, 0.0});
    if (delta <= floor) {
        if (delta >= floor - 1e-12) return 0.0;
        throw InfeasibleError(
            "chi2: requested detection probability lies below the zero-attack floor");
    }
    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * (tau + degrees));
    while (q_survival(tau, {degrees, hi}) < delta) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("chi2: noncentrality bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (q_survival(tau, {degrees, mid}) < delta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Concentration thresholds for the statistic at exponent x: the upper bound
/// mu + sigma*sqrt(2x) + 2x and lower bound mu - sigma*sqrt(2x), each crossed
/// with probability at most e^{-x}. Here mu = p + lambda and
/// sigma = sqrt(2(p + 2*lambda)).
struct TailThresholds {
    double upper = 0;
    double lower = 0;
};

inline TailThresholds tail_bounds(const Params& params, double x) {
    detail::check(params);
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ValidationError("chi2: tail exponent must be finite and >= 0");
    }
    const double mu = params.degrees + params.noncentrality;
    const double sigma = std::sqrt(2.0 * (params.degrees + 2.0 * params.noncentrality));
    const double root = std::sqrt(2.0 * x);
    return {mu + sigma * root + 2.0 * x, mu - sigma * root};
}

/// Draw chi-squared samples by construction: (Z_1 + sqrt(lambda))^2 plus
/// p - 1 further squared standard normals. Deterministic for a fixed seed.
inline std::vector<double> sample(const Params& params, std::size_t count, std::uint64_t seed) {
    detail::check(params);
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double shift = std::sqrt(params.noncentrality);
    std::vector<double> out(count);
    for (auto& value : out) {
        const double first = normal(engine) + shift;
        double sum = first * first;
        for (int i = 1; i < params.degrees; ++i) {
            const double z = normal(engine);
            sum += z * z;
        }
        value = sum;
    }
    return out;
}

}  // namespace icsdet::chi2
