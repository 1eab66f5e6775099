#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "icsdet/types.hpp"

namespace icsdet {

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double low = 0;
    double high = 0;
};

inline WilsonInterval wilson_interval(long long successes, long long trials,
                                      double z = 1.959963984540054) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw ValidationError("stats: invalid binomial counts");
    }
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = phat + z2 / (2.0 * n);
    const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return {(center - spread) / denom, (center + spread) / denom};
}

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
struct KsResult {
    double statistic = 0;
    double p_value = 0;
};

namespace detail {

/// Kolmogorov survival function 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2),
/// evaluated with the usual alternating-series shortcuts.
inline double kolmogorov_survival(double x) {
    const double a2 = -2.0 * x * x;
    double fac = 2.0;
    double sum = 0.0;
    double prev_term = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = fac * std::exp(a2 * j * j);
        sum += term;
        if (std::abs(term) <= 1e-10 * std::abs(sum) ||
            std::abs(term) <= 1e-12 * prev_term) {
            return std::clamp(sum, 0.0, 1.0);
        }
        fac = -fac;
        prev_term = std::abs(term);
    }
    return 1.0;  // x too small for the series; the difference is insignificant
}

}  // namespace detail

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("stats: KS test needs nonempty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < a.size() && ib < b.size()) {
        // Advance past ties on both sides so equal values never contribute.
        const double va = a[ia];
        const double vb = b[ib];
        if (va <= vb) ++ia;
        if (vb <= va) ++ib;
        d = std::max(d, std::abs(ia / na - ib / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    KsResult out;
    out.statistic = d;
    out.p_value = detail::kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return out;
}

}  // namespace icsdet
