#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "icsdet/chi2.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Architecture comparison.
//
// A bank of independent local detectors raises a network alarm when any
// member fires, so network-level probabilities compose as
//   P = 1 - prod_i (1 - P_i).
// The dominance conditions below decide, from closed-form threshold bounds
// alone, when the centralized detector provably beats the fused bank and
// vice versa. Everything here works on (dof, noncentrality, threshold)
// triples; no system matrices are involved.
// ============================================================================

namespace icsdet {

/// Network-level probability of a bank of independent detectors.
inline double fused_probability(const std::vector<double>& locals) {
    if (locals.empty()) {
        throw ValidationError("comparison: fused probability needs at least one detector");
    }
    double miss = 1.0;
    for (double p : locals) {
        if (!(p >= 0.0) || !(p <= 1.0)) {
            throw ValidationError("comparison: probabilities must lie in [0, 1]");
        }
        miss *= 1.0 - p;
    }
    return 1.0 - miss;
}

/// Split a network false-alarm level across detectors so the fused value is
/// met exactly: P_i = 1 - (1 - P)^(w_i / sum w). Empty weights mean equal
/// shares. Weights must be nonnegative with a positive sum.
inline std::vector<double> allocate_false_alarm(double network, int count,
                                                std::vector<double> weights = {}) {
    if (!(network > 0.0) || !(network < 1.0)) {
        throw ValidationError("comparison: network false alarm must lie strictly in (0, 1)");
    }
    if (count < 1) throw ValidationError("comparison: detector count must be >= 1");
    if (weights.empty()) weights.assign(static_cast<std::size_t>(count), 1.0);
    if (static_cast<int>(weights.size()) != count) {
        throw ValidationError("comparison: weight count does not match detector count");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ValidationError("comparison: weights must be finite and nonnegative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InfeasibleError("comparison: allocation weights must not all be zero");
    }
    std::vector<double> out(weights.size());
    const double log_miss = std::log1p(-network);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = -std::expm1(weights[i] / total * log_miss);
    }
    return out;
}

/// Outcome of a dominance test. When `reason` is nonempty the inputs were
/// degenerate (a log diverged) and `holds` is reported false.
struct DominanceResult {
    bool holds = false;
    double threshold_bound = std::numeric_limits<double>::quiet_NaN();
    std::string reason;
};

namespace detail {

inline void check_dominance_inputs(int dof, double lambda, double tau, int count,
                                   double pd, const char* pd_name) {
    if (dof < 1) throw ValidationError("comparison: dof must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("comparison: noncentrality must be finite and >= 0");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ValidationError("comparison: threshold must be finite and >= 0");
    }
    if (count < 1) throw ValidationError("comparison: detector count must be >= 1");
    if (!(pd >= 0.0) || !(pd <= 1.0)) {
        throw ValidationError(std::string("comparison: ") + pd_name +
                              " must lie in [0, 1]");
    }
}

/// Both algebraic arrangements of the same bound must agree; a mismatch
/// means the implementation, not the input, is broken.
inline void check_forms(double a, double b) {
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
        throw NumericalError("comparison: dominance bound forms disagree");
    }
}

}  // namespace detail

/// Sufficient condition for the centralized detector to dominate: with
/// mu = p_c + lambda_c and sigma = sqrt(2 (p_c + 2 lambda_c)), the fused
/// bank of `count` detectors whose best member detects with probability at
/// most pd_max is beaten whenever
///   tau_c <= mu - sigma * sqrt(2 count * ln(1 / (1 - pd_max))).
inline DominanceResult centralized_dominance(int dof_c, double lambda_c, double tau_c,
                                             int count, double pd_max) {
    detail::check_dominance_inputs(dof_c, lambda_c, tau_c, count, pd_max, "pd_max");
    DominanceResult out;
    if (pd_max >= 1.0) {
        out.reason = "detection_cap_at_one";
        return out;
    }
    const double mu = dof_c + lambda_c;
    const double sigma = std::sqrt(2.0 * (dof_c + 2.0 * lambda_c));
    const double log_term = -std::log1p(-pd_max);  // ln(1 / (1 - pd_max))
    const double kappa = std::sqrt(2.0 * count * log_term);
    const double bound = mu - sigma * kappa;
    const double direct = mu - std::sqrt(4.0 * count * (dof_c + 2.0 * lambda_c) * log_term);
    detail::check_forms(bound, direct);
    out.threshold_bound = bound;
    out.holds = tau_c <= bound;
    return out;
}

/// Sufficient condition for the fused bank to dominate: with the same mu and
/// sigma, a bank whose weakest member detects with probability at least
/// pd_min beats the centralized detector whenever
///   tau_c >= mu + sigma * kappa + kappa^2,
///   kappa = sqrt(2 ln(1 / (1 - (1 - pd_min)^count))).
inline DominanceResult decentralized_dominance(int dof_c, double lambda_c, double tau_c,
                                               int count, double pd_min) {
    detail::check_dominance_inputs(dof_c, lambda_c, tau_c, count, pd_min, "pd_min");
    DominanceResult out;
    if (pd_min <= 0.0) {
        out.reason = "detection_floor_at_zero";
        return out;
    }
    const double mu = dof_c + lambda_c;
    const double sigma = std::sqrt(2.0 * (dof_c + 2.0 * lambda_c));
    // Fused detection floor 1 - (1 - pd_min)^count, computed through logs.
    const double fused = -std::expm1(static_cast<double>(count) * std::log1p(-pd_min));
    // Exceedance budget x chosen so exp(-x) equals the fused floor: the upper
    // tail bound at mu + sigma*sqrt(2x) + 2x then caps the centralized
    // detection probability by the floor, which any bank attains or beats.
    const double log_term = -std::log(fused);
    const double kappa = std::sqrt(2.0 * log_term);
    const double bound = mu + sigma * kappa + kappa * kappa;
    const double direct =
        mu + std::sqrt(4.0 * (dof_c + 2.0 * lambda_c) * log_term) + 2.0 * log_term;
    detail::check_forms(bound, direct);
    out.threshold_bound = bound;
    out.holds = tau_c >= bound;
    return out;
}

/// Closed-form upper bound on the fused detection probability of a bank:
/// Q(min_i tau_i; sum_i p_i, sum_i lambda_i).
inline double fused_detection_upper_bound(const std::vector<int>& dofs,
                                          const std::vector<double>& lambdas,
                                          const std::vector<double>& taus) {
    if (dofs.empty() || dofs.size() != lambdas.size() || dofs.size() != taus.size()) {
        throw ValidationError("comparison: bound inputs must be equal-length and nonempty");
    }
    int dof_sum = 0;
    double lambda_sum = 0.0;
    double tau_min = taus[0];
    for (std::size_t i = 0; i < dofs.size(); ++i) {
        if (dofs[i] < 1) throw ValidationError("comparison: dof must be >= 1");
        dof_sum += dofs[i];
        lambda_sum += lambdas[i];
        tau_min = std::min(tau_min, taus[i]);
    }
    return chi2::q_survival(tau_min, {dof_sum, lambda_sum});
}

/// One cell of a region sweep.
struct RegionPoint {
    double lambda_i = 0;
    double lambda_c = 0;
    double pd_c = 0;
    double pd_d = 0;
    bool centralized_sufficient = false;
    bool decentralized_sufficient = false;
    char winner = 't';  // 'c', 'd', or 't' for a tie
};

struct RegionMap {
    int dof_local = 0;
    int dof_central = 0;
    int count = 0;
    double network_false_alarm = 0;
    double tau_central = 0;
    double tau_local = 0;
    std::vector<RegionPoint> points;  // row-major over (lambda_i, lambda_c)
};

/// Sweep detection performance over a grid of local and centralized
/// noncentralities for a symmetric network of `count` identical local
/// detectors, both architectures calibrated to the same network false alarm.
inline RegionMap sweep_region(int dof_local, int dof_central, int count,
                              double network_false_alarm,
                              const std::vector<double>& lambda_local_grid,
                              const std::vector<double>& lambda_central_grid) {
    if (lambda_local_grid.empty() || lambda_central_grid.empty()) {
        throw ValidationError("comparison: sweep grids must be nonempty");
    }
    RegionMap map;
    map.dof_local = dof_local;
    map.dof_central = dof_central;
    map.count = count;
    map.network_false_alarm = network_false_alarm;
    map.tau_central = chi2::q_inverse_tau(network_false_alarm, dof_central);
    const double pf_local = allocate_false_alarm(network_false_alarm, count)[0];
    map.tau_local = chi2::q_inverse_tau(pf_local, dof_local);
    map.points.reserve(lambda_local_grid.size() * lambda_central_grid.size());
    for (double li : lambda_local_grid) {
        for (double lc : lambda_central_grid) {
            RegionPoint pt;
            pt.lambda_i = li;
            pt.lambda_c = lc;
            pt.pd_c = chi2::q_survival(map.tau_central, {dof_central, lc});
            const double pd_i = chi2::q_survival(map.tau_local, {dof_local, li});
            pt.pd_d = fused_probability(std::vector<double>(count, pd_i));
            pt.centralized_sufficient =
                centralized_dominance(dof_central, lc, map.tau_central, count, pd_i).holds;
            pt.decentralized_sufficient =
                decentralized_dominance(dof_central, lc, map.tau_central, count, pd_i).holds;
            if (std::abs(pt.pd_c - pt.pd_d) <= 1e-12) {
                pt.winner = 't';
            } else {
                pt.winner = pt.pd_c > pt.pd_d ? 'c' : 'd';
            }
            map.points.push_back(pt);
        }
    }
    return map;
}

}  // namespace icsdet
