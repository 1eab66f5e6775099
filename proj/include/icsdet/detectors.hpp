#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "icsdet/chi2.hpp"
#include "icsdet/comparison.hpp"
#include "icsdet/stacking.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Detector calibration and closed-form performance.
//
// Each detector compares the quadratic statistic of its projected
// measurement against a threshold (ties alarm). Under no attack the
// statistic is central chi-squared with q degrees of freedom; under a
// stacked attack U it is noncentral with lambda = U^T info U. False-alarm
// and detection probabilities therefore come straight from the chi-squared
// survival function.
// ============================================================================

namespace icsdet {

/// Threshold whose no-attack alarm probability equals `false_alarm`.
inline double calibrate_threshold(Index residual_dim, double false_alarm) {
    return chi2::q_inverse_tau(false_alarm, static_cast<int>(residual_dim));
}

/// Closed-form operating characteristics of one detector at one threshold.
struct DetectorPerformance {
    Index residual_dim = 0;
    double threshold = 0;
    double false_alarm = 0;
    double noncentrality = 0;
    double detection = 0;
};

inline DetectorPerformance evaluate_detector(const ProcessedStats& stats, double threshold,
                                             const Vector& attack) {
    DetectorPerformance out;
    out.residual_dim = stats.residual_dim;
    out.threshold = threshold;
    out.noncentrality = stats.noncentrality(attack);
    if (std::isinf(threshold) && threshold > 0) {
        // A disabled detector (zero false-alarm share) never fires.
        return out;
    }
    const int dof = static_cast<int>(stats.residual_dim);
    out.false_alarm = chi2::q_survival(threshold, {dof, 0.0});
    out.detection = chi2::q_survival(threshold, {dof, out.noncentrality});
    return out;
}

/// The full projection bank of a model: the centralized detector and every
/// local detector that is not blind, with thresholds meeting a common
/// network false-alarm level in both architectures.
struct DetectorBank {
    Index horizon = 0;
    double network_false_alarm = 0;
    ProcessedStats central;
    double central_threshold = 0;
    std::vector<int> local_positions;          // non-blind, ascending
    std::vector<ProcessedStats> locals;        // aligned with local_positions
    std::vector<double> local_thresholds;      // aligned with local_positions
    std::vector<Matrix> local_attack_selectors;  // slice global U to each local
    std::vector<int> blind_positions;          // excluded from fusion
};

/// Build the bank: project centrally and locally, drop blind locals, and
/// split the network false alarm across the remaining ones (equal shares by
/// default, or proportional to `weights` given per subsystem position).
inline DetectorBank build_bank(const InterconnectedModel& model, Index T,
                               double network_false_alarm,
                               const std::vector<double>& weights = {}) {
    if (!weights.empty() && static_cast<int>(weights.size()) != model.count()) {
        throw ValidationError("detectors: need one weight per subsystem");
    }
    DetectorBank bank;
    bank.horizon = T;
    bank.network_false_alarm = network_false_alarm;
    bank.central = process_global(model, T);
    bank.central_threshold =
        calibrate_threshold(bank.central.residual_dim, network_false_alarm);

    std::vector<double> kept_weights;
    for (int k = 0; k < model.count(); ++k) {
        try {
            ProcessedStats stats = process_local(model, k, T);
            bank.local_positions.push_back(k);
            bank.locals.push_back(std::move(stats));
            bank.local_attack_selectors.push_back(attack_selector(model, k, T));
            kept_weights.push_back(weights.empty() ? 1.0 : weights[k]);
        } catch (const BlindDetectorError&) {
            bank.blind_positions.push_back(k);
        }
    }
    if (bank.locals.empty()) {
        throw InfeasibleError("detectors: every local detector is blind");
    }
    const auto alloc = allocate_false_alarm(
        network_false_alarm, static_cast<int>(bank.locals.size()), kept_weights);
    for (std::size_t i = 0; i < bank.locals.size(); ++i) {
        // A zero weight allocates no false-alarm budget: that detector is
        // disabled with an infinite threshold.
        bank.local_thresholds.push_back(
            alloc[i] == 0.0 ? std::numeric_limits<double>::infinity()
                            : calibrate_threshold(bank.locals[i].residual_dim, alloc[i]));
    }
    return bank;
}

/// Closed-form performance of the whole bank under one stacked attack.
struct NetworkAnalysis {
    DetectorPerformance central;
    std::vector<int> local_positions;
    std::vector<DetectorPerformance> locals;
    std::vector<int> blind_positions;
    double fused_false_alarm = 0;
    double fused_detection = 0;
    double fused_detection_bound = 0;  // closed-form cap on fused_detection
};

inline NetworkAnalysis analyze_bank(const DetectorBank& bank, const Vector& attack) {
    if (attack.size() != bank.central.info.rows()) {
        throw ValidationError("detectors: attack input has wrong length");
    }
    NetworkAnalysis out;
    out.central = evaluate_detector(bank.central, bank.central_threshold, attack);
    out.local_positions = bank.local_positions;
    out.blind_positions = bank.blind_positions;
    std::vector<double> pf;
    std::vector<double> pd;
    std::vector<int> dofs;
    std::vector<double> lambdas;
    std::vector<double> taus;
    for (std::size_t i = 0; i < bank.locals.size(); ++i) {
        const Vector slice = bank.local_attack_selectors[i] * attack;
        out.locals.push_back(
            evaluate_detector(bank.locals[i], bank.local_thresholds[i], slice));
        pf.push_back(out.locals.back().false_alarm);
        pd.push_back(out.locals.back().detection);
        dofs.push_back(static_cast<int>(out.locals.back().residual_dim));
        lambdas.push_back(out.locals.back().noncentrality);
        taus.push_back(out.locals.back().threshold);
    }
    out.fused_false_alarm = fused_probability(pf);
    out.fused_detection = fused_probability(pd);
    out.fused_detection_bound = fused_detection_upper_bound(dofs, lambdas, taus);
    return out;
}

/// Convenience wrapper: build the bank and analyze one attack in one call.
inline NetworkAnalysis analyze_network(const InterconnectedModel& model, Index T,
                                       double network_false_alarm, const Vector& attack,
                                       const std::vector<double>& weights = {}) {
    return analyze_bank(build_bank(model, T, network_false_alarm, weights), attack);
}

/// Head-to-head verdict between the two architectures for one analysis:
/// exact winner by detection probability plus both sufficient threshold
/// conditions for architecture dominance.
struct ComparisonVerdict {
    double pd_central = 0;
    double pd_decentralized = 0;
    char winner = 't';  // 'c', 'd', or 't' for a tie
    DominanceResult centralized;
    DominanceResult decentralized;
};

inline ComparisonVerdict compare_architectures(const NetworkAnalysis& analysis) {
    if (analysis.locals.empty()) {
        throw ValidationError("detectors: verdict needs at least one local detector");
    }
    ComparisonVerdict out;
    out.pd_central = analysis.central.detection;
    out.pd_decentralized = analysis.fused_detection;
    if (std::abs(out.pd_central - out.pd_decentralized) <= 1e-12) {
        out.winner = 't';
    } else {
        out.winner = out.pd_central > out.pd_decentralized ? 'c' : 'd';
    }
    double pd_min = analysis.locals[0].detection;
    double pd_max = pd_min;
    for (const auto& local : analysis.locals) {
        pd_min = std::min(pd_min, local.detection);
        pd_max = std::max(pd_max, local.detection);
    }
    const int count = static_cast<int>(analysis.locals.size());
    const int dof_c = static_cast<int>(analysis.central.residual_dim);
    out.centralized = centralized_dominance(dof_c, analysis.central.noncentrality,
                                            analysis.central.threshold, count, pd_max);
    out.decentralized = decentralized_dominance(dof_c, analysis.central.noncentrality,
                                                analysis.central.threshold, count, pd_min);
    return out;
}

}  // namespace icsdet
