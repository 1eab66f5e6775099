#pragma once

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "icsdet/attack.hpp"
#include "icsdet/comparison.hpp"
#include "icsdet/detectors.hpp"
#include "icsdet/montecarlo.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Report emission. Every JSON document carries a top-level schema_version;
// CSV layouts are fixed and documented next to each writer.
// ============================================================================

namespace icsdet {

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline nlohmann::json performance_to_json(const DetectorPerformance& perf) {
    return {{"residual_dim", perf.residual_dim},
            {"threshold", perf.threshold},
            {"false_alarm", perf.false_alarm},
            {"noncentrality", perf.noncentrality},
            {"detection", perf.detection}};
}

inline nlohmann::json dominance_to_json(const DominanceResult& result) {
    nlohmann::json out{{"holds", result.holds}, {"reason", result.reason}};
    if (std::isfinite(result.threshold_bound)) {
        out["threshold_bound"] = result.threshold_bound;
    }
    return out;
}

inline nlohmann::json summary_to_json(const BinomialSummary& s) {
    return {{"alarms", s.alarms},
            {"trials", s.trials},
            {"frequency", s.frequency},
            {"interval", {s.interval.low, s.interval.high}}};
}

}  // namespace detail

/// Calibration report: thresholds and the false-alarm split of a bank.
inline nlohmann::json calibration_to_json(const DetectorBank& bank) {
    nlohmann::json locals = nlohmann::json::array();
    for (std::size_t i = 0; i < bank.locals.size(); ++i) {
        locals.push_back({{"position", bank.local_positions[i]},
                          {"residual_dim", bank.locals[i].residual_dim},
                          {"threshold", bank.local_thresholds[i]}});
    }
    return {{"schema_version", kReportSchemaVersion},
            {"kind", "calibration"},
            {"horizon", bank.horizon},
            {"network_false_alarm", bank.network_false_alarm},
            {"central",
             {{"residual_dim", bank.central.residual_dim},
              {"threshold", bank.central_threshold}}},
            {"locals", locals},
            {"blind_positions", bank.blind_positions}};
}

/// Analysis report: per-detector operating points, the fusion summary, and
/// the architecture verdict for one attack.
inline nlohmann::json analysis_to_json(const NetworkAnalysis& analysis,
                                       const ComparisonVerdict& verdict) {
    nlohmann::json locals = nlohmann::json::array();
    for (std::size_t i = 0; i < analysis.locals.size(); ++i) {
        nlohmann::json entry = detail::performance_to_json(analysis.locals[i]);
        entry["position"] = analysis.local_positions[i];
        locals.push_back(entry);
    }
    return {{"schema_version", kReportSchemaVersion},
            {"kind", "analysis"},
            {"central", detail::performance_to_json(analysis.central)},
            {"locals", locals},
            {"blind_positions", analysis.blind_positions},
            {"fusion",
             {{"false_alarm", analysis.fused_false_alarm},
              {"detection", analysis.fused_detection},
              {"detection_bound", analysis.fused_detection_bound}}},
            {"verdict",
             {{"winner", std::string(1, verdict.winner)},
              {"pd_central", verdict.pd_central},
              {"pd_decentralized", verdict.pd_decentralized},
              {"centralized_sufficient", detail::dominance_to_json(verdict.centralized)},
              {"decentralized_sufficient",
               detail::dominance_to_json(verdict.decentralized)}}}};
}

/// Attack plan: the stacked input with its optimality certificates.
inline nlohmann::json synthesis_to_json(const AttackSynthesis& plan, double budget,
                                        const std::string& constraint) {
    nlohmann::json out{{"schema_version", kReportSchemaVersion},
                       {"kind", "attack_plan"},
                       {"constraint", constraint},
                       {"budget", budget},
                       {"budget_used", plan.budget_used},
                       {"cost", plan.cost},
                       {"rayleigh_max", plan.rayleigh_max},
                       {"hard_case", plan.hard_case},
                       {"input", detail::vector_to_json(plan.input)}};
    if (std::isfinite(plan.multiplier)) {
        out["multiplier"] = plan.multiplier;
    }
    return out;
}

/// Empirical report from a simulation run.
inline nlohmann::json simulation_to_json(const SimulationResult& result) {
    nlohmann::json locals = nlohmann::json::array();
    for (std::size_t i = 0; i < result.locals.size(); ++i) {
        nlohmann::json entry = detail::summary_to_json(result.locals[i]);
        entry["position"] = result.local_positions[i];
        locals.push_back(entry);
    }
    return {{"schema_version", kReportSchemaVersion},
            {"kind", "empirical"},
            {"central", detail::summary_to_json(result.central)},
            {"locals", locals},
            {"fused", detail::summary_to_json(result.fused)},
            {"no_local_alarm", result.no_local_alarm}};
}

/// Machine-readable error envelope (written to stderr by the CLI).
inline nlohmann::json error_to_json(const std::string& type, const std::string& message) {
    return {{"schema_version", kReportSchemaVersion},
            {"error", {{"type", type}, {"message", message}}}};
}

/// Region sweep as CSV with columns
///   lambda_i,lambda_c,pd_c,pd_d,centralized_sufficient,decentralized_sufficient,winner
/// one row per grid cell, row-major over (lambda_i, lambda_c).
inline void region_to_csv(const RegionMap& map, std::ostream& out) {
    out << std::setprecision(17);
    out << "lambda_i,lambda_c,pd_c,pd_d,centralized_sufficient,decentralized_sufficient,"
           "winner\n";
    for (const auto& pt : map.points) {
        out << pt.lambda_i << ',' << pt.lambda_c << ',' << pt.pd_c << ',' << pt.pd_d << ','
            << (pt.centralized_sufficient ? 1 : 0) << ','
            << (pt.decentralized_sufficient ? 1 : 0) << ',' << pt.winner << '\n';
    }
}

/// Degradation curve as CSV with columns
///   delta,budget_centralized,cost_centralized,budget_decentralized,cost_decentralized
struct DegradationPoint {
    double delta = 0;
    double budget_centralized = 0;
    double cost_centralized = 0;
    double budget_decentralized = 0;
    double cost_decentralized = 0;
};

inline void degradation_to_csv(const std::vector<DegradationPoint>& points,
                               std::ostream& out) {
    out << std::setprecision(17);
    out << "delta,budget_centralized,cost_centralized,budget_decentralized,"
           "cost_decentralized\n";
    for (const auto& pt : points) {
        out << pt.delta << ',' << pt.budget_centralized << ',' << pt.cost_centralized << ','
            << pt.budget_decentralized << ',' << pt.cost_decentralized << '\n';
    }
}

/// Per-trial statistics as CSV: column `central` then one `local_<position>`
/// column per non-blind local detector, one row per trial.
inline void statistics_to_csv(const SimulationResult& result, std::ostream& out) {
    if (result.central_statistics.empty()) {
        throw ValidationError("serialize: simulation was run without statistics collection");
    }
    out << std::setprecision(17);
    out << "central";
    for (const int position : result.local_positions) out << ",local_" << position;
    out << '\n';
    for (std::size_t t = 0; t < result.central_statistics.size(); ++t) {
        out << result.central_statistics[t];
        for (const auto& stats : result.local_statistics) out << ',' << stats[t];
        out << '\n';
    }
}

}  // namespace icsdet
