#pragma once

#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Cholesky>

#include "icsdet/detectors.hpp"
#include "icsdet/model.hpp"
#include "icsdet/stats.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Monte Carlo cross-validation of the closed-form detector performance.
//
// Each trial rolls the interconnected dynamics forward under Gaussian noise
// (and optionally an attack), projects the stacked measurements exactly as
// the detectors do, and compares the quadratic statistics against the
// calibrated thresholds. Trials draw from counter-based substreams of the
// master seed, so results are reproducible and independent of the thread
// count.
// ============================================================================

namespace icsdet {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for one trial: a hash of (seed, trial) seeds the stream, so any
/// partition of trials across threads draws identical noise.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(trial + 0x51ed270b0a1c67d5ULL)));
}

}  // namespace detail

struct SimulationOptions {
    int trials = 10'000;
    std::uint64_t seed = 0;
    int threads = 1;
    Vector x0;               // empty = zero initial state
    Vector attack;           // stacked attack input; empty = no attack
    bool collect_statistics = false;  // keep per-trial statistics
};

struct BinomialSummary {
    long long alarms = 0;
    long long trials = 0;
    double frequency = 0;
    WilsonInterval interval;
};

struct SimulationResult {
    BinomialSummary central;
    std::vector<int> local_positions;
    std::vector<BinomialSummary> locals;
    BinomialSummary fused;               // any non-blind local alarmed
    long long no_local_alarm = 0;        // trials with a fully silent bank
    std::vector<double> central_statistics;
    std::vector<std::vector<double>> local_statistics;  // per local detector
};

/// Run `options.trials` closed-loop simulations of the model against the
/// prepared detector bank.
inline SimulationResult simulate(const InterconnectedModel& model, const DetectorBank& bank,
                                 const SimulationOptions& options) {
    if (options.trials < 1) throw ValidationError("montecarlo: trials must be >= 1");
    if (options.threads < 1) throw ValidationError("montecarlo: threads must be >= 1");
    const Index T = bank.horizon;
    const Index n = model.state_dim();
    const Index r = model.output_dim();
    const Index mT = model.attack_dim() * T;

    Vector x0 = options.x0;
    if (x0.size() == 0) x0 = Vector::Zero(n);
    if (x0.size() != n) throw ValidationError("montecarlo: x0 has wrong length");
    Vector attack = options.attack;
    if (attack.size() == 0) attack = Vector::Zero(mT);
    if (attack.size() != mT) throw ValidationError("montecarlo: attack has wrong length");

    const Matrix A = model.global_A();
    const Matrix C = model.global_C();
    const Matrix B_a = model.global_B_attack();
    // Noise shaping factored once; per trial only triangular products remain.
    const Eigen::LLT<Matrix> llt_w(model.global_Sigma_w());
    const Eigen::LLT<Matrix> llt_v(model.global_Sigma_v());
    if (llt_w.info() != Eigen::Success || llt_v.info() != Eigen::Success) {
        throw NumericalError("montecarlo: noise covariance factorization failed");
    }
    const Matrix L_w = llt_w.matrixL();
    const Matrix L_v = llt_v.matrixL();

    // Local detectors read their rows of the global stack; folding the
    // selector into the basis makes that a single product per trial.
    const std::size_t n_local = bank.locals.size();
    std::vector<Matrix> local_project(n_local);
    for (std::size_t i = 0; i < n_local; ++i) {
        local_project[i] =
            bank.locals[i].basis * output_selector(model, bank.local_positions[i], T);
    }

    const int threads = std::min(options.threads, options.trials);
    struct Accumulator {
        long long central = 0;
        std::vector<long long> locals;
        long long fused = 0;
        long long silent = 0;
    };
    std::vector<Accumulator> acc(threads);
    std::vector<std::vector<double>> central_stats(threads);
    std::vector<std::vector<std::vector<double>>> local_stats(threads);

    const auto run_chunk = [&](int which, int begin, int end) {
        Accumulator& a = acc[which];
        a.locals.assign(n_local, 0);
        if (options.collect_statistics) {
            central_stats[which].reserve(end - begin);
            local_stats[which].assign(n_local, {});
        }
        Vector x(n), y_all(r * T), z_w(n), z_v(r);
        for (int trial = begin; trial < end; ++trial) {
            auto engine = detail::trial_engine(options.seed, trial);
            // Fresh distribution per trial: the normal generator caches a
            // spare deviate, which must not leak across substreams.
            std::normal_distribution<double> normal(0.0, 1.0);
            x = x0;
            for (Index k = 0; k < T; ++k) {
                for (Index i = 0; i < n; ++i) z_w(i) = normal(engine);
                x = A * x + B_a * attack.segment(k * B_a.cols(), B_a.cols()) +
                    L_w * z_w;
                for (Index i = 0; i < r; ++i) z_v(i) = normal(engine);
                y_all.segment(k * r, r) = C * x + L_v * z_v;
            }
            const double stat_c = bank.central.statistic(bank.central.basis * y_all);
            const bool alarm_c = stat_c >= bank.central_threshold;
            a.central += alarm_c;
            bool any_local = false;
            for (std::size_t i = 0; i < n_local; ++i) {
                const double stat_i = bank.locals[i].statistic(local_project[i] * y_all);
                const bool alarm_i = stat_i >= bank.local_thresholds[i];
                a.locals[i] += alarm_i;
                any_local = any_local || alarm_i;
                if (options.collect_statistics) local_stats[which][i].push_back(stat_i);
            }
            a.fused += any_local;
            a.silent += !any_local;
            if (options.collect_statistics) central_stats[which].push_back(stat_c);
        }
    };

    if (threads == 1) {
        run_chunk(0, 0, options.trials);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (options.trials + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(options.trials, begin + chunk);
            pool.emplace_back(run_chunk, t, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    const auto summarize = [&](long long hits) {
        BinomialSummary s;
        s.alarms = hits;
        s.trials = options.trials;
        s.frequency = static_cast<double>(hits) / options.trials;
        s.interval = wilson_interval(hits, options.trials);
        return s;
    };

    SimulationResult out;
    long long central = 0;
    long long fused = 0;
    long long silent = 0;
    std::vector<long long> locals(n_local, 0);
    for (const auto& a : acc) {
        central += a.central;
        fused += a.fused;
        silent += a.silent;
        for (std::size_t i = 0; i < a.locals.size(); ++i) locals[i] += a.locals[i];
    }
    out.central = summarize(central);
    out.fused = summarize(fused);
    out.no_local_alarm = silent;
    out.local_positions = bank.local_positions;
    for (std::size_t i = 0; i < n_local; ++i) out.locals.push_back(summarize(locals[i]));
    if (options.collect_statistics) {
        out.local_statistics.assign(n_local, {});
        for (int t = 0; t < threads; ++t) {
            out.central_statistics.insert(out.central_statistics.end(),
                                          central_stats[t].begin(), central_stats[t].end());
            for (std::size_t i = 0; i < n_local; ++i) {
                out.local_statistics[i].insert(out.local_statistics[i].end(),
                                               local_stats[t][i].begin(),
                                               local_stats[t][i].end());
            }
        }
    }
    return out;
}

}  // namespace icsdet
