#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "icsdet/chi2.hpp"
#include "icsdet/comparison.hpp"

using namespace icsdet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("fused probability composes independent detectors") {
    REQUIRE_THAT(fused_probability({0.5}), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(fused_probability({0.5, 0.5}), WithinAbs(0.75, 1e-15));
    for (int count : {1, 2, 4, 8}) {
        const double expected = 1.0 - std::pow(0.95, count);
        REQUIRE_THAT(fused_probability(std::vector<double>(count, 0.05)),
                     WithinAbs(expected, 1e-12));
    }
    REQUIRE_THROWS_AS(fused_probability({}), ValidationError);
    REQUIRE_THROWS_AS(fused_probability({1.2}), ValidationError);
}

TEST_CASE("equal allocation inverts the fusion formula exactly") {
    REQUIRE_THAT(allocate_false_alarm(0.0975, 2)[0], WithinAbs(0.05, 1e-14));
    REQUIRE_THAT(allocate_false_alarm(0.142625, 3)[0], WithinAbs(0.05, 1e-14));
    for (int count : {1, 2, 5, 16}) {
        for (double pf : {1e-4, 0.01, 0.3}) {
            const auto alloc = allocate_false_alarm(pf, count);
            REQUIRE(static_cast<int>(alloc.size()) == count);
            REQUIRE_THAT(fused_probability(alloc), WithinAbs(pf, 1e-14));
        }
    }
}

TEST_CASE("weighted allocation keeps the fused product exact") {
    const double pf = 0.08;
    const auto alloc = allocate_false_alarm(pf, 3, {1.0, 2.0, 1.0});
    REQUIRE_THAT(alloc[0], WithinRel(1.0 - std::pow(1.0 - pf, 0.25), 1e-12));
    REQUIRE_THAT(alloc[1], WithinRel(1.0 - std::pow(1.0 - pf, 0.50), 1e-12));
    REQUIRE_THAT(fused_probability(alloc), WithinAbs(pf, 1e-14));

    const auto with_zero = allocate_false_alarm(pf, 2, {0.0, 3.0});
    REQUIRE(with_zero[0] == 0.0);
    REQUIRE_THAT(with_zero[1], WithinAbs(pf, 1e-14));

    REQUIRE_THROWS_AS(allocate_false_alarm(pf, 2, {0.0, 0.0}), InfeasibleError);
    REQUIRE_THROWS_AS(allocate_false_alarm(pf, 2, {-1.0, 2.0}), ValidationError);
    REQUIRE_THROWS_AS(allocate_false_alarm(pf, 3, {1.0, 2.0}), ValidationError);
    REQUIRE_THROWS_AS(allocate_false_alarm(0.0, 2), ValidationError);
}

TEST_CASE("centralized dominance bound matches the written-out formula") {
    // p_c = 50, lambda_c = 100, 2 detectors capped at pd_max = 0.5:
    // bound = 150 - sqrt(4 * 2 * 250 * ln 2).
    const double expected = 150.0 - std::sqrt(8.0 * 250.0 * std::log(2.0));
    const auto at_100 = centralized_dominance(50, 100.0, 100.0, 2, 0.5);
    REQUIRE(at_100.reason.empty());
    REQUIRE_THAT(at_100.threshold_bound, WithinRel(expected, 1e-12));
    REQUIRE(at_100.holds);
    REQUIRE_FALSE(centralized_dominance(50, 100.0, 120.0, 2, 0.5).holds);

    const auto degenerate = centralized_dominance(50, 100.0, 100.0, 2, 1.0);
    REQUIRE_FALSE(degenerate.holds);
    REQUIRE(degenerate.reason == "detection_cap_at_one");
    REQUIRE_THROWS_AS(centralized_dominance(50, 100.0, 100.0, 2, 1.5), ValidationError);
}

TEST_CASE("decentralized dominance bound matches the written-out formula") {
    // p_c = 50, lambda_c = 20, 3 detectors with pd_min = 0.2:
    // fused floor 1 - 0.8^3, kappa^2 = 2 ln(1 / (1 - 0.8^3)).
    const double log_term = -std::log(1.0 - std::pow(0.8, 3));
    const double expected =
        70.0 + std::sqrt(4.0 * 90.0 * log_term) + 2.0 * log_term;
    const auto at_200 = decentralized_dominance(50, 20.0, 200.0, 3, 0.2);
    REQUIRE(at_200.reason.empty());
    REQUIRE_THAT(at_200.threshold_bound, WithinRel(expected, 1e-12));
    REQUIRE(at_200.holds);
    REQUIRE_FALSE(decentralized_dominance(50, 20.0, 80.0, 3, 0.2).holds);

    const auto degenerate = decentralized_dominance(50, 20.0, 200.0, 3, 0.0);
    REQUIRE_FALSE(degenerate.holds);
    REQUIRE(degenerate.reason == "detection_floor_at_zero");
    // A certain local detector pushes the fused floor to one; the bound
    // collapses to the mean and the verdict is trivially sound.
    const auto certain = decentralized_dominance(50, 20.0, 200.0, 3, 1.0);
    REQUIRE(certain.holds);
    REQUIRE(certain.reason.empty());
    REQUIRE_THAT(certain.threshold_bound, WithinRel(70.0, 1e-12));
}

TEST_CASE("dominance verdicts are sound on random calibrated tuples") {
    // When a condition fires, the closed-form probabilities must agree with
    // it. Small version of the exhaustive acceptance check.
    std::mt19937_64 engine(20250818);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int fired = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const int count = 2 << (engine() % 3);               // 2, 4, 8
        const int p_i = 1 + static_cast<int>(engine() % 20);
        const int p_c = p_i + static_cast<int>(engine() % 150);
        const double pf = std::pow(10.0, -3.0 * u(engine)) * 0.1;  // 1e-4 .. 0.1
        const double lambda_c = std::pow(10.0, 6.0 * u(engine) - 2.0);
        const double lambda_i = lambda_c * std::pow(10.0, -4.0 * u(engine));

        const double tau_c = chi2::q_inverse_tau(pf, p_c);
        const double pf_i = allocate_false_alarm(pf, count)[0];
        const double tau_i = chi2::q_inverse_tau(pf_i, p_i);
        const double pd_i = chi2::q_survival(tau_i, {p_i, lambda_i});
        const double pd_c = chi2::q_survival(tau_c, {p_c, lambda_c});
        const double pd_d = fused_probability(std::vector<double>(count, pd_i));

        // The implications are exact, so the slack only covers the survival
        // evaluator's absolute-accuracy budget (1e-10): when both detection
        // probabilities saturate toward one the true miss masses drop below
        // double resolution and the computed values carry ~1e-12 noise.
        if (centralized_dominance(p_c, lambda_c, tau_c, count, pd_i).holds) {
            ++fired;
            CAPTURE(count, p_i, p_c, pf, lambda_c, lambda_i, tau_c);
            REQUIRE(pd_c >= pd_d - 1e-10);
        }
        if (decentralized_dominance(p_c, lambda_c, tau_c, count, pd_i).holds) {
            ++fired;
            CAPTURE(count, p_i, p_c, pf, lambda_c, lambda_i, tau_c);
            REQUIRE(pd_d >= pd_c - 1e-10);
        }
    }
    REQUIRE(fired > 0);
}

TEST_CASE("fused detection bound caps the product form") {
    std::mt19937_64 engine(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int count = 1 + static_cast<int>(engine() % 6);
        std::vector<int> dofs;
        std::vector<double> lambdas;
        std::vector<double> taus;
        std::vector<double> pds;
        for (int i = 0; i < count; ++i) {
            dofs.push_back(1 + static_cast<int>(engine() % 30));
            lambdas.push_back(20.0 * u(engine));
            taus.push_back(chi2::q_inverse_tau(0.2 * u(engine) + 1e-4, dofs.back()));
            pds.push_back(chi2::q_survival(taus.back(), {dofs.back(), lambdas.back()}));
        }
        const double bound = fused_detection_upper_bound(dofs, lambdas, taus);
        REQUIRE(fused_probability(pds) <= bound + 1e-12);
    }
}

TEST_CASE("region sweep fills the grid and is internally consistent") {
    const std::vector<double> li = {0.0, 2.0, 5.0, 10.0, 25.0, 50.0};
    const std::vector<double> lc = {0.0, 2.0, 5.0, 10.0, 25.0, 50.0};
    const auto map = sweep_region(2, 40, 4, 0.01, li, lc);
    REQUIRE(map.points.size() == li.size() * lc.size());
    REQUIRE_THAT(chi2::q_survival(map.tau_central, {40, 0.0}), WithinAbs(0.01, 1e-10));

    bool saw_central = false;
    bool saw_decentralized = false;
    for (const auto& pt : map.points) {
        const double pd_c = chi2::q_survival(map.tau_central, {40, pt.lambda_c});
        REQUIRE_THAT(pt.pd_c, WithinAbs(pd_c, 1e-12));
        const double pd_i = chi2::q_survival(map.tau_local, {2, pt.lambda_i});
        REQUIRE_THAT(pt.pd_d, WithinAbs(1.0 - std::pow(1.0 - pd_i, 4), 1e-12));
        if (pt.winner == 'c') saw_central = true;
        if (pt.winner == 'd') saw_decentralized = true;
        if (pt.centralized_sufficient) REQUIRE(pt.pd_c >= pt.pd_d - 1e-10);
        if (pt.decentralized_sufficient) REQUIRE(pt.pd_d >= pt.pd_c - 1e-10);
    }
    REQUIRE(saw_central);
    REQUIRE(saw_decentralized);
}
