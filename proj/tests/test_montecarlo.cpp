#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "icsdet/attack.hpp"
#include "icsdet/chi2.hpp"
#include "icsdet/montecarlo.hpp"
#include "scenario.hpp"

using namespace icsdet;
using Catch::Matchers::WithinAbs;

namespace {

double four_se(double p, int trials) {
    return 4.0 * std::sqrt(std::max(p * (1.0 - p), 1e-6) / trials);
}

testutil::ScenarioSpec chain_spec() {
    testutil::ScenarioSpec spec;
    spec.count = 3;
    spec.state_dim = 2;
    spec.output_dim = 2;
    spec.attack_dim = 1;
    return spec;
}

}  // namespace

TEST_CASE("one seed reproduces, different seeds decorrelate") {
    const auto model = testutil::random_model(chain_spec(), 9001);
    const auto bank = build_bank(model, 3, 0.1);

    SimulationOptions options;
    options.trials = 400;
    options.seed = 7;
    options.collect_statistics = true;
    const auto first = simulate(model, bank, options);
    const auto second = simulate(model, bank, options);
    REQUIRE(first.central.alarms == second.central.alarms);
    REQUIRE(first.central_statistics == second.central_statistics);
    REQUIRE(first.local_statistics == second.local_statistics);

    options.seed = 8;
    const auto other = simulate(model, bank, options);
    REQUIRE(first.central_statistics != other.central_statistics);
}

TEST_CASE("the thread partition does not change the draws") {
    const auto model = testutil::random_model(chain_spec(), 9002);
    const auto bank = build_bank(model, 3, 0.1);

    SimulationOptions options;
    options.trials = 401;  // odd count forces uneven chunks
    options.seed = 5;
    options.collect_statistics = true;
    options.threads = 1;
    const auto serial = simulate(model, bank, options);
    options.threads = 3;
    const auto parallel = simulate(model, bank, options);

    REQUIRE(serial.central.alarms == parallel.central.alarms);
    REQUIRE(serial.fused.alarms == parallel.fused.alarms);
    REQUIRE(serial.no_local_alarm == parallel.no_local_alarm);
    for (std::size_t i = 0; i < serial.locals.size(); ++i) {
        REQUIRE(serial.locals[i].alarms == parallel.locals[i].alarms);
    }
    REQUIRE(serial.central_statistics == parallel.central_statistics);
    REQUIRE(serial.local_statistics == parallel.local_statistics);
}

TEST_CASE("false alarms land on the calibrated operating point") {
    const auto model = testutil::random_model(chain_spec(), 9003);
    const double pf = 0.1;
    const auto bank = build_bank(model, 4, pf);

    SimulationOptions options;
    options.trials = 6000;
    options.seed = 42;
    const auto result = simulate(model, bank, options);

    REQUIRE_THAT(result.central.frequency, WithinAbs(pf, four_se(pf, options.trials)));
    REQUIRE_THAT(result.fused.frequency, WithinAbs(pf, four_se(pf, options.trials)));
    REQUIRE(result.central.interval.low <= result.central.frequency);
    REQUIRE(result.central.interval.high >= result.central.frequency);

    const double pf_i = -std::expm1(std::log1p(-pf) / 3.0);
    for (const auto& local : result.locals) {
        REQUIRE_THAT(local.frequency, WithinAbs(pf_i, four_se(pf_i, options.trials)));
    }

    // A silent bank is the independence product of the per-detector misses.
    const double silent = std::pow(1.0 - pf_i, 3);
    const double observed = static_cast<double>(result.no_local_alarm) / options.trials;
    REQUIRE_THAT(observed, WithinAbs(silent, four_se(silent, options.trials)));
}

TEST_CASE("attacked runs alarm at the analytic rates") {
    const auto model = testutil::random_model(chain_spec(), 9004);
    const auto bank = build_bank(model, 4, 0.05);
    const Vector attack = attack_with_noncentrality(bank.central.info, 25.0);
    const auto analysis = analyze_bank(bank, attack);
    REQUIRE_THAT(analysis.central.noncentrality, WithinAbs(25.0, 1e-9));

    SimulationOptions options;
    options.trials = 6000;
    options.seed = 99;
    options.attack = attack;
    const auto result = simulate(model, bank, options);

    REQUIRE_THAT(result.central.frequency,
                 WithinAbs(analysis.central.detection,
                           four_se(analysis.central.detection, options.trials)));
    REQUIRE_THAT(result.fused.frequency,
                 WithinAbs(analysis.fused_detection,
                           four_se(analysis.fused_detection, options.trials)));
    for (std::size_t i = 0; i < result.locals.size(); ++i) {
        REQUIRE_THAT(result.locals[i].frequency,
                     WithinAbs(analysis.locals[i].detection,
                               four_se(analysis.locals[i].detection, options.trials)));
    }
}

TEST_CASE("collected statistics follow the stated quadratic law") {
    const auto model = testutil::random_model(chain_spec(), 9005);
    const auto bank = build_bank(model, 4, 0.05);

    SimulationOptions options;
    options.trials = 4000;
    options.seed = 17;
    options.collect_statistics = true;
    const auto quiet = simulate(model, bank, options);

    const int p_c = static_cast<int>(bank.central.residual_dim);
    const auto reference = chi2::sample({p_c, 0.0}, 4000, 555);
    REQUIRE(ks_two_sample(quiet.central_statistics, reference).p_value > 1e-3);

    // Under attack the same statistic shifts to the stated noncentrality.
    const Vector attack = attack_with_noncentrality(bank.central.info, 12.0);
    options.attack = attack;
    const auto hit = simulate(model, bank, options);
    const auto shifted = chi2::sample({p_c, 12.0}, 4000, 556);
    REQUIRE(ks_two_sample(hit.central_statistics, shifted).p_value > 1e-3);
    REQUIRE(ks_two_sample(hit.central_statistics, reference).p_value < 1e-6);
}

TEST_CASE("the initial state cannot move the residuals") {
    const auto model = testutil::random_model(chain_spec(), 9006);
    const auto bank = build_bank(model, 4, 0.05);

    SimulationOptions options;
    options.trials = 4000;
    options.seed = 31;
    options.collect_statistics = true;
    const auto centered = simulate(model, bank, options);

    options.x0 = 5.0 * Vector::Ones(model.state_dim());
    const auto offset = simulate(model, bank, options);
    REQUIRE(ks_two_sample(centered.central_statistics, offset.central_statistics).p_value >
            1e-3);
    for (std::size_t i = 0; i < centered.local_statistics.size(); ++i) {
        REQUIRE(ks_two_sample(centered.local_statistics[i], offset.local_statistics[i])
                    .p_value > 1e-3);
    }
}

TEST_CASE("a zero-weight detector stays silent in simulation") {
    const auto model = testutil::random_model(chain_spec(), 9007);
    const auto bank = build_bank(model, 3, 0.1, {1.0, 1.0, 0.0});

    SimulationOptions options;
    options.trials = 500;
    options.seed = 3;
    const auto result = simulate(model, bank, options);
    REQUIRE(result.locals[2].alarms == 0);
}

TEST_CASE("simulation inputs are validated") {
    const auto model = testutil::random_model(chain_spec(), 9008);
    const auto bank = build_bank(model, 2, 0.1);
    SimulationOptions options;
    options.trials = 0;
    REQUIRE_THROWS_AS(simulate(model, bank, options), ValidationError);
    options.trials = 10;
    options.x0 = Vector::Zero(1);
    REQUIRE_THROWS_AS(simulate(model, bank, options), ValidationError);
    options.x0 = Vector();
    options.attack = Vector::Zero(1);
    REQUIRE_THROWS_AS(simulate(model, bank, options), ValidationError);
}
