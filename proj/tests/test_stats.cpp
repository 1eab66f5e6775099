#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "icsdet/stats.hpp"

using namespace icsdet;
using Catch::Matchers::WithinAbs;

TEST_CASE("wilson interval matches reference values") {
    struct Case {
        long long successes;
        long long trials;
        double low;
        double high;
    };
    // Frozen from an independent implementation of the score interval at the
    // default 95% level.
    const Case cases[] = {
        {43, 1000, 0.03207865341171336, 0.057419003844084014},
        {0, 50, 0.0, 0.07134759913335874},
        {50, 50, 0.9286524008666412, 1.0},
        {9750, 10000, 0.9717527631333815, 0.9778824384144755},
    };
    for (const auto& c : cases) {
        const auto iv = wilson_interval(c.successes, c.trials);
        REQUIRE_THAT(iv.low, WithinAbs(c.low, 1e-12));
        REQUIRE_THAT(iv.high, WithinAbs(c.high, 1e-12));
    }
}

TEST_CASE("wilson interval brackets the point estimate and stays in range") {
    std::mt19937_64 engine(11);
    for (int rep = 0; rep < 200; ++rep) {
        const long long trials = 1 + static_cast<long long>(engine() % 5000);
        const long long successes = static_cast<long long>(engine() % (trials + 1));
        const auto iv = wilson_interval(successes, trials);
        const double phat = static_cast<double>(successes) / static_cast<double>(trials);
        REQUIRE(iv.low >= 0.0);
        REQUIRE(iv.high <= 1.0);
        REQUIRE(iv.low <= phat + 1e-12);
        REQUIRE(iv.high >= phat - 1e-12);
    }
    REQUIRE_THROWS_AS(wilson_interval(-1, 10), ValidationError);
    REQUIRE_THROWS_AS(wilson_interval(11, 10), ValidationError);
    REQUIRE_THROWS_AS(wilson_interval(0, 0), ValidationError);
}

TEST_CASE("kolmogorov survival matches reference values") {
    // Frozen from an independent evaluation of 2 sum (-1)^{j-1} exp(-2 j^2 x^2).
    REQUIRE_THAT(detail::kolmogorov_survival(0.5), WithinAbs(0.9639452436648751, 1e-10));
    REQUIRE_THAT(detail::kolmogorov_survival(1.0), WithinAbs(0.26999967167735456, 1e-10));
    REQUIRE_THAT(detail::kolmogorov_survival(1.5), WithinAbs(0.022217962616525127, 1e-10));
    REQUIRE_THAT(detail::kolmogorov_survival(2.0), WithinAbs(0.0006709252557796953, 1e-10));
}

TEST_CASE("ks test separates distributions and accepts identical ones") {
    std::mt19937_64 engine(22);
    std::normal_distribution<double> standard(0.0, 1.0);
    std::normal_distribution<double> shifted(1.5, 1.0);
    std::vector<double> a(4000), b(4000), c(4000);
    for (auto& v : a) v = standard(engine);
    for (auto& v : b) v = standard(engine);
    for (auto& v : c) v = shifted(engine);

    const auto same = ks_two_sample(a, b);
    REQUIRE(same.p_value > 0.01);
    REQUIRE(same.statistic < 0.05);

    const auto apart = ks_two_sample(a, c);
    REQUIRE(apart.p_value < 1e-10);
    REQUIRE(apart.statistic > 0.4);

    // A sample against itself: zero distance, certain acceptance.
    const auto self = ks_two_sample(a, a);
    REQUIRE(self.statistic == 0.0);
    REQUIRE_THAT(self.p_value, WithinAbs(1.0, 1e-9));

    // Fully separated supports: maximal distance.
    std::vector<double> lo{0.0, 0.1, 0.2}, hi{5.0, 5.1, 5.2};
    REQUIRE(ks_two_sample(lo, hi).statistic == 1.0);

    REQUIRE_THROWS_AS(ks_two_sample({}, a), ValidationError);
}
