#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "lobsim/agents/behaviours.hpp"
#include "lobsim/agents/placement.hpp"

using namespace lobsim;

namespace {

// Wilson-Hilferty upper quantile of chi-square at the given normal z.
double chi2_critical(int df, double z) {
    const double k = static_cast<double>(df);
    const double c = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * c * c * c;
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("zi: no submission consumes exactly two draws") {
    ZIParams p;
    p.alpha = 0.0;
    p.mu = 0.0;
    RandomStream rng(11), twin(11);
    auto out = zi_step(19000.0, p, rng);
    CHECK(out.empty());
    twin.uniform();
    twin.uniform();
    CHECK(rng() == twin());
}

TEST_CASE("zi: buy limit sits depth below the previous mid") {
    CHECK(round_to_tick(19000.0 - 3.0, Side::Buy) == 18997);
    CHECK(round_to_tick(18996.5, Side::Buy) == 18996);
    CHECK(round_to_tick(18996.5, Side::Sell) == 18997);

    ZIParams p;
    p.alpha = 1.0;
    p.mu = 0.0;
    int buys = 0;
    for (std::uint64_t seed = 1; seed < 200; ++seed) {
        RandomStream rng(seed), twin(seed);
        auto out = zi_step(19000.0, p, rng);
        REQUIRE(out.size == 1);
        twin.uniform();
        twin.uniform();
        const bool buy = twin.uniform() < 0.5;
        const double depth = twin.exponential(p.lambda);
        const auto& o = out.items[0];
        CHECK(o.kind == OrderKind::Limit);
        CHECK(o.side == (buy ? Side::Buy : Side::Sell));
        const double raw = buy ? 19000.0 - depth : 19000.0 + depth;
        CHECK(o.price == round_to_tick(raw, o.side));
        CHECK(o.duration >= 1);
        buys += buy;
    }
    CHECK(buys > 60);
    CHECK(buys < 140);
}

TEST_CASE("zi: submitted depths follow the exponential law") {
    ZIParams p;
    p.alpha = 1.0;
    p.mu = 0.0;
    p.lambda = 0.4;
    RandomStream rng(2024);
    const int n = 100000;
    constexpr int kBins = 15;
    std::vector<double> observed(kBins + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        auto out = zi_step(19000.0, p, rng);
        const auto& o = out.items[0];
        const Price depth = o.side == Side::Buy ? 19000 - o.price : o.price - 19000;
        observed[static_cast<std::size_t>(std::min<Price>(depth, kBins))] += 1.0;
    }
    // Depth d rounds to k when d lies in [k - 0.5, k + 0.5).
    auto cdf = [&](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-p.lambda * x); };
    double chi2 = 0.0;
    for (int k = 0; k <= kBins; ++k) {
        const double hi = k == kBins ? 1.0 : cdf(k + 0.5);
        const double expected = n * (hi - cdf(k - 0.5));
        chi2 += (observed[static_cast<std::size_t>(k)] - expected) * (observed[static_cast<std::size_t>(k)] - expected) / expected;
    }
    CHECK(chi2 < chi2_critical(kBins, 2.326));
}

TEST_CASE("zi: lifetimes are geometric with the cancel probability") {
    ZIParams p;
    p.alpha = 1.0;
    p.mu = 0.0;
    p.delta = 0.01;
    RandomStream rng(5);
    const int n = 50000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = static_cast<double>(zi_step(100.0, p, rng).items[0].duration);
        sum += d;
        sum2 += d * d;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean - 1.0 / p.delta) < 3.0 * sd / std::sqrt(n));
}

TEST_CASE("fundamental demand: piecewise branches") {
    FundamentalState s;
    s.value = 19001;
    CHECK(fundamental_demand(s, 19000, 19002, 0.011) == 0.0);

    s.value = 19010;
    CHECK(fundamental_demand(s, 18998, 19000, 0.011) == doctest::Approx(0.11));

    s.value = 19005;
    s.reflexive = -20.0;
    const double d = fundamental_demand(s, 18998, 19000, 0.011);
    CHECK(d == doctest::Approx(0.011 * (18985.0 - 19000.0)));
    CHECK(d < 0.0);

    s.value = 18990;
    s.reflexive = 0.0;
    CHECK(fundamental_demand(s, 19000, 19002, 0.011) == doctest::Approx(-0.11));
}

TEST_CASE("reflexive value accumulates signed impact") {
    ImpactModel f{0.561, 0.5};
    FundamentalState s;
    CHECK(update_reflexive(s, 0.0, f) == 0.0);
    CHECK(update_reflexive(s, 100.0, f) == doctest::Approx(5.61));
    CHECK(update_reflexive(s, -100.0, f) == doctest::Approx(0.0));

    RandomStream rng(8);
    FundamentalState t;
    double telescoped = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double q = std::round(rng.normal() * 30.0);
        update_reflexive(t, q, f);
        telescoped += f.signed_impact(q);
    }
    CHECK(t.reflexive == doctest::Approx(telescoped));
    CHECK(t.reflexive_value() - t.value == doctest::Approx(telescoped));
}

TEST_CASE("fundamental random walk") {
    FundamentalState s;
    s.value = 19000.0;
    RandomStream rng(1);
    for (int i = 0; i < 100; ++i) update_fundamental(s, rng);
    CHECK(s.value == 19000.0);

    s.volatility = 2.5;
    const int n = 100000;
    std::vector<double> inc(n);
    for (int i = 0; i < n; ++i) {
        const double before = s.value;
        inc[static_cast<std::size_t>(i)] = update_fundamental(s, rng) - before;
    }
    double m = 0.0;
    for (double x : inc) m += x;
    m /= n;
    double var = 0.0, m4 = 0.0;
    for (double x : inc) {
        var += (x - m) * (x - m);
        m4 += std::pow(x - m, 4);
    }
    var /= (n - 1);
    m4 /= n;
    const double se = std::sqrt((m4 - var * var) / n);
    CHECK(std::abs(var - 6.25) < 3.0 * se);
}

TEST_CASE("momentum demand") {
    MomentumState m;
    CHECK(momentum_demand(m, 19000, 19000, 0.53, 290000.0, 0.98) == 0.0);
    const double d = momentum_demand(m, 19000, 19002, 0.53, 5.0, 0.98);
    CHECK(m.trend == doctest::Approx(1.96));
    CHECK(d == doctest::Approx(0.53 * std::tanh(1.96 * 5.0)));

    MomentumState big;
    CHECK(momentum_demand(big, 19000, 19002, 0.53, 290000.0, 0.98) == doctest::Approx(0.53));

    MomentumState decay;
    decay.trend = 1.0;
    for (int i = 0; i < 5; ++i) momentum_demand(decay, 100, 100, 1.0, 1.0, 0.3);
    CHECK(decay.trend == doctest::Approx(std::pow(0.7, 5)));
}

TEST_CASE("noise demand moments") {
    RandomStream zero(3);
    for (int i = 0; i < 10; ++i) CHECK(noise_demand(0.0, zero) == 0.0);

    RandomStream rng(4);
    const double sigma = 0.249;
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = noise_demand(sigma, rng);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(n));
    CHECK(std::abs(sd - sigma) < 3.0 * sigma / std::sqrt(2.0 * n));
}

TEST_CASE("demand to intents") {
    RandomStream rng(6), twin(6);
    auto none = demand_to_intents(0.0, 0.5, 0.5, rng);
    CHECK_FALSE(none.limit);
    CHECK_FALSE(none.market);
    twin.uniform();
    twin.uniform();
    CHECK(rng() == twin());

    for (int i = 0; i < 100; ++i) {
        auto d = demand_to_intents(2.0, 0.5, 0.0, rng);
        CHECK(d.limit);
        CHECK_FALSE(d.market);
        CHECK(d.side == Side::Buy);
        auto s = demand_to_intents(-0.3, 1.0, 1.0, rng);
        CHECK(s.side == Side::Sell);
    }

    const double alpha = 0.23;
    const int n = 100000;
    int limits = 0;
    for (int i = 0; i < n; ++i) limits += demand_to_intents(1.0, alpha, 0.1, rng).limit;
    const double rate = static_cast<double>(limits) / n;
    CHECK(std::abs(rate - alpha) < 3.0 * std::sqrt(alpha * (1 - alpha) / n));
}

TEST_CASE("placement sampling") {
    EmpiricalOrderDistribution single;
    single.add_limit(2, 600, {2, 7, 40});
    RandomStream rng(9);
    for (int i = 0; i < 20; ++i) {
        auto p = sample_limit_placement(single, 2, 600, Side::Buy, 19000, 19002, rng);
        CHECK(p.source == LimitPlacement{2, 7, 40});
        CHECK(p.price == 19000);
        CHECK(p.volume == 7);
        CHECK(p.duration == 40);
        auto s = sample_limit_placement(single, 2, 600, Side::Sell, 19000, 19002, rng);
        CHECK(s.price == 19002);
    }

    EmpiricalOrderDistribution three;
    std::vector<LimitPlacement> tuples{{0, 1, 10}, {1, 2, 20}, {3, 5, 30}};
    for (const auto& t : tuples) three.add_limit(1, 570, t);
    std::map<Price, int> freq;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        auto p = sample_limit_placement(three, 1, 570, Side::Sell, 100, 101, rng);
        REQUIRE(std::find(tuples.begin(), tuples.end(), p.source) != tuples.end());
        ++freq[p.source.depth];
    }
    const double se = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (const auto& [depth, count] : freq) CHECK(std::abs(count - n / 3.0) < 3.0 * se);
}

TEST_CASE("placement fallback and empty distribution") {
    EmpiricalOrderDistribution d;
    CHECK_THROWS_AS(d.limit_pool(1, 600), DomainError);
    d.add_limit(1, 600, {1, 1, 5});
    d.add_market(3, 900, 4);
    CHECK(d.limit_pool(4, 1000).size() == 1);
    RandomStream rng(1);
    CHECK(sample_market_volume(d, 1, 560, rng) == 4);
    CHECK(EmpiricalOrderDistribution::spread_bucket(1) == 0);
    CHECK(EmpiricalOrderDistribution::spread_bucket(9) == 4);
}

}
