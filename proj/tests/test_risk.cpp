#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "lobsim/risk/bloomberg.hpp"
#include "lobsim/risk/cost.hpp"
#include "lobsim/risk/frontier.hpp"
#include "lobsim/risk/montecarlo.hpp"
#include "lobsim/risk/paired.hpp"
#include "lobsim/risk/surface.hpp"
#include "support/small_market.hpp"
#include "support/temp_dir.hpp"

using namespace lobsim;
using lobsim::testing::SmallMarket;
using lobsim::testing::TempDir;

namespace {

CostRecord record(double zeta_bps, double mi_bps) {
    CostRecord c;
    c.zeta_bps = zeta_bps;
    c.mi_bps = mi_bps;
    c.mr_bps = zeta_bps - mi_bps;
    c.valid = true;
    c.executed = 1;
    c.executed_fraction = 1.0;
    return c;
}

FrontierPoint point(std::string id, double e, double v) {
    FrontierPoint p;
    p.strategy_id = std::move(id);
    p.mean_cost_bps = e;
    p.var_cost_bps2 = v;
    return p;
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("implementation shortfall examples") {
    std::vector<Fill> at_ref{{0, 100, 5}};
    auto z = implementation_shortfall(at_ref, 100.0, Side::Sell);
    CHECK(z.valid);
    CHECK(z.cost == 0.0);

    std::vector<Fill> sell{{0, 100, 1}, {1, 102, 1}};
    auto s = implementation_shortfall(sell, 100.0, Side::Sell);
    CHECK(s.raw == doctest::Approx(1.0));
    CHECK(s.cost == doctest::Approx(-1.0));
    CHECK(s.bps == doctest::Approx(-100.0));

    std::vector<Fill> buy{{0, 101, 3}, {4, 101, 17}};
    auto b = implementation_shortfall(buy, 100.0, Side::Buy);
    CHECK(b.cost == doctest::Approx(1.0));

    auto none = implementation_shortfall({}, 100.0, Side::Buy);
    CHECK_FALSE(none.valid);
}

TEST_CASE("decomposition special cases") {
    std::vector<double> base{100, 101, 99, 98, 97};
    std::vector<Fill> fills{{1, 101, 2}, {3, 98, 5}};
    auto c = decompose(fills, base, 100.0, Side::Sell);
    CHECK(c.zeta_mi == doctest::Approx(0.0));
    CHECK(c.zeta == doctest::Approx(c.zeta_mr));

    std::vector<double> flat(5, 100.0);
    auto d = decompose(fills, flat, 100.0, Side::Sell);
    CHECK(d.zeta_mr == doctest::Approx(0.0));
    CHECK(d.zeta == doctest::Approx(d.zeta_mi));

    std::vector<Fill> late{{7, 100, 1}};
    CHECK_THROWS_AS(decompose(late, base, 100.0, Side::Sell), DomainError);
    auto empty = decompose({}, base, 100.0, Side::Sell);
    CHECK_FALSE(empty.valid);
}

TEST_CASE("decomposition identity on random fills") {
    RandomStream rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t steps = 1 + rng.index(200);
        std::vector<double> base(steps);
        double m = 19000.0;
        for (auto& x : base) {
            m += rng.normal();
            x = std::round(m * 2.0) / 2.0;
        }
        std::vector<Fill> fills;
        const std::size_t k = 1 + rng.index(30);
        for (std::size_t i = 0; i < k; ++i) {
            fills.push_back({static_cast<Step>(rng.index(steps)), 18900 + static_cast<Price>(rng.index(200)),
                             1 + static_cast<Qty>(rng.index(50))});
        }
        const Side side = rng.uniform() < 0.5 ? Side::Buy : Side::Sell;
        const double ref = base[0] + rng.normal();
        auto c = decompose(fills, base, ref, side);
        REQUIRE(c.valid);
        REQUIRE(std::abs(c.zeta - (c.zeta_mr + c.zeta_mi)) / std::max(1.0, std::abs(c.zeta)) < 1e-9);
        REQUIRE(std::abs(c.zeta_bps - (c.mr_bps + c.mi_bps)) / std::max(1.0, std::abs(c.zeta_bps)) < 1e-9);
        auto is = implementation_shortfall(fills, ref, side);
        REQUIRE(c.zeta == doctest::Approx(is.cost));
    }
}

TEST_CASE("bloomberg transaction cost") {
    BloombergTCParams p;
    p.sigma_daily = 432.7;
    p.adv = 50000.0;
    p.spread = 2.0;
    CHECK(bloomberg_tc(50000.0, p) == doctest::Approx(432.7 / 3.0 + 1.0).epsilon(1e-12));
    CHECK(bloomberg_tc(0.0, p) == doctest::Approx(1.0));
    const double impact = bloomberg_tc(1000.0, p) - 1.0;
    CHECK(bloomberg_tc(4000.0, p) - 1.0 == doctest::Approx(2.0 * impact));
    p.adv = 0.0;
    CHECK_THROWS_AS(bloomberg_tc(1.0, p), DomainError);
}

TEST_CASE("reference price and empty schedule pairing") {
    SmallMarket m(5);
    auto zero = build_uniform_schedule({Side::Sell, 0, 1000, 3000, "z"}, 250);
    auto pr = run_paired(m.cfg, m.model, SeedSet::for_run(3, 1), zero);
    CHECK(pr.baseline.mids == pr.counterfactual.mids);
    for (double x : pr.impact) REQUIRE(x == 0.0);
    CHECK(pr.cost.zeta_mi == 0.0);
    CHECK(reference_price(pr.baseline, 1000) == pr.baseline.mids[999]);
    CHECK(reference_price(pr.baseline, 0) == pr.baseline.opening_mid);
}

TEST_CASE("sell meta-order pushes the mid down on average") {
    SmallMarket m(8);
    std::vector<ExecutionSchedule> s{build_uniform_schedule({Side::Sell, 300, 3000, 9000, "s"}, 500)};
    MonteCarloSpec spec;
    spec.n_runs = 12;
    spec.seed = 4;
    spec.curve_from = 3000;
    spec.curve_to = 12000;
    auto runs = run_strategies(m.cfg, m.model, s, spec);
    REQUIRE(runs.size() == 1);
    double mean_impact = 0.0;
    for (std::size_t i = 0; i < runs[0].mean_baseline.size(); ++i) {
        mean_impact += runs[0].mean_counterfactual[i] - runs[0].mean_baseline[i];
    }
    CHECK(mean_impact < 0.0);
    for (const auto& c : runs[0].costs) {
        REQUIRE(c.valid);
        CHECK(std::abs(c.zeta - c.zeta_mr - c.zeta_mi) < 1e-9 * std::max(1.0, std::abs(c.zeta)));
    }
}

TEST_CASE("monte carlo results do not depend on the worker count") {
    SmallMarket m(4);
    std::vector<ExecutionSchedule> s{build_uniform_schedule({Side::Sell, 100, 2000, 3000, "a"}, 250),
                                     build_uniform_schedule({Side::Buy, 50, 2000, 3000, "b"}, 500)};
    MonteCarloSpec spec;
    spec.n_runs = 6;
    spec.threads = 1;
    auto one = run_strategies(m.cfg, m.model, s, spec);
    spec.threads = 3;
    auto three = run_strategies(m.cfg, m.model, s, spec);
    REQUIRE(one.size() == three.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
        for (std::size_t r = 0; r < one[k].costs.size(); ++r) {
            CHECK(one[k].costs[r].zeta == three[k].costs[r].zeta);
            CHECK(one[k].costs[r].zeta_mi == three[k].costs[r].zeta_mi);
        }
    }
    std::vector<ExecutionSchedule> too_long{build_uniform_schedule({Side::Sell, 10, 0, 1'000'000, "x"}, 250)};
    CHECK_THROWS_AS(run_strategies(m.cfg, m.model, too_long, spec), DomainError);
}

TEST_CASE("mean and standard error") {
    std::vector<double> xs{1, 2, 3, 4};
    auto ms = mean_se(xs);
    CHECK(ms.mean == doctest::Approx(2.5));
    CHECK(ms.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(ms.n == 4);
}

TEST_CASE("frontier statistics and jackknife") {
    std::vector<CostRecord> runs;
    RandomStream rng(2);
    for (int i = 0; i < 30; ++i) runs.push_back(record(5.0 + 3.0 * rng.normal(), 2.0 + rng.normal()));
    auto p = summarize_strategy("x", runs);
    double e = 0.0;
    for (const auto& c : runs) e += c.mi_bps;
    e /= 30.0;
    CHECK(p.mean_cost_bps == doctest::Approx(e));
    double mz = 0.0, vz = 0.0;
    for (const auto& c : runs) mz += c.zeta_bps / 30.0;
    for (const auto& c : runs) vz += (c.zeta_bps - mz) * (c.zeta_bps - mz) / 29.0;
    CHECK(p.var_cost_bps2 == doctest::Approx(vz));
    double sd = 0.0;
    for (const auto& c : runs) sd += (c.mi_bps - e) * (c.mi_bps - e) / 29.0;
    CHECK(p.se_mean == doctest::Approx(std::sqrt(sd / 30.0)));

    // Independent leave-one-out jackknife of a paired variance difference.
    std::vector<CostRecord> other;
    for (int i = 0; i < 30; ++i) other.push_back(record(runs[static_cast<std::size_t>(i)].zeta_bps * 1.5 + rng.normal(), 1.0));
    auto diff = paired_difference(other, runs, frontier_variance);
    const std::size_t n = 30;
    std::vector<double> loo(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<CostRecord> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            a.push_back(other[i]);
            b.push_back(runs[i]);
        }
        loo[k] = frontier_variance(a) - frontier_variance(b);
    }
    const double bar = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : loo) ss += (x - bar) * (x - bar);
    CHECK(diff.pairs == n);
    CHECK(diff.difference == doctest::Approx(frontier_variance(other) - frontier_variance(runs)));
    CHECK(diff.se == doctest::Approx(std::sqrt((n - 1.0) / n * ss)));
}

TEST_CASE("efficient frontier") {
    std::vector<double> lambdas{0.0, 0.01, 0.1, 1.0, 10.0};
    auto single = efficient_frontier({point("only", 3.0, 9.0)}, lambdas);
    for (auto i : single.optimal) CHECK(i == 0);
    CHECK(single.envelope == std::vector<std::size_t>{0});

    auto f = efficient_frontier({point("A", 5.0, 10.0), point("B", 3.0, 40.0), point("C", 4.0, 80.0)}, lambdas);
    CHECK(f.points[f.optimal[0]].strategy_id == "B");
    CHECK(f.points[f.optimal.back()].strategy_id == "A");
    REQUIRE(f.envelope.size() == 2);
    CHECK(f.points[f.envelope[0]].strategy_id == "A");
    CHECK(f.points[f.envelope[1]].strategy_id == "B");

    auto tie = efficient_frontier({point("hi", 2.0, 50.0), point("lo", 2.0, 10.0)}, lambdas);
    CHECK(tie.points[tie.optimal[0]].strategy_id == "lo");
}

TEST_CASE("surface smoke grid") {
    SmallMarket m(6);
    SurfaceSpec spec;
    spec.horizons = {1500, 3000};
    spec.sizes = {20, 40};
    spec.n_runs = 4;
    spec.start_step = 1000;
    spec.threads = 1;
    BloombergTCParams b;
    b.sigma_daily = 40.0;
    b.adv = 20000.0;
    b.spread = 2.0;
    spec.bloomberg = b;
    auto s = build_surface(m.cfg, m.model, spec);
    REQUIRE(s.cells.size() == 4);
    for (const auto& c : s.cells) {
        CHECK(c.n_runs == 4);
        CHECK(c.pct_executed >= 0.0);
        CHECK(c.pct_executed <= 100.0);
        REQUIRE(c.bloomberg_tc_bps.has_value());
        CHECK(*c.bloomberg_tc_bps > 0.0);
    }
    CHECK(s.cell(1, 0).horizon == 3000);
    CHECK(s.cell(1, 0).size == 20);

    spec.threads = 2;
    auto t = build_surface(m.cfg, m.model, spec);
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        CHECK(s.cells[i].mean_cost_mi_bps == t.cells[i].mean_cost_mi_bps);
        CHECK(s.cells[i].std_cost_bps == t.cells[i].std_cost_bps);
    }

    TempDir dir("surface");
    write_surface_csv(dir.file("s.csv"), s, "seed=1 config_hash=abc");
    std::ifstream in(dir.file("s.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "# seed=1 config_hash=abc");
    std::getline(in, line);
    CHECK(line == "horizon_steps,size,mean_cost_mi_bps,std_cost_bps,pct_executed,n_runs,extrapolated,bloomberg_tc_bps");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);

    spec.sizes = {20, 20};
    CHECK_THROWS_AS(build_surface(m.cfg, m.model, spec), DomainError);
}

}
