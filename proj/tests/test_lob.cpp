#include <doctest.h>

#include <sstream>

#include "lobsim/lob/event_log.hpp"
#include "lobsim/lob/order_book.hpp"
#include "support/reference_matcher.hpp"

using namespace lobsim;

namespace {

Order limit(OrderId id, Side side, Price px, Qty qty, Step step = 0, std::optional<Step> expiry = {}) {
    Order o;
    o.id = id;
    o.agent_id = static_cast<AgentId>(id % 7 + 1);
    o.side = side;
    o.price = px;
    o.quantity = qty;
    o.submit_step = step;
    o.expiry_step = expiry;
    return o;
}

Order market(OrderId id, Side side, Qty qty, Step step = 0) {
    Order o = limit(id, side, 0, qty, step);
    o.kind = OrderKind::Market;
    return o;
}

}  // namespace

TEST_SUITE("lob") {

TEST_CASE("limit order crossing the spread fills at the resting price") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Sell, 101, 5));
    auto r = b.submit_limit(limit(2, Side::Buy, 103, 3));
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].price == 101);
    CHECK(r.trades[0].quantity == 3);
    CHECK(r.filled == 3);
    CHECK(b.best_ask() == 101);
    CHECK(b.side_volume(Side::Sell) == 2);
    CHECK_FALSE(b.best_bid().has_value());
}

TEST_CASE("orders at one price fill in arrival order") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Buy, 100, 2));
    b.submit_limit(limit(2, Side::Buy, 100, 2));
    b.submit_limit(limit(3, Side::Buy, 101, 1));
    auto r = b.submit_market(market(4, Side::Sell, 4));
    REQUIRE(r.trades.size() == 3);
    CHECK(r.trades[0].maker_order_id == 3);
    CHECK(r.trades[1].maker_order_id == 1);
    CHECK(r.trades[2].maker_order_id == 2);
    CHECK(r.trades[2].quantity == 1);
    CHECK(b.find(2)->remaining == 1);
}

TEST_CASE("market order larger than the book cancels its remainder") {
    OrderBook b;
    std::vector<EngineEvent> log;
    b.set_event_log(&log);
    b.submit_limit(limit(1, Side::Sell, 101, 2));
    auto r = b.submit_market(market(2, Side::Buy, 5));
    CHECK(r.filled == 2);
    CHECK(r.cancelled == 3);
    CHECK(b.resting_count() == 0);
    CHECK(log.back().type == EventType::MarketCancel);
    CHECK(log.back().qty == 3);
}

TEST_CASE("market order into an empty book does nothing") {
    OrderBook b;
    auto r = b.submit_market(market(1, Side::Sell, 4));
    CHECK(r.trades.empty());
    CHECK(r.cancelled == 4);
    CHECK_FALSE(b.has_mid());
}

TEST_CASE("invalid orders are rejected") {
    OrderBook b;
    CHECK_FALSE(b.submit_limit(limit(1, Side::Buy, 100, 0)).accepted);
    CHECK_FALSE(b.submit_limit(limit(2, Side::Buy, 0, 1)).accepted);
    CHECK(b.submit_limit(limit(3, Side::Buy, 100, 1)).accepted);
    CHECK_FALSE(b.submit_limit(limit(3, Side::Buy, 100, 1)).accepted);
    CHECK_FALSE(b.submit_limit(limit(4, Side::Buy, 100, 1, 5, 5)).accepted);
    CHECK(b.resting_count() == 1);
}

TEST_CASE("cancel of an unknown id is stale") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Buy, 100, 1));
    CHECK_FALSE(b.cancel(1, 0).stale);
    CHECK(b.cancel(1, 0).stale);
    CHECK(b.cancel(99, 0).stale);
}

TEST_CASE("amend down keeps priority, amend up loses it") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Sell, 101, 5));
    b.submit_limit(limit(2, Side::Sell, 101, 5));
    b.amend(1, 3, 101, 1);
    auto r = b.submit_market(market(3, Side::Buy, 1, 1));
    CHECK(r.trades[0].maker_order_id == 1);
    b.amend(1, 9, 101, 2);
    r = b.submit_market(market(4, Side::Buy, 1, 2));
    CHECK(r.trades[0].maker_order_id == 2);
}

TEST_CASE("expiry removes orders at their step") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Buy, 100, 1, 0, 3));
    b.submit_limit(limit(2, Side::Sell, 102, 1, 0, 5));
    CHECK(b.expire_orders(2) == 0);
    CHECK(b.expire_orders(3) == 1);
    CHECK_FALSE(b.find(1).has_value());
    CHECK(b.expire_orders(10) == 1);
}

TEST_CASE("mid is carried while one side is empty") {
    OrderBook b;
    b.submit_limit(limit(1, Side::Buy, 99, 1));
    b.submit_limit(limit(2, Side::Sell, 101, 1));
    CHECK(b.last_mid() == doctest::Approx(100.0));
    b.submit_market(market(3, Side::Buy, 1));
    CHECK(b.last_mid() == doctest::Approx(100.0));
    auto s = b.l2_snapshot(1);
    CHECK(s.carried);
    CHECK(s.mid == doctest::Approx(100.0));
}

TEST_CASE("trade sign classification") {
    CHECK(classify_trade_sign(101, 100.0, 0) == 1);
    CHECK(classify_trade_sign(99, 100.0, 0) == -1);
    CHECK(classify_trade_sign(100, 100.0, -1) == -1);
    CHECK(classify_trade_sign(100, 100.0, 0) == 1);
}

TEST_CASE("event log round trip") {
    OrderBook b;
    std::vector<EngineEvent> log;
    b.set_event_log(&log);
    b.submit_limit(limit(1, Side::Buy, 100, 3));
    b.submit_market(market(2, Side::Sell, 1));
    b.cancel(1, 4);
    std::ostringstream a, c;
    write_event_log(a, log);
    write_event_log(c, log);
    CHECK(a.str() == c.str());
    CHECK(a.str().rfind("step,event_type,order_id,agent_id,side,price,qty", 0) == 0);
}

TEST_CASE("random streams match the brute-force matcher") {
    for (std::uint64_t s = 0; s < 300; ++s) {
        auto ops = testing::random_stream(1000 + s, 400);
        auto e = testing::run_engine(ops);
        auto r = testing::run_reference(ops);
        REQUIRE(e.trades == r.trades);
        REQUIRE(testing::same_resting(e.resting, r.resting));
    }
}

TEST_CASE("structural invariants hold under random flow") {
    OrderBook b;
    auto ops = testing::random_stream(77, 2000);
    for (const auto& op : ops) {
        switch (op.kind) {
            case testing::OpKind::Limit: b.submit_limit(op.order); break;
            case testing::OpKind::Market: b.submit_market(op.order); break;
            case testing::OpKind::Cancel: b.cancel(op.target, op.step); break;
            case testing::OpKind::Amend: b.amend(op.target, op.qty, op.price, op.step); break;
            case testing::OpKind::Expire: b.expire_orders(op.step); break;
        }
        REQUIRE(b.check_invariants().empty());
        if (b.best_bid() && b.best_ask()) REQUIRE(*b.best_bid() < *b.best_ask());
    }
}

}
