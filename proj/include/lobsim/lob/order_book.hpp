#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lobsim/core/types.hpp"

namespace lobsim {

inline constexpr int kL2Depth = 10;

struct Order {
    OrderId id = 0;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    OrderKind kind = OrderKind::Limit;
    Price price = 0;  // ignored for market orders
    Qty quantity = 0;
    Qty remaining = 0;
    Step submit_step = 0;
    std::optional<Step> expiry_step;
};

/// A fill between a resting (maker) and an incoming (taker) order. Always
/// priced at the maker's limit.
struct Trade {
    Price price = 0;
    Qty quantity = 0;
    Side aggressor_side = Side::Buy;
    OrderId maker_order_id = 0;
    OrderId taker_order_id = 0;
    AgentId maker_agent_id = 0;
    AgentId taker_agent_id = 0;
    Step step = 0;

    bool operator==(const Trade&) const = default;
};

enum class EventType : std::uint8_t {
    Limit,         // limit order accepted
    Market,        // market order accepted
    Queue,         // residual rests on the book (price, remaining)
    Trade,         // fill; order_id is the maker, side the aggressor side
    Cancel,
    Expire,
    Amend,         // price/qty are the new values
    MarketCancel,  // unfilled market-order remainder
    Reject,
    Stale,         // cancel/amend of an unknown or finished order
};

std::string_view to_string(EventType t) noexcept;
std::optional<EventType> parse_event_type(std::string_view text) noexcept;

struct EngineEvent {
    Step step = 0;
    EventType type = EventType::Limit;
    OrderId order_id = 0;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    Price price = 0;
    Qty qty = 0;

    bool operator==(const EngineEvent&) const = default;
};

struct PriceLevel {
    Price price = 0;
    Qty volume = 0;
    bool operator==(const PriceLevel&) const = default;
};

/// Top ten levels per side plus the derived quotes. When either side is
/// empty the last two-sided mid and spread are carried and `carried` is set.
struct L2Snapshot {
    Step step = 0;
    std::array<PriceLevel, kL2Depth> bids{};
    std::array<PriceLevel, kL2Depth> asks{};
    int bid_levels = 0;
    int ask_levels = 0;
    std::optional<Price> best_bid;
    std::optional<Price> best_ask;
    double mid = 0.0;
    Price spread = 0;
    bool carried = false;
    bool has_mid = false;  // false until the book was two-sided once

    std::span<const PriceLevel> bid_span() const noexcept { return {bids.data(), static_cast<std::size_t>(bid_levels)}; }
    std::span<const PriceLevel> ask_span() const noexcept { return {asks.data(), static_cast<std::size_t>(ask_levels)}; }
    bool same_levels(const L2Snapshot& other) const noexcept;
};

/// Outcome of an order-entry call. `trades` points into an engine buffer
/// and stays valid until the next mutating call.
struct SubmitResult {
    bool accepted = true;
    std::span<const Trade> trades;
    Qty filled = 0;
    Qty queued = 0;
    Qty cancelled = 0;
};

struct CancelResult {
    EngineEvent event;
    bool stale = false;
};

/// Continuous double auction with price-time priority. A pure state machine:
/// identical call sequences give identical trades and events.
class OrderBook {
public:
    OrderBook() = default;

    /// Optional sink receiving every engine event; pass nullptr to disable.
    void set_event_log(std::vector<EngineEvent>* log) noexcept { events_ = log; }

    SubmitResult submit_limit(const Order& order);
    SubmitResult submit_market(const Order& order);

    CancelResult cancel(OrderId id, Step step);

    /// Quantity decrease at the same price keeps queue position; a price
    /// change or quantity increase re-enters the order as if newly submitted.
    SubmitResult amend(OrderId id, Qty new_quantity, Price new_price, Step step);

    /// Removes all resting orders with expiry_step <= step.
    std::size_t expire_orders(Step step);

    L2Snapshot l2_snapshot(Step step) const;

    std::optional<Price> best_bid() const noexcept;
    std::optional<Price> best_ask() const noexcept;
    bool two_sided() const noexcept { return !bids_.empty() && !asks_.empty(); }
    /// Last two-sided mid; 0 if the book has never been two-sided.
    double last_mid() const noexcept { return last_mid_; }
    Price last_spread() const noexcept { return last_spread_; }
    bool has_mid() const noexcept { return has_mid_; }

    std::optional<Order> find(OrderId id) const;
    std::size_t resting_count() const noexcept { return index_.size(); }
    Qty side_volume(Side side) const noexcept;
    std::size_t level_count(Side side) const noexcept { return side == Side::Buy ? bids_.size() : asks_.size(); }

    /// Visits resting orders in priority order, bids first.
    void for_each_resting(const std::function<void(const Order&)>& fn) const;

    /// Empty string when all structural invariants hold, otherwise a description.
    std::string check_invariants() const;

private:
    struct Resting {
        Order order;
        std::uint64_t seq = 0;
    };
    struct Level {
        Qty volume = 0;
        std::list<Resting> queue;
    };
    using BidMap = std::map<Price, Level, std::greater<>>;
    using AskMap = std::map<Price, Level, std::less<>>;
    struct Locator {
        Side side;
        Price price;
        std::list<Resting>::iterator it;
    };

    template <class Map>
    void match(Map& book, Order& taker, bool is_market);
    void enqueue(const Order& order);
    void remove_resting(OrderId id, EventType why, Step step);
    SubmitResult enter(Order order, bool is_market);
    void emit(Step step, EventType type, OrderId id, AgentId agent, Side side, Price price, Qty qty);
    void refresh_mid() noexcept;

    BidMap bids_;
    AskMap asks_;
    std::unordered_map<OrderId, Locator> index_;
    std::unordered_set<OrderId> seen_;
    std::priority_queue<std::pair<Step, OrderId>, std::vector<std::pair<Step, OrderId>>, std::greater<>> expiries_;
    std::vector<Trade> trade_buf_;
    std::vector<EngineEvent>* events_ = nullptr;
    std::uint64_t next_seq_ = 0;
    double last_mid_ = 0.0;
    Price last_spread_ = 0;
    bool has_mid_ = false;
};

/// Excess-demand sign of a trade: above the prevailing mid is a buy, below a
/// sell; at the mid the last mid move decides, defaulting to buy.
int classify_trade_sign(double price, double prevailing_mid, int last_mid_move) noexcept;

}  // namespace lobsim
