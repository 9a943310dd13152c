#include "lobsim/lob/order_book.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace lobsim {

namespace {

constexpr std::array<std::string_view, 10> kEventNames = {
    "limit", "market", "queue", "trade", "cancel", "expire", "amend", "market_cancel", "reject", "stale"};

}  // namespace

std::string_view to_string(EventType t) noexcept { return kEventNames[static_cast<std::size_t>(t)]; }

std::optional<EventType> parse_event_type(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kEventNames.size(); ++i) {
        if (kEventNames[i] == text) return static_cast<EventType>(i);
    }
    return std::nullopt;
}

bool L2Snapshot::same_levels(const L2Snapshot& other) const noexcept {
    return bid_levels == other.bid_levels && ask_levels == other.ask_levels &&
           std::equal(bid_span().begin(), bid_span().end(), other.bid_span().begin()) &&
           std::equal(ask_span().begin(), ask_span().end(), other.ask_span().begin());
}

int classify_trade_sign(double price, double prevailing_mid, int last_mid_move) noexcept {
    if (price > prevailing_mid) return 1;
    if (price < prevailing_mid) return -1;
    return last_mid_move < 0 ? -1 : 1;
}

void OrderBook::emit(Step step, EventType type, OrderId id, AgentId agent, Side side, Price price, Qty qty) {
    if (events_ != nullptr) events_->push_back({step, type, id, agent, side, price, qty});
}

void OrderBook::refresh_mid() noexcept {
    if (two_sided()) {
        Price bb = bids_.begin()->first;
        Price ba = asks_.begin()->first;
        last_mid_ = 0.5 * static_cast<double>(bb + ba);
        last_spread_ = ba - bb;
        has_mid_ = true;
    }
}

std::optional<Price> OrderBook::best_bid() const noexcept {
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->first;
}

std::optional<Price> OrderBook::best_ask() const noexcept {
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

template <class Map>
void OrderBook::match(Map& book, Order& taker, bool is_market) {
    while (taker.remaining > 0 && !book.empty()) {
        auto level_it = book.begin();
        const Price level_price = level_it->first;
        if (!is_market) {
            bool crosses = taker.side == Side::Buy ? level_price <= taker.price : level_price >= taker.price;
            if (!crosses) break;
        }
        Level& level = level_it->second;
        while (taker.remaining > 0 && !level.queue.empty()) {
            Resting& maker = level.queue.front();
            Qty fill = std::min(taker.remaining, maker.order.remaining);
            trade_buf_.push_back(Trade{level_price, fill, taker.side, maker.order.id, taker.id,
                                       maker.order.agent_id, taker.agent_id, taker.submit_step});
            emit(taker.submit_step, EventType::Trade, maker.order.id, maker.order.agent_id, taker.side, level_price,
                 fill);
            taker.remaining -= fill;
            maker.order.remaining -= fill;
            level.volume -= fill;
            if (maker.order.remaining == 0) {
                index_.erase(maker.order.id);
                level.queue.pop_front();
            }
        }
        if (level.queue.empty()) book.erase(level_it);
    }
}

void OrderBook::enqueue(const Order& order) {
    auto push = [&](auto& book) {
        Level& level = book[order.price];
        level.queue.push_back(Resting{order, next_seq_++});
        level.volume += order.remaining;
        index_[order.id] = Locator{order.side, order.price, std::prev(level.queue.end())};
    };
    if (order.side == Side::Buy) {
        push(bids_);
    } else {
        push(asks_);
    }
}

SubmitResult OrderBook::enter(Order order, bool is_market) {
    trade_buf_.clear();
    SubmitResult result;
    const Qty start = order.remaining;
    if (order.side == Side::Buy) {
        match(asks_, order, is_market);
    } else {
        match(bids_, order, is_market);
    }
    result.filled = start - order.remaining;
    if (order.remaining > 0) {
        if (is_market) {
            result.cancelled = order.remaining;
            emit(order.submit_step, EventType::MarketCancel, order.id, order.agent_id, order.side, 0,
                 order.remaining);
        } else {
            result.queued = order.remaining;
            enqueue(order);
            emit(order.submit_step, EventType::Queue, order.id, order.agent_id, order.side, order.price,
                 order.remaining);
            if (order.expiry_step) expiries_.emplace(*order.expiry_step, order.id);
        }
    }
    result.trades = std::span<const Trade>(trade_buf_);
    refresh_mid();
    return result;
}

SubmitResult OrderBook::submit_limit(const Order& order) {
    trade_buf_.clear();
    bool bad = order.quantity <= 0 || order.price <= 0 || seen_.contains(order.id) ||
               (order.expiry_step && *order.expiry_step <= order.submit_step);
    if (bad) {
        emit(order.submit_step, EventType::Reject, order.id, order.agent_id, order.side, order.price, order.quantity);
        return SubmitResult{false, {}, 0, 0, 0};
    }
    seen_.insert(order.id);
    emit(order.submit_step, EventType::Limit, order.id, order.agent_id, order.side, order.price, order.quantity);
    Order o = order;
    o.kind = OrderKind::Limit;
    o.remaining = o.quantity;
    return enter(o, false);
}

SubmitResult OrderBook::submit_market(const Order& order) {
    trade_buf_.clear();
    if (order.quantity <= 0 || seen_.contains(order.id)) {
        emit(order.submit_step, EventType::Reject, order.id, order.agent_id, order.side, 0, order.quantity);
        return SubmitResult{false, {}, 0, 0, 0};
    }
    seen_.insert(order.id);
    emit(order.submit_step, EventType::Market, order.id, order.agent_id, order.side, 0, order.quantity);
    Order o = order;
    o.kind = OrderKind::Market;
    o.price = 0;
    o.remaining = o.quantity;
    o.expiry_step.reset();
    return enter(o, true);
}

void OrderBook::remove_resting(OrderId id, EventType why, Step step) {
    auto found = index_.find(id);
    Locator loc = found->second;
    const Order& o = loc.it->order;
    emit(step, why, o.id, o.agent_id, o.side, o.price, o.remaining);
    auto drop = [&](auto& book) {
        auto level_it = book.find(loc.price);
        level_it->second.volume -= loc.it->order.remaining;
        level_it->second.queue.erase(loc.it);
        if (level_it->second.queue.empty()) book.erase(level_it);
    };
    if (loc.side == Side::Buy) {
        drop(bids_);
    } else {
        drop(asks_);
    }
    index_.erase(found);
}

CancelResult OrderBook::cancel(OrderId id, Step step) {
    trade_buf_.clear();
    auto found = index_.find(id);
    if (found == index_.end()) {
        emit(step, EventType::Stale, id, 0, Side::Buy, 0, 0);
        return {EngineEvent{step, EventType::Stale, id, 0, Side::Buy, 0, 0}, true};
    }
    const Order o = found->second.it->order;
    remove_resting(id, EventType::Cancel, step);
    refresh_mid();
    return {EngineEvent{step, EventType::Cancel, id, o.agent_id, o.side, o.price, o.remaining}, false};
}

SubmitResult OrderBook::amend(OrderId id, Qty new_quantity, Price new_price, Step step) {
    trade_buf_.clear();
    auto found = index_.find(id);
    if (found == index_.end()) {
        emit(step, EventType::Stale, id, 0, Side::Buy, new_price, new_quantity);
        return SubmitResult{false, {}, 0, 0, 0};
    }
    Order o = found->second.it->order;
    if (new_quantity <= 0 || new_price <= 0) {
        emit(step, EventType::Reject, id, o.agent_id, o.side, new_price, new_quantity);
        return SubmitResult{false, {}, 0, 0, 0};
    }
    if (new_price == o.price && new_quantity <= o.remaining) {
        Resting& r = *found->second.it;
        Qty reduction = r.order.remaining - new_quantity;
        r.order.remaining = new_quantity;
        r.order.quantity -= reduction;
        auto shrink = [&](auto& book) { book.find(o.price)->second.volume -= reduction; };
        if (o.side == Side::Buy) {
            shrink(bids_);
        } else {
            shrink(asks_);
        }
        emit(step, EventType::Amend, id, o.agent_id, o.side, new_price, new_quantity);
        return SubmitResult{true, {}, 0, new_quantity, 0};
    }
    // Loses time priority: pull it and enter again at the new terms.
    auto pull = [&](auto& book) {
        auto level_it = book.find(o.price);
        level_it->second.volume -= o.remaining;
        level_it->second.queue.erase(found->second.it);
        if (level_it->second.queue.empty()) book.erase(level_it);
    };
    if (o.side == Side::Buy) {
        pull(bids_);
    } else {
        pull(asks_);
    }
    index_.erase(found);
    emit(step, EventType::Amend, id, o.agent_id, o.side, new_price, new_quantity);
    o.quantity = (o.quantity - o.remaining) + new_quantity;
    o.remaining = new_quantity;
    o.price = new_price;
    o.submit_step = step;
    // The pending expiry entry stays in the heap and still matches by id.
    std::optional<Step> expiry = o.expiry_step;
    o.expiry_step.reset();
    SubmitResult r = enter(o, false);
    if (r.queued > 0 && expiry) index_.at(id).it->order.expiry_step = expiry;
    return r;
}

std::size_t OrderBook::expire_orders(Step step) {
    std::size_t removed = 0;
    while (!expiries_.empty() && expiries_.top().first <= step) {
        auto [when, id] = expiries_.top();
        expiries_.pop();
        auto found = index_.find(id);
        if (found == index_.end()) continue;
        const auto& expiry = found->second.it->order.expiry_step;
        if (!expiry || *expiry != when) continue;
        remove_resting(id, EventType::Expire, step);
        ++removed;
    }
    if (removed > 0) refresh_mid();
    return removed;
}

L2Snapshot OrderBook::l2_snapshot(Step step) const {
    L2Snapshot snap;
    snap.step = step;
    for (auto it = bids_.begin(); it != bids_.end() && snap.bid_levels < kL2Depth; ++it) {
        snap.bids[snap.bid_levels++] = PriceLevel{it->first, it->second.volume};
    }
    for (auto it = asks_.begin(); it != asks_.end() && snap.ask_levels < kL2Depth; ++it) {
        snap.asks[snap.ask_levels++] = PriceLevel{it->first, it->second.volume};
    }
    snap.best_bid = best_bid();
    snap.best_ask = best_ask();
    if (snap.best_bid && snap.best_ask) {
        snap.mid = 0.5 * static_cast<double>(*snap.best_bid + *snap.best_ask);
        snap.spread = *snap.best_ask - *snap.best_bid;
        snap.has_mid = true;
    } else {
        snap.mid = last_mid_;
        snap.spread = last_spread_;
        snap.carried = true;
        snap.has_mid = has_mid_;
    }
    return snap;
}

std::optional<Order> OrderBook::find(OrderId id) const {
    auto found = index_.find(id);
    if (found == index_.end()) return std::nullopt;
    return found->second.it->order;
}

Qty OrderBook::side_volume(Side side) const noexcept {
    Qty total = 0;
    if (side == Side::Buy) {
        for (const auto& [p, level] : bids_) total += level.volume;
    } else {
        for (const auto& [p, level] : asks_) total += level.volume;
    }
    return total;
}

void OrderBook::for_each_resting(const std::function<void(const Order&)>& fn) const {
    for (const auto& [p, level] : bids_)
        for (const auto& r : level.queue) fn(r.order);
    for (const auto& [p, level] : asks_)
        for (const auto& r : level.queue) fn(r.order);
}

std::string OrderBook::check_invariants() const {
    std::size_t count = 0;
    auto check_side = [&](const auto& book, Side side) -> std::string {
        for (const auto& [price, level] : book) {
            if (level.queue.empty()) return fmt::format("empty level retained at {}", price);
            Qty vol = 0;
            std::uint64_t last_seq = 0;
            bool first = true;
            for (const auto& r : level.queue) {
                if (r.order.remaining <= 0) return fmt::format("order {} resting with no quantity", r.order.id);
                if (r.order.remaining > r.order.quantity) return fmt::format("order {} remaining > quantity", r.order.id);
                if (r.order.side != side || r.order.price != price) return fmt::format("order {} misfiled", r.order.id);
                if (!first && r.seq <= last_seq) return fmt::format("FIFO order broken at {}", price);
                auto found = index_.find(r.order.id);
                if (found == index_.end() || found->second.price != price) return fmt::format("index stale for {}", r.order.id);
                first = false;
                last_seq = r.seq;
                vol += r.order.remaining;
                ++count;
            }
            if (vol != level.volume) return fmt::format("level volume mismatch at {}", price);
        }
        return {};
    };
    if (auto e = check_side(bids_, Side::Buy); !e.empty()) return e;
    if (auto e = check_side(asks_, Side::Sell); !e.empty()) return e;
    if (count != index_.size()) return "index size mismatch";
    if (two_sided() && bids_.begin()->first >= asks_.begin()->first) return "crossed book";
    return {};
}

}  // namespace lobsim
