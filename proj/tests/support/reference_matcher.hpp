#pragma once

// Brute-force price-time priority matcher. Keeps every resting order in one
// flat vector and scans it for the best counterparty on every fill.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "lobsim/core/rng.hpp"
#include "lobsim/lob/order_book.hpp"

namespace lobsim::testing {

class ReferenceMatcher {
public:
    std::vector<Trade> submit_limit(const Order& in) {
        if (in.quantity <= 0 || in.price <= 0 || seen(in.id) ||
            (in.expiry_step && *in.expiry_step <= in.submit_step)) {
            return {};
        }
        ids_.push_back(in.id);
        Entry e{in, seq_++};
        e.order.remaining = in.quantity;
        auto trades = cross(e.order, false);
        if (e.order.remaining > 0) book_.push_back(e);
        return trades;
    }

    std::vector<Trade> submit_market(const Order& in) {
        if (in.quantity <= 0 || seen(in.id)) return {};
        ids_.push_back(in.id);
        Order o = in;
        o.remaining = o.quantity;
        return cross(o, true);
    }

    bool cancel(OrderId id) {
        auto it = find(id);
        if (it == book_.end()) return false;
        book_.erase(it);
        return true;
    }

    std::vector<Trade> amend(OrderId id, Qty qty, Price price, Step step) {
        auto it = find(id);
        if (it == book_.end() || qty <= 0 || price <= 0) return {};
        if (price == it->order.price && qty <= it->order.remaining) {
            it->order.quantity -= it->order.remaining - qty;
            it->order.remaining = qty;
            return {};
        }
        Entry e = *it;
        book_.erase(it);
        e.order.quantity = (e.order.quantity - e.order.remaining) + qty;
        e.order.remaining = qty;
        e.order.price = price;
        e.order.submit_step = step;
        e.seq = seq_++;
        auto trades = cross(e.order, false);
        if (e.order.remaining > 0) book_.push_back(e);
        return trades;
    }

    // Expired orders leave in (expiry, id) order.
    std::vector<OrderId> expire(Step step) {
        std::vector<std::pair<Step, OrderId>> due;
        for (const auto& e : book_) {
            if (e.order.expiry_step && *e.order.expiry_step <= step) due.emplace_back(*e.order.expiry_step, e.order.id);
        }
        std::sort(due.begin(), due.end());
        std::vector<OrderId> out;
        for (auto [when, id] : due) {
            cancel(id);
            out.push_back(id);
        }
        return out;
    }

    std::optional<Price> best(Side side) const {
        std::optional<Price> b;
        for (const auto& e : book_) {
            if (e.order.side != side) continue;
            if (!b || (side == Side::Buy ? e.order.price > *b : e.order.price < *b)) b = e.order.price;
        }
        return b;
    }

    Qty volume(Side side) const {
        Qty v = 0;
        for (const auto& e : book_) {
            if (e.order.side == side) v += e.order.remaining;
        }
        return v;
    }

    std::size_t resting() const { return book_.size(); }

    // Resting orders in priority order, bids first.
    std::vector<Order> snapshot() const {
        std::vector<Entry> s = book_;
        std::sort(s.begin(), s.end(), [](const Entry& a, const Entry& b) {
            if (a.order.side != b.order.side) return a.order.side == Side::Buy;
            if (a.order.price != b.order.price) {
                return a.order.side == Side::Buy ? a.order.price > b.order.price : a.order.price < b.order.price;
            }
            return a.seq < b.seq;
        });
        std::vector<Order> out;
        for (const auto& e : s) out.push_back(e.order);
        return out;
    }

private:
    struct Entry {
        Order order;
        std::uint64_t seq = 0;
    };

    bool seen(OrderId id) const { return std::find(ids_.begin(), ids_.end(), id) != ids_.end(); }

    std::vector<Entry>::iterator find(OrderId id) {
        return std::find_if(book_.begin(), book_.end(), [&](const Entry& e) { return e.order.id == id; });
    }

    std::vector<Trade> cross(Order& taker, bool market) {
        std::vector<Trade> trades;
        while (taker.remaining > 0) {
            std::size_t best = book_.size();
            for (std::size_t i = 0; i < book_.size(); ++i) {
                const Order& m = book_[i].order;
                if (m.side == taker.side) continue;
                if (!market && (taker.side == Side::Buy ? m.price > taker.price : m.price < taker.price)) continue;
                if (best == book_.size()) {
                    best = i;
                    continue;
                }
                const Order& b = book_[best].order;
                bool better = taker.side == Side::Buy ? m.price < b.price : m.price > b.price;
                if (better || (m.price == b.price && book_[i].seq < book_[best].seq)) best = i;
            }
            if (best == book_.size()) break;
            Order& m = book_[best].order;
            Qty q = std::min(taker.remaining, m.remaining);
            trades.push_back(Trade{m.price, q, taker.side, m.id, taker.id, m.agent_id, taker.agent_id,
                                   taker.submit_step});
            taker.remaining -= q;
            m.remaining -= q;
            if (m.remaining == 0) book_.erase(book_.begin() + static_cast<std::ptrdiff_t>(best));
        }
        return trades;
    }

    std::vector<Entry> book_;
    std::vector<OrderId> ids_;
    std::uint64_t seq_ = 0;
};

enum class OpKind { Limit, Market, Cancel, Amend, Expire };

struct StreamOp {
    OpKind kind = OpKind::Limit;
    Order order;
    OrderId target = 0;
    Qty qty = 0;
    Price price = 0;
    Step step = 0;
};

/// Random order flow around a price of 100: limits, markets, cancels and
/// amends of earlier ids (some stale), expiries, and a few invalid orders.
inline std::vector<StreamOp> random_stream(std::uint64_t seed, std::size_t max_orders) {
    RandomStream rng(seed);
    std::vector<StreamOp> ops;
    const std::size_t n = 1 + rng.index(max_orders);
    OrderId next = 1;
    Step step = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.3) ++step;
        StreamOp op;
        op.step = step;
        double u = rng.uniform();
        if (u < 0.55 || next == 1) {
            op.kind = OpKind::Limit;
            op.order.id = rng.uniform() < 0.01 && next > 1 ? next - 1 : next++;
            op.order.agent_id = 1 + static_cast<AgentId>(rng.index(5));
            op.order.side = rng.uniform() < 0.5 ? Side::Buy : Side::Sell;
            op.order.price = 95 + static_cast<Price>(rng.index(11));
            op.order.quantity = static_cast<Qty>(rng.index(10)) + (rng.uniform() < 0.01 ? 0 : 1);
            op.order.submit_step = step;
            if (rng.uniform() < 0.3) op.order.expiry_step = step + static_cast<Step>(rng.index(6));
        } else if (u < 0.7) {
            op.kind = OpKind::Market;
            op.order.id = next++;
            op.order.agent_id = 1 + static_cast<AgentId>(rng.index(5));
            op.order.side = rng.uniform() < 0.5 ? Side::Buy : Side::Sell;
            op.order.quantity = 1 + static_cast<Qty>(rng.index(15));
            op.order.kind = OrderKind::Market;
            op.order.submit_step = step;
        } else if (u < 0.85) {
            op.kind = OpKind::Cancel;
            op.target = 1 + static_cast<OrderId>(rng.index(next));
        } else if (u < 0.95) {
            op.kind = OpKind::Amend;
            op.target = 1 + static_cast<OrderId>(rng.index(next));
            op.qty = static_cast<Qty>(rng.index(12));
            op.price = 95 + static_cast<Price>(rng.index(11));
        } else {
            op.kind = OpKind::Expire;
        }
        ops.push_back(op);
    }
    return ops;
}

struct StreamOutcome {
    std::vector<Trade> trades;
    std::vector<Order> resting;
};

inline StreamOutcome run_engine(const std::vector<StreamOp>& ops) {
    OrderBook book;
    StreamOutcome out;
    auto take = [&](const SubmitResult& r) { out.trades.insert(out.trades.end(), r.trades.begin(), r.trades.end()); };
    for (const auto& op : ops) {
        switch (op.kind) {
            case OpKind::Limit: take(book.submit_limit(op.order)); break;
            case OpKind::Market: take(book.submit_market(op.order)); break;
            case OpKind::Cancel: book.cancel(op.target, op.step); break;
            case OpKind::Amend: take(book.amend(op.target, op.qty, op.price, op.step)); break;
            case OpKind::Expire: book.expire_orders(op.step); break;
        }
    }
    book.for_each_resting([&](const Order& o) { out.resting.push_back(o); });
    return out;
}

inline StreamOutcome run_reference(const std::vector<StreamOp>& ops) {
    ReferenceMatcher ref;
    StreamOutcome out;
    auto take = [&](std::vector<Trade> t) { out.trades.insert(out.trades.end(), t.begin(), t.end()); };
    for (const auto& op : ops) {
        switch (op.kind) {
            case OpKind::Limit: take(ref.submit_limit(op.order)); break;
            case OpKind::Market: take(ref.submit_market(op.order)); break;
            case OpKind::Cancel: ref.cancel(op.target); break;
            case OpKind::Amend: take(ref.amend(op.target, op.qty, op.price, op.step)); break;
            case OpKind::Expire: ref.expire(op.step); break;
        }
    }
    out.resting = ref.snapshot();
    return out;
}

inline bool same_resting(const std::vector<Order>& a, const std::vector<Order>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id != b[i].id || a[i].price != b[i].price || a[i].remaining != b[i].remaining ||
            a[i].side != b[i].side) {
            return false;
        }
    }
    return true;
}

}  // namespace lobsim::testing
