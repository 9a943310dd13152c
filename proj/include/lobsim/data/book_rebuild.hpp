#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lobsim/core/session.hpp"
#include "lobsim/data/tick_data.hpp"
#include "lobsim/lob/order_book.hpp"

namespace lobsim {

/// A historical limit order annotated for placement resampling. Depth is
/// measured from the opposite best: buy depth below the best ask, sell depth
/// above the best bid.
struct HistoricalLimitOrder {
    std::int64_t submit_time_ns = 0;
    OrderId order_id = 0;
    Side side = Side::Buy;
    Price price = 0;
    Price depth = 0;
    Qty volume = 0;
    Step duration_steps = 0;
    Price spread_at_submit = 0;
    int minute_of_day = 0;
    bool censored = false;      // still resting when the data ended
    bool no_reference = false;  // opposite side empty at submission

    bool operator==(const HistoricalLimitOrder&) const = default;
};

struct HistoricalMarketOrder {
    std::int64_t time_ns = 0;
    Side side = Side::Buy;
    Qty volume = 0;
    Price spread_at_submit = 0;
    int minute_of_day = 0;

    bool operator==(const HistoricalMarketOrder&) const = default;
};

struct L2Row {
    std::int64_t ts_ns = 0;
    L2Snapshot snapshot;
};

struct RebuildResult {
    std::vector<L2Row> l2;
    std::vector<HistoricalLimitOrder> limit_orders;
    std::vector<HistoricalMarketOrder> market_orders;
    std::vector<OrderId> inconsistent_ids;  // unknown or duplicated references
    Qty traded_volume = 0;
};

/// Replays order-level operations on an aggregated book, emitting one L2
/// snapshot per distinct operation timestamp. Trades sharing a timestamp
/// form one inferred market order, signed by its VWAP against the mid that
/// prevailed before that timestamp.
RebuildResult rebuild_book(std::span<const TickOperation> ops, std::span<const TradeRecord> trades, int step_ms);

/// `ts_ns,bid_px_1..10,bid_qty_1..10,ask_px_1..10,ask_qty_1..10`
void write_l2_csv(const std::string& path, std::span<const L2Row> rows);
std::vector<L2Row> read_l2_csv(const std::string& path);

void write_limit_orders_csv(const std::string& path, std::span<const HistoricalLimitOrder> orders);
std::vector<HistoricalLimitOrder> read_limit_orders_csv(const std::string& path);
void write_market_orders_csv(const std::string& path, std::span<const HistoricalMarketOrder> orders);
std::vector<HistoricalMarketOrder> read_market_orders_csv(const std::string& path);

/// Mid and spread at the end of every step of day 0, carrying the last
/// snapshot forward. Steps before the first snapshot take its values.
struct StepSeries {
    std::vector<double> mids;
    std::vector<Price> spreads;
};
StepSeries resample_to_steps(std::span<const L2Row> rows, const SessionCalendar& calendar);

/// First snapshot at which both sides are populated; throws DomainError if
/// the book is never two-sided.
const L2Snapshot& opening_snapshot(std::span<const L2Row> rows);

}  // namespace lobsim
