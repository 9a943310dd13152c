#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "lobsim/core/types.hpp"

namespace lobsim {

/// One historical limit order, as resampled: depth from the opposite best,
/// volume, and lifetime in steps.
struct LimitPlacement {
    Price depth = 0;
    Qty volume = 0;
    Step duration = 0;

    bool operator==(const LimitPlacement&) const = default;
};

struct BucketOccupancy {
    int spread_bucket = 0;
    int time_bucket = 0;
    std::size_t limit_orders = 0;
    std::size_t market_orders = 0;
};

/// Historical placements bucketed by (spread, time of day). Lookups fall back
/// from the exact bucket to same spread any time, then any spread same time,
/// then the global pool.
class EmpiricalOrderDistribution {
public:
    static constexpr int kSpreadBuckets = 5;  // 1, 2, 3, 4, >=5 ticks
    static constexpr int kMaxTimeBuckets = 48;

    explicit EmpiricalOrderDistribution(int origin_minute = 9 * 60 + 15, int window_minutes = 30);

    static int spread_bucket(Price spread) noexcept;
    int time_bucket(int minute_of_day) const noexcept;
    int origin_minute() const noexcept { return origin_minute_; }
    int window_minutes() const noexcept { return window_minutes_; }

    void add_limit(Price spread, int minute_of_day, LimitPlacement placement);
    void add_market(Price spread, int minute_of_day, Qty volume);
    /// Direct bucket insertion, used when loading a persisted distribution.
    void add_limit_to_bucket(int spread_bucket, int time_bucket, LimitPlacement placement);
    void add_market_to_bucket(int spread_bucket, int time_bucket, Qty volume);

    /// Throws DomainError when a pool resolves to nothing.
    const std::vector<LimitPlacement>& limit_pool(Price spread, int minute_of_day) const;
    const std::vector<Qty>& market_pool(Price spread, int minute_of_day) const;

    bool has_limits() const noexcept { return !global_.limits.empty(); }
    bool has_markets() const noexcept { return !global_.markets.empty(); }
    std::size_t limit_count() const noexcept { return global_.limits.size(); }
    std::size_t market_count() const noexcept { return global_.markets.size(); }

    std::vector<BucketOccupancy> occupancy() const;

    struct Bucket {
        std::vector<LimitPlacement> limits;
        std::vector<Qty> markets;
    };
    /// Exact buckets keyed by (spread bucket, time bucket), in key order.
    const std::map<std::pair<int, int>, Bucket>& buckets() const noexcept { return exact_; }

private:
    template <class Getter>
    const auto& resolve(int sb, int tb, Getter get) const;

    int origin_minute_;
    int window_minutes_;
    std::map<std::pair<int, int>, Bucket> exact_;
    std::array<Bucket, kSpreadBuckets> by_spread_;
    std::array<Bucket, kMaxTimeBuckets> by_time_;
    Bucket global_;
};

}  // namespace lobsim
