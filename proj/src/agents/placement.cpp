#include "lobsim/agents/placement.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace lobsim {

EmpiricalOrderDistribution::EmpiricalOrderDistribution(int origin_minute, int window_minutes)
    : origin_minute_(origin_minute), window_minutes_(window_minutes) {
    if (window_minutes_ <= 0) throw ConfigError("placement time bucket width must be positive");
}

int EmpiricalOrderDistribution::spread_bucket(Price spread) noexcept {
    if (spread <= 1) return 0;
    if (spread >= 5) return 4;
    return static_cast<int>(spread - 1);
}

int EmpiricalOrderDistribution::time_bucket(int minute_of_day) const noexcept {
    int b = (minute_of_day - origin_minute_) / window_minutes_;
    if (minute_of_day < origin_minute_) b = 0;
    return std::clamp(b, 0, kMaxTimeBuckets - 1);
}

void EmpiricalOrderDistribution::add_limit(Price spread, int minute_of_day, LimitPlacement placement) {
    add_limit_to_bucket(spread_bucket(spread), time_bucket(minute_of_day), placement);
}

void EmpiricalOrderDistribution::add_market(Price spread, int minute_of_day, Qty volume) {
    add_market_to_bucket(spread_bucket(spread), time_bucket(minute_of_day), volume);
}

void EmpiricalOrderDistribution::add_limit_to_bucket(int sb, int tb, LimitPlacement placement) {
    sb = std::clamp(sb, 0, kSpreadBuckets - 1);
    tb = std::clamp(tb, 0, kMaxTimeBuckets - 1);
    exact_[{sb, tb}].limits.push_back(placement);
    by_spread_[static_cast<std::size_t>(sb)].limits.push_back(placement);
    by_time_[static_cast<std::size_t>(tb)].limits.push_back(placement);
    global_.limits.push_back(placement);
}

void EmpiricalOrderDistribution::add_market_to_bucket(int sb, int tb, Qty volume) {
    sb = std::clamp(sb, 0, kSpreadBuckets - 1);
    tb = std::clamp(tb, 0, kMaxTimeBuckets - 1);
    exact_[{sb, tb}].markets.push_back(volume);
    by_spread_[static_cast<std::size_t>(sb)].markets.push_back(volume);
    by_time_[static_cast<std::size_t>(tb)].markets.push_back(volume);
    global_.markets.push_back(volume);
}

template <class Getter>
const auto& EmpiricalOrderDistribution::resolve(int sb, int tb, Getter get) const {
    if (auto it = exact_.find({sb, tb}); it != exact_.end() && !get(it->second).empty()) return get(it->second);
    if (const auto& b = by_spread_[static_cast<std::size_t>(sb)]; !get(b).empty()) return get(b);
    if (const auto& b = by_time_[static_cast<std::size_t>(tb)]; !get(b).empty()) return get(b);
    if (!get(global_).empty()) return get(global_);
    throw DomainError(fmt::format("placement distribution empty for spread bucket {} time bucket {}", sb, tb));
}

const std::vector<LimitPlacement>& EmpiricalOrderDistribution::limit_pool(Price spread, int minute_of_day) const {
    return resolve(spread_bucket(spread), time_bucket(minute_of_day),
                   [](const Bucket& b) -> const std::vector<LimitPlacement>& { return b.limits; });
}

const std::vector<Qty>& EmpiricalOrderDistribution::market_pool(Price spread, int minute_of_day) const {
    return resolve(spread_bucket(spread), time_bucket(minute_of_day),
                   [](const Bucket& b) -> const std::vector<Qty>& { return b.markets; });
}

std::vector<BucketOccupancy> EmpiricalOrderDistribution::occupancy() const {
    std::vector<BucketOccupancy> out;
    for (const auto& [key, b] : exact_) out.push_back({key.first, key.second, b.limits.size(), b.markets.size()});
    return out;
}

}  // namespace lobsim
