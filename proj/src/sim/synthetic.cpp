#include "lobsim/sim/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace lobsim {

std::vector<double> u_shape_profile(const SessionCalendar& cal, double u_shape) {
    std::vector<int> minutes;
    for (const auto& w : cal.windows()) {
        for (int m = w.start_minute; m < w.end_minute; ++m) minutes.push_back(m);
    }
    std::vector<double> shape(minutes.size(), 1.0);
    const double n = static_cast<double>(minutes.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < minutes.size(); ++i) {
        double x = (static_cast<double>(i) + 0.5) / n * 2.0 - 1.0;  // -1 at open, +1 at close
        shape[i] = 1.0 + u_shape * x * x;
        sum += shape[i];
    }
    for (double& s : shape) s *= n / sum;
    return shape;
}

MarketModel synthetic_market(const SyntheticSpec& spec) {
    SessionCalendar cal(spec.windows, spec.step_ms);
    MarketModel m{{}, EmpiricalOrderDistribution(cal.open_minute(), 30), spec.impact, {}, {}, 0.0, spec.sigma_v};

    auto shape = u_shape_profile(cal, spec.u_shape);
    std::size_t i = 0;
    const double mean_market_volume = 0.5 * static_cast<double>(spec.market_volume_max + 1);
    for (const auto& w : cal.windows()) {
        for (int minute = w.start_minute; minute < w.end_minute; ++minute, ++i) {
            auto k = static_cast<std::size_t>(minute);
            m.rates.alpha[k] = spec.limit_per_step * shape[i];
            m.rates.mu[k] = spec.market_per_step * shape[i];
            m.rates.market_volume[k] =
                m.rates.mu[k] * static_cast<double>(cal.steps_per_minute()) * mean_market_volume;
        }
    }

    RandomStream rng(derive_seed(spec.seed, 0x5E));
    const double depth_p = 1.0 / std::max(1.0, spec.depth_mean);
    const double life_rate = 1.0 / std::max(1.0, spec.duration_mean);
    for (std::size_t k = 0; k < spec.placement_samples; ++k) {
        int minute = cal.minute_of_day(static_cast<Step>(rng.index(static_cast<std::uint64_t>(cal.steps_per_day()))));
        Price spread = 1 + static_cast<Price>(rng.index(5));
        // Geometric depth on {1, 2, ...} with the requested mean.
        auto depth = 1 + static_cast<Price>(std::floor(rng.exponential(-std::log1p(-depth_p))));
        LimitPlacement lp{depth, 1 + static_cast<Qty>(rng.index(static_cast<std::uint64_t>(spec.limit_volume_max))),
                          std::max<Step>(1, static_cast<Step>(std::ceil(rng.exponential(life_rate))))};
        m.placement.add_limit(spread, minute, lp);
        m.placement.add_market(spread, minute,
                               1 + static_cast<Qty>(rng.index(static_cast<std::uint64_t>(spec.market_volume_max))));
    }

    for (int l = 0; l < spec.open_levels; ++l) {
        m.opening_bids.push_back({spec.open_bid - l, spec.open_level_volume});
        m.opening_asks.push_back({spec.open_ask + l, spec.open_level_volume});
    }
    m.initial_fundamental = 0.0;
    return m;
}

ChiarellaParams synthetic_chiarella() {
    ChiarellaParams p;
    p.kappa = 0.004;
    return p;
}

}  // namespace lobsim
