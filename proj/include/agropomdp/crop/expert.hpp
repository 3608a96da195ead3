#pragma once

#include <string>
#include <vector>

#include "agropomdp/crop/env.hpp"
#include "agropomdp/error.hpp"

namespace agro::crop {

/// Fixed fertiliser plans. Only the season totals (56 and 224 kg/ha) are
/// anchored; the timings are placeholders.
///   1: 56 kg/ha at planting
///   2: 112 kg/ha at planting, 112 kg/ha on day 40
inline std::vector<double> expert_schedule(int variant, int days = 180) {
    std::vector<double> plan(static_cast<std::size_t>(days), 0.0);
    switch (variant) {
        case 1:
            plan.at(0) = 56.0;
            break;
        case 2:
            plan.at(0) = 112.0;
            plan.at(40) = 112.0;
            break;
        default:
            throw ConfigError("unknown expert policy variant " + std::to_string(variant));
    }
    return plan;
}

/// Runs a fixed daily plan to harvest and returns the season summary.
inline EpisodeSummary run_schedule(CropEnv& env, const std::vector<double>& plan) {
    env.reset();
    while (!env.done()) {
        const auto d = static_cast<std::size_t>(env.day());
        env.apply(d < plan.size() ? plan[d] : 0.0);
    }
    return env.summary();
}

}  // namespace agro::crop
