#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "agropomdp/crop/config.hpp"
#include "agropomdp/error.hpp"

namespace agro::crop {

inline constexpr int kActionCount = 21;

/// Action k applies 10k kg/ha; action 0 applies nothing.
inline double decode_action(int index) {
    if (index < 0 || index >= kActionCount)
        throw IndexError("action index " + std::to_string(index) + " outside 0.." + std::to_string(kActionCount - 1));
    return 10.0 * index;
}

/// Daily reward: -w2 N - w3 L, plus w1 Y on harvest day.
inline double compute_reward(double applied_n, double leached, std::optional<double> harvest_yield,
                             const RewardWeights& w) {
    if (!(applied_n >= 0.0) || !(leached >= 0.0) || (harvest_yield && !(*harvest_yield >= 0.0)))
        throw DomainError("reward inputs must be non-negative");
    double r = -w.w2 * applied_n - w.w3 * leached;
    if (harvest_yield) r += w.w1 * *harvest_yield;
    return r;
}

/// Season total in closed form: w1 Y - w2 sum(N) - w3 sum(L).
inline double season_reward(double yield, double total_n, double total_leach, const RewardWeights& w) {
    return w.w1 * yield - w.w2 * total_n - w.w3 * total_leach;
}

}  // namespace agro::crop
