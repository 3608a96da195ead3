#pragma once

#include <algorithm>
#include <span>

#include "agropomdp/error.hpp"

namespace agro::rl {

inline void check_discount(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("discount factor must lie in [0, 1]");
}

/// sum_t gamma^t r_t
inline double discounted_return(std::span<const double> rewards, double gamma) {
    check_discount(gamma);
    double total = 0.0;
    double weight = 1.0;
    for (double r : rewards) {
        total += weight * r;
        weight *= gamma;
    }
    return total;
}

/// r for terminal transitions, otherwise r + gamma * max(q_next). q_next
/// comes from the target network.
inline double bellman_target(double reward, bool terminal, std::span<const double> q_next, double gamma) {
    if (terminal || gamma == 0.0) return reward;
    if (q_next.empty()) throw ShapeError("bootstrap needs at least one next-state Q value");
    return reward + gamma * *std::max_element(q_next.begin(), q_next.end());
}

/// Index of the largest value; ties go to the lowest index.
inline int argmax(std::span<const double> values) {
    if (values.empty()) throw ShapeError("argmax of an empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

}  // namespace agro::rl
