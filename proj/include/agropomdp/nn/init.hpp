#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "agropomdp/random.hpp"

namespace agro::nn {

/// Scaled-uniform initialisation: U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
inline double scaled_uniform_bound(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

inline void fill_scaled_uniform(std::span<double> w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double bound = scaled_uniform_bound(fan_in, fan_out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
}

}  // namespace agro::nn
