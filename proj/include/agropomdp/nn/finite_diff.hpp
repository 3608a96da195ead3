#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/tensor.hpp"

namespace agro::nn {

/// Central-difference gradient of a scalar loss over every parameter.
/// Test oracle for the analytic reverse pass.
template <ParameterSet N, class Loss>
GradientBundle finite_diff_grad(const N& net, Loss&& loss, double h = 1e-5) {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
    N probe = net;
    GradientBundle g = zero_gradient(net);
    auto params = probe.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t i = 0; i < params[k].size(); ++i) {
            const double saved = params[k][i];
            params[k][i] = saved + h;
            const double up = loss(std::as_const(probe));
            params[k][i] = saved - h;
            const double down = loss(std::as_const(probe));
            params[k][i] = saved;
            g.tensors[k][i] = (up - down) / (2.0 * h);
        }
    }
    return g;
}

/// max |a - b| / max(|a|, |b|, floor) over all entries. The floor keeps
/// entries that are zero on both sides from dividing by zero.
inline double max_relative_error(const GradientBundle& a, const GradientBundle& b, double floor = 1e-6) {
    if (a.tensors.size() != b.tensors.size()) throw ShapeError("gradient bundles differ in tensor count");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.tensors.size(); ++k) {
        if (a.tensors[k].size() != b.tensors[k].size()) throw ShapeError("gradient bundles differ in shape");
        for (std::size_t i = 0; i < a.tensors[k].size(); ++i) {
            const double x = a.tensors[k][i], y = b.tensors[k][i];
            const double denom = std::max({floor, std::abs(x), std::abs(y)});
            worst = std::max(worst, std::abs(x - y) / denom);
        }
    }
    return worst;
}

}  // namespace agro::nn
