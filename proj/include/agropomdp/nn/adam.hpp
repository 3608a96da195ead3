#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/tensor.hpp"

namespace agro::nn {

struct AdamConfig {
    double learning_rate = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First and second moment accumulators, shaped like the parameters.
struct AdamState {
    AdamConfig config;
    std::uint64_t step = 0;
    std::vector<Vector> m;
    std::vector<Vector> v;

    template <ParameterSet N>
    static AdamState for_network(const N& net, AdamConfig cfg = {}) {
        if (!(cfg.learning_rate > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 ||
            cfg.beta2 >= 1.0 || !(cfg.epsilon > 0.0))
            throw ConfigError("invalid Adam hyperparameters");
        AdamState s;
        s.config = cfg;
        for (auto t : net.parameters()) {
            s.m.emplace_back(t.size(), 0.0);
            s.v.emplace_back(t.size(), 0.0);
        }
        return s;
    }
};

/// Bias-corrected Adam update, in place.
template <ParameterSet N>
void adam_step(N& net, const GradientBundle& grads, AdamState& state) {
    auto params = net.parameters();
    check_congruent(net, grads);
    if (state.m.size() != params.size()) throw ShapeError("Adam state does not match network");
    for (std::size_t k = 0; k < params.size(); ++k)
        if (state.m[k].size() != params[k].size()) throw ShapeError("Adam moment " + std::to_string(k) + " mismatched");

    ++state.step;
    const auto& c = state.config;
    const double t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(c.beta1, t);
    const double correct2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto p = params[k];
        const auto& g = grads.tensors[k];
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correct1;
            const double v_hat = v[i] / correct2;
            p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

}  // namespace agro::nn
