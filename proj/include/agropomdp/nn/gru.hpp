#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/init.hpp"
#include "agropomdp/nn/mlp.hpp"
#include "agropomdp/nn/tensor.hpp"

namespace agro::nn {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Single-layer gated recurrent unit:
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   h~ = tanh(Wh x + Uh (r * h) + bh)
///   h' = (1 - z) * h + z * h~
struct GruCell {
    Matrix wz, uz;
    Vector bz;
    Matrix wr, ur;
    Vector br;
    Matrix wh, uh;
    Vector bh;

    std::size_t input_size() const { return wz.cols; }
    std::size_t hidden_size() const { return wz.rows; }

    static GruCell zeros(std::size_t inputs, std::size_t hidden) {
        if (inputs == 0 || hidden == 0) throw ConfigError("GRU sizes must be positive");
        GruCell c;
        c.wz = c.wr = c.wh = Matrix(hidden, inputs);
        c.uz = c.ur = c.uh = Matrix(hidden, hidden);
        c.bz = c.br = c.bh = Vector(hidden, 0.0);
        return c;
    }

    std::vector<std::span<double>> parameters() {
        return {wz.data, uz.data, bz, wr.data, ur.data, br, wh.data, uh.data, bh};
    }
    std::vector<std::span<const double>> parameters() const {
        return {wz.data, uz.data, bz, wr.data, ur.data, br, wh.data, uh.data, bh};
    }
};

inline constexpr std::size_t kGruTensorCount = 9;

/// Everything one cell application needs for its reverse pass.
struct GruStepTrace {
    Vector x, h_prev, z, r, rh, candidate, h;
};

inline GruStepTrace gru_step(const GruCell& c, std::span<const double> x, std::span<const double> h_prev) {
    const std::size_t n = c.hidden_size();
    GruStepTrace t;
    t.x.assign(x.begin(), x.end());
    t.h_prev.assign(h_prev.begin(), h_prev.end());
    t.z.assign(n, 0.0);
    t.r.assign(n, 0.0);
    affine(c.wz, x, c.bz, t.z);
    matvec_add(c.uz, h_prev, t.z);
    affine(c.wr, x, c.br, t.r);
    matvec_add(c.ur, h_prev, t.r);
    for (std::size_t i = 0; i < n; ++i) {
        t.z[i] = sigmoid(t.z[i]);
        t.r[i] = sigmoid(t.r[i]);
    }
    t.rh.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.rh[i] = t.r[i] * h_prev[i];
    t.candidate.assign(n, 0.0);
    affine(c.wh, x, c.bh, t.candidate);
    matvec_add(c.uh, t.rh, t.candidate);
    t.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        t.candidate[i] = std::tanh(t.candidate[i]);
        t.h[i] = (1.0 - t.z[i]) * h_prev[i] + t.z[i] * t.candidate[i];
    }
    return t;
}

/// Reverse pass through one cell application. Accumulates parameter
/// gradients into grad.tensors[offset .. offset+9) and returns dL/dh_prev.
inline Vector gru_step_backward(const GruCell& c, const GruStepTrace& t, std::span<const double> dh,
                                GradientBundle& grad, std::size_t offset = 0) {
    const std::size_t n = c.hidden_size();
    Vector dh_prev(n, 0.0), da_z(n), da_r(n), da_h(n), d_rh(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double dz = dh[i] * (t.candidate[i] - t.h_prev[i]);
        const double dc = dh[i] * t.z[i];
        dh_prev[i] = dh[i] * (1.0 - t.z[i]);
        da_z[i] = dz * t.z[i] * (1.0 - t.z[i]);
        da_h[i] = dc * (1.0 - t.candidate[i] * t.candidate[i]);
    }
    auto& g = grad.tensors;
    // candidate
    outer_add(g[offset + 6], da_h, t.x);
    outer_add(g[offset + 7], da_h, t.rh);
    for (std::size_t i = 0; i < n; ++i) g[offset + 8][i] += da_h[i];
    matvec_t_add(c.uh, da_h, d_rh);
    for (std::size_t i = 0; i < n; ++i) {
        const double dr = d_rh[i] * t.h_prev[i];
        dh_prev[i] += d_rh[i] * t.r[i];
        da_r[i] = dr * t.r[i] * (1.0 - t.r[i]);
    }
    // update gate
    outer_add(g[offset + 0], da_z, t.x);
    outer_add(g[offset + 1], da_z, t.h_prev);
    for (std::size_t i = 0; i < n; ++i) g[offset + 2][i] += da_z[i];
    matvec_t_add(c.uz, da_z, dh_prev);
    // reset gate
    outer_add(g[offset + 3], da_r, t.x);
    outer_add(g[offset + 4], da_r, t.h_prev);
    for (std::size_t i = 0; i < n; ++i) g[offset + 5][i] += da_r[i];
    matvec_t_add(c.ur, da_r, dh_prev);
    return dh_prev;
}

struct RecurrentSpec {
    std::size_t inputs = 0;
    std::size_t hidden = 64;
    std::vector<std::size_t> head_hidden{256, 256, 256};
    std::size_t outputs = 0;
};

struct RecurrentTrace {
    std::vector<GruStepTrace> steps;
    MlpTrace head;

    bool empty() const { return steps.empty(); }
};

/// GRU over an observation window, final hidden state into a dense head.
/// Each window starts from a zero hidden state.
class RecurrentQNetwork {
public:
    RecurrentQNetwork() = default;

    RecurrentQNetwork(GruCell gru, MlpNetwork head) : gru_(std::move(gru)), head_(std::move(head)) {
        if (head_.input_size() != gru_.hidden_size())
            throw ShapeError("head input size " + std::to_string(head_.input_size()) + " != GRU hidden size " +
                             std::to_string(gru_.hidden_size()));
    }

    static RecurrentQNetwork zeros(const RecurrentSpec& spec) {
        return {GruCell::zeros(spec.inputs, spec.hidden),
                MlpNetwork::zeros({spec.hidden, spec.head_hidden, spec.outputs})};
    }

    static RecurrentQNetwork create(const RecurrentSpec& spec, std::uint64_t seed) {
        Rng rng(seed);
        auto net = zeros(spec);
        auto& c = net.gru_;
        const std::size_t in = spec.inputs, h = spec.hidden;
        for (Matrix* w : {&c.wz, &c.wr, &c.wh}) fill_scaled_uniform(w->data, in, h, rng);
        for (Matrix* u : {&c.uz, &c.ur, &c.uh}) fill_scaled_uniform(u->data, h, h, rng);
        net.head_ = MlpNetwork::create({spec.hidden, spec.head_hidden, spec.outputs}, rng);
        return net;
    }

    std::size_t input_size() const { return gru_.input_size(); }
    std::size_t hidden_size() const { return gru_.hidden_size(); }
    std::size_t output_size() const { return head_.output_size(); }
    const GruCell& gru() const { return gru_; }
    GruCell& gru() { return gru_; }
    const MlpNetwork& head() const { return head_; }
    MlpNetwork& head() { return head_; }

    struct Output {
        Vector q_values;
        Vector hidden;
    };

    Output forward(std::span<const Vector> window) const {
        check_window(window);
        Vector h(hidden_size(), 0.0);
        for (const auto& x : window) h = gru_step(gru_, x, h).h;
        return {head_.forward(h), h};
    }

    RecurrentTrace forward_trace(std::span<const Vector> window) const {
        check_window(window);
        RecurrentTrace trace;
        trace.steps.reserve(window.size());
        Vector h(hidden_size(), 0.0);
        for (const auto& x : window) {
            trace.steps.push_back(gru_step(gru_, x, h));
            h = trace.steps.back().h;
        }
        trace.head = head_.forward_trace(h);
        return trace;
    }

    /// Backpropagation through time across the whole window.
    void backward(const RecurrentTrace& trace, std::span<const double> d_output, GradientBundle& grad) const {
        if (trace.empty() || trace.head.empty()) throw UsageError("backward called without a matching forward trace");
        Vector dh = head_.backward(trace.head, d_output, grad, kGruTensorCount);
        for (std::size_t t = trace.steps.size(); t-- > 0;) dh = gru_step_backward(gru_, trace.steps[t], dh, grad, 0);
    }

    std::vector<std::span<double>> parameters() {
        auto out = gru_.parameters();
        for (auto p : head_.parameters()) out.push_back(p);
        return out;
    }
    std::vector<std::span<const double>> parameters() const {
        auto out = gru_.parameters();
        for (auto p : head_.parameters()) out.push_back(p);
        return out;
    }

    bool same_shape(const RecurrentQNetwork& other) const {
        return input_size() == other.input_size() && hidden_size() == other.hidden_size() &&
               head_.same_shape(other.head_);
    }

private:
    void check_window(std::span<const Vector> window) const {
        if (window.empty()) throw ShapeError("observation window is empty");
        for (std::size_t t = 0; t < window.size(); ++t)
            if (window[t].size() != input_size())
                throw ShapeError("window element " + std::to_string(t) + " has length " +
                                 std::to_string(window[t].size()) + ", expected " + std::to_string(input_size()));
    }

    GruCell gru_;
    MlpNetwork head_;
};

}  // namespace agro::nn
