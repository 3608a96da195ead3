#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"

namespace agro::nn {

using Vector = std::vector<double>;

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// y = W x + b
inline void affine(const Matrix& w, std::span<const double> x, std::span<const double> b,
                   std::span<double> y) {
    assert(x.size() == w.cols && y.size() == w.rows && b.size() == w.rows);
    const double* p = w.data.data();
    for (std::size_t i = 0; i < w.rows; ++i, p += w.cols) {
        double acc = b[i];
        for (std::size_t j = 0; j < w.cols; ++j) acc += p[j] * x[j];
        y[i] = acc;
    }
}

/// y += W x
inline void matvec_add(const Matrix& w, std::span<const double> x, std::span<double> y) {
    assert(x.size() == w.cols && y.size() == w.rows);
    const double* p = w.data.data();
    for (std::size_t i = 0; i < w.rows; ++i, p += w.cols) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w.cols; ++j) acc += p[j] * x[j];
        y[i] += acc;
    }
}

/// y += W^T g
inline void matvec_t_add(const Matrix& w, std::span<const double> g, std::span<double> y) {
    assert(g.size() == w.rows && y.size() == w.cols);
    const double* p = w.data.data();
    for (std::size_t i = 0; i < w.rows; ++i, p += w.cols) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        for (std::size_t j = 0; j < w.cols; ++j) y[j] += gi * p[j];
    }
}

/// dW += g x^T, with dW stored flat in row-major order.
inline void outer_add(std::span<double> dw, std::span<const double> g, std::span<const double> x) {
    assert(dw.size() == g.size() * x.size());
    double* p = dw.data();
    for (std::size_t i = 0; i < g.size(); ++i, p += x.size()) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        for (std::size_t j = 0; j < x.size(); ++j) p[j] += gi * x[j];
    }
}

/// One gradient tensor per parameter tensor, flattened, in the owning
/// network's declaration order.
struct GradientBundle {
    std::vector<Vector> tensors;

    void set_zero() {
        for (auto& t : tensors) std::fill(t.begin(), t.end(), 0.0);
    }

    void scale(double s) {
        for (auto& t : tensors)
            for (auto& v : t) v *= s;
    }

    void add(const GradientBundle& other) {
        if (other.tensors.size() != tensors.size()) throw ShapeError("gradient bundles differ in tensor count");
        for (std::size_t k = 0; k < tensors.size(); ++k) {
            if (other.tensors[k].size() != tensors[k].size())
                throw ShapeError("gradient bundles differ in tensor " + std::to_string(k));
            for (std::size_t i = 0; i < tensors[k].size(); ++i) tensors[k][i] += other.tensors[k][i];
        }
    }

    bool all_zero() const {
        for (const auto& t : tensors)
            for (double v : t)
                if (v != 0.0) return false;
        return true;
    }
};

/// Anything that exposes its parameters as a list of flat tensors.
template <class N>
concept ParameterSet = requires(N& n, const N& c) {
    { n.parameters() } -> std::same_as<std::vector<std::span<double>>>;
    { c.parameters() } -> std::same_as<std::vector<std::span<const double>>>;
};

template <ParameterSet N>
GradientBundle zero_gradient(const N& net) {
    GradientBundle g;
    for (auto t : net.parameters()) g.tensors.emplace_back(t.size(), 0.0);
    return g;
}

template <ParameterSet N>
void check_congruent(const N& net, const GradientBundle& g) {
    const auto params = net.parameters();
    if (params.size() != g.tensors.size())
        throw ShapeError("gradient has " + std::to_string(g.tensors.size()) + " tensors, network has " +
                         std::to_string(params.size()));
    for (std::size_t k = 0; k < params.size(); ++k)
        if (params[k].size() != g.tensors[k].size())
            throw ShapeError("gradient tensor " + std::to_string(k) + " has " + std::to_string(g.tensors[k].size()) +
                             " entries, parameter has " + std::to_string(params[k].size()));
}

template <ParameterSet N>
std::size_t parameter_count(const N& net) {
    std::size_t n = 0;
    for (auto t : net.parameters()) n += t.size();
    return n;
}

}  // namespace agro::nn
