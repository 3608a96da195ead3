#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/init.hpp"
#include "agropomdp/nn/tensor.hpp"

namespace agro::nn {

enum class Activation { relu, identity };

inline const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

struct DenseLayer {
    Matrix weight;  // out x in
    Vector bias;    // out
    Activation activation = Activation::identity;

    std::size_t inputs() const { return weight.cols; }
    std::size_t outputs() const { return weight.rows; }
};

/// Layer sizes for a fully connected network. Hidden layers use the
/// rectifier, the output layer is linear.
struct MlpSpec {
    std::size_t inputs = 0;
    std::vector<std::size_t> hidden{256, 256, 256};
    std::size_t outputs = 0;
};

/// Per-sample forward context kept for the backward pass.
struct MlpTrace {
    std::vector<Vector> inputs;  // input to each layer
    std::vector<Vector> outputs; // post-activation output of each layer

    bool empty() const { return inputs.empty(); }
    const Vector& result() const { return outputs.back(); }
};

class MlpNetwork {
public:
    MlpNetwork() = default;

    explicit MlpNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { validate(); }

    /// Zero-valued network with the given shape.
    static MlpNetwork zeros(const MlpSpec& spec) {
        std::vector<std::size_t> sizes{spec.inputs};
        sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
        sizes.push_back(spec.outputs);
        for (auto s : sizes)
            if (s == 0) throw ConfigError("layer sizes must be positive");
        std::vector<DenseLayer> layers;
        for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
            const bool last = k + 2 == sizes.size();
            layers.push_back({Matrix(sizes[k + 1], sizes[k]), Vector(sizes[k + 1], 0.0),
                              last ? Activation::identity : Activation::relu});
        }
        return MlpNetwork(std::move(layers));
    }

    /// Scaled-uniform weights, zero biases. Same seed, same parameters.
    static MlpNetwork create(const MlpSpec& spec, std::uint64_t seed) {
        Rng rng(seed);
        return create(spec, rng);
    }

    static MlpNetwork create(const MlpSpec& spec, Rng& rng) {
        auto net = zeros(spec);
        for (auto& layer : net.layers_)
            fill_scaled_uniform(layer.weight.data, layer.inputs(), layer.outputs(), rng);
        return net;
    }

    std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().inputs(); }
    std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().outputs(); }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    Vector forward(std::span<const double> input) const {
        check_input(input);
        Vector cur(input.begin(), input.end());
        Vector next;
        for (const auto& layer : layers_) {
            next.assign(layer.outputs(), 0.0);
            affine(layer.weight, cur, layer.bias, next);
            activate(layer.activation, next);
            cur.swap(next);
        }
        return cur;
    }

    MlpTrace forward_trace(std::span<const double> input) const {
        check_input(input);
        MlpTrace trace;
        trace.inputs.reserve(layers_.size());
        trace.outputs.reserve(layers_.size());
        Vector cur(input.begin(), input.end());
        for (const auto& layer : layers_) {
            Vector out(layer.outputs(), 0.0);
            affine(layer.weight, cur, layer.bias, out);
            activate(layer.activation, out);
            trace.inputs.push_back(std::move(cur));
            cur = out;
            trace.outputs.push_back(std::move(out));
        }
        return trace;
    }

    /// Reverse pass. Accumulates parameter gradients into `grad` starting at
    /// tensor index `offset` and returns the gradient with respect to the input.
    Vector backward(const MlpTrace& trace, std::span<const double> d_output, GradientBundle& grad,
                    std::size_t offset = 0) const {
        if (trace.empty() || trace.inputs.size() != layers_.size())
            throw UsageError("backward called without a matching forward trace");
        if (d_output.size() != output_size())
            throw ShapeError("output gradient has length " + std::to_string(d_output.size()) + ", expected " +
                             std::to_string(output_size()));
        if (grad.tensors.size() < offset + 2 * layers_.size()) throw ShapeError("gradient bundle too small");
        Vector delta(d_output.begin(), d_output.end());
        for (std::size_t k = layers_.size(); k-- > 0;) {
            const auto& layer = layers_[k];
            if (layer.activation == Activation::relu) {
                const auto& out = trace.outputs[k];
                for (std::size_t i = 0; i < delta.size(); ++i)
                    if (out[i] <= 0.0) delta[i] = 0.0;
            }
            auto& dw = grad.tensors[offset + 2 * k];
            auto& db = grad.tensors[offset + 2 * k + 1];
            outer_add(dw, delta, trace.inputs[k]);
            for (std::size_t i = 0; i < delta.size(); ++i) db[i] += delta[i];
            Vector d_in(layer.inputs(), 0.0);
            matvec_t_add(layer.weight, delta, d_in);
            delta.swap(d_in);
        }
        return delta;
    }

    std::vector<std::span<double>> parameters() {
        std::vector<std::span<double>> out;
        for (auto& l : layers_) {
            out.emplace_back(l.weight.data);
            out.emplace_back(l.bias);
        }
        return out;
    }

    std::vector<std::span<const double>> parameters() const {
        std::vector<std::span<const double>> out;
        for (const auto& l : layers_) {
            out.emplace_back(l.weight.data);
            out.emplace_back(l.bias);
        }
        return out;
    }

    bool same_shape(const MlpNetwork& other) const {
        if (layers_.size() != other.layers_.size()) return false;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto& a = layers_[k];
            const auto& b = other.layers_[k];
            if (a.inputs() != b.inputs() || a.outputs() != b.outputs() || a.activation != b.activation) return false;
        }
        return true;
    }

private:
    static void activate(Activation a, Vector& v) {
        if (a == Activation::relu)
            for (auto& x : v) x = std::max(x, 0.0);
    }

    void check_input(std::span<const double> input) const {
        if (input.size() != input_size())
            throw ShapeError("network expects input of length " + std::to_string(input_size()) + ", got " +
                             std::to_string(input.size()));
    }

    void validate() const {
        if (layers_.empty()) throw ConfigError("network needs at least one layer");
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto& l = layers_[k];
            if (l.inputs() == 0 || l.outputs() == 0) throw ConfigError("layer sizes must be positive");
            if (l.weight.data.size() != l.inputs() * l.outputs() || l.bias.size() != l.outputs())
                throw ShapeError("layer " + std::to_string(k) + " has inconsistent tensor sizes");
            if (k > 0 && layers_[k - 1].outputs() != l.inputs())
                throw ShapeError("layer " + std::to_string(k) + " input size does not match previous output");
        }
    }

    std::vector<DenseLayer> layers_;
};

}  // namespace agro::nn
