#pragma once

#include <string>
#include <utility>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/tensor.hpp"

namespace agro::rl {

using nn::Vector;

/// Fixed-length window of observations, oldest first.
class ObservationSequence {
public:
    ObservationSequence() = default;

    explicit ObservationSequence(std::vector<Vector> frames) : frames_(std::move(frames)) {
        if (frames_.empty()) throw ShapeError("observation window must not be empty");
        for (const auto& f : frames_)
            if (f.size() != frames_.front().size()) throw ShapeError("observation window frames differ in length");
    }

    /// Episode start: the first observation repeated to fill the window.
    static ObservationSequence padded(const Vector& first, std::size_t length) {
        if (length == 0) throw ConfigError("window length must be positive");
        return ObservationSequence(std::vector<Vector>(length, first));
    }

    /// Drops the oldest frame and appends `newest`.
    ObservationSequence shifted(const Vector& newest) const {
        if (newest.size() != dimension())
            throw ShapeError("new observation has length " + std::to_string(newest.size()) + ", window holds " +
                             std::to_string(dimension()));
        ObservationSequence next;
        next.frames_.reserve(frames_.size());
        next.frames_.insert(next.frames_.end(), frames_.begin() + 1, frames_.end());
        next.frames_.push_back(newest);
        return next;
    }

    /// True when `next` is this window shifted by one frame.
    bool precedes(const ObservationSequence& next) const {
        if (next.length() != length() || next.dimension() != dimension()) return false;
        for (std::size_t i = 1; i < frames_.size(); ++i)
            if (frames_[i] != next.frames_[i - 1]) return false;
        return true;
    }

    const std::vector<Vector>& frames() const { return frames_; }
    const Vector& latest() const { return frames_.back(); }
    std::size_t length() const { return frames_.size(); }
    std::size_t dimension() const { return frames_.empty() ? 0 : frames_.front().size(); }
    bool empty() const { return frames_.empty(); }

    friend bool operator==(const ObservationSequence&, const ObservationSequence&) = default;

private:
    std::vector<Vector> frames_;
};

struct Experience {
    ObservationSequence window;
    int action = 0;
    double reward = 0.0;
    ObservationSequence next_window;
    bool terminal = false;
};

}  // namespace agro::rl
