#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/rl/sequence.hpp"

namespace agro::rl {

/// FIFO experience memory with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 100000) : capacity_(capacity) {
        if (capacity == 0) throw ConfigError("replay capacity must be positive");
    }

    void push(Experience e) {
        if (e.window.empty() || e.next_window.empty()) throw ShapeError("experience window is empty");
        if (!e.window.precedes(e.next_window))
            throw ShapeError("next window is not the current window shifted by one observation");
        if (e.action < 0) throw ShapeError("negative action index in experience");
        if (!std::isfinite(e.reward)) throw ShapeError("non-finite reward in experience");
        if (size() > 0) {
            const auto& ref = items_.front();
            if (ref.window.length() != e.window.length() || ref.window.dimension() != e.window.dimension())
                throw ShapeError("experience window shape differs from the buffer's");
        }
        if (items_.size() < capacity_) {
            items_.push_back(std::move(e));
        } else {
            items_[head_] = std::move(e);
            head_ = (head_ + 1) % capacity_;
        }
    }

    /// Uniform draws with replacement.
    std::vector<const Experience*> sample(std::size_t batch_size, Rng& rng) const {
        if (items_.empty()) throw StateError("cannot sample from an empty replay buffer");
        std::vector<const Experience*> out;
        out.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i) out.push_back(&items_[rng.below(items_.size())]);
        return out;
    }

    /// i-th oldest experience currently held.
    const Experience& at(std::size_t i) const {
        if (i >= items_.size()) throw IndexError("replay index " + std::to_string(i) + " out of range");
        return items_[(head_ + i) % items_.size()];
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // oldest element once full
    std::vector<Experience> items_;
};

}  // namespace agro::rl
