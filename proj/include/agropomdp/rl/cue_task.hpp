#pragma once

#include <cstdint>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"

namespace agro::rl {

/// Memory probe. A cue of +1 or -1 is visible in the first observation only;
/// at the last step the agent is paid 1 for choosing the action that matches
/// it (action 1 for +1, action 0 for -1). Observations are [cue or 0, t / (steps - 1)].
class DelayedCueEnv {
public:
    struct StepResult {
        std::vector<double> observation;
        double reward = 0.0;
        bool done = false;
    };

    explicit DelayedCueEnv(std::uint64_t seed, int steps = 5) : rng_(seed), steps_(steps) {
        if (steps < 2) throw ConfigError("delayed cue task needs at least two steps");
    }

    std::vector<double> reset() {
        cue_ = rng_.bernoulli(0.5) ? 1 : -1;
        t_ = 0;
        done_ = false;
        return observation();
    }

    StepResult step(int action) {
        if (done_) throw StateError("step called after the episode finished");
        if (action < 0 || action >= action_count()) throw IndexError("cue task action out of range");
        const bool last = t_ == steps_ - 1;
        const double reward = last && action == (cue_ > 0 ? 1 : 0) ? 1.0 : 0.0;
        ++t_;
        done_ = last;
        return {observation(), reward, done_};
    }

    std::vector<double> observation() const {
        return {t_ == 0 ? static_cast<double>(cue_) : 0.0, static_cast<double>(t_) / (steps_ - 1)};
    }

    static constexpr int action_count() { return 2; }
    static constexpr std::size_t observation_size() { return 2; }
    static constexpr double optimal_return() { return 1.0; }
    int steps() const { return steps_; }
    int cue() const { return cue_; }

private:
    Rng rng_;
    int steps_;
    int cue_ = 1;
    int t_ = 0;
    bool done_ = false;
};

}  // namespace agro::rl
