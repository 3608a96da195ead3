#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/nn/adam.hpp"
#include "agropomdp/nn/gru.hpp"
#include "agropomdp/nn/mlp.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/rl/replay.hpp"
#include "agropomdp/rl/returns.hpp"
#include "agropomdp/rl/sequence.hpp"

namespace agro::rl {

struct AgentConfig {
    double gamma = 0.99;
    double learning_rate = 1e-5;
    std::size_t batch_size = 640;
    std::size_t window = 5;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.6;  // of all episodes
    double tau = 0.005;
    std::size_t warmup = 2000;
    std::size_t replay_capacity = 100000;
    int episodes = 6000;
    int steps_per_episode = 180;
    int train_every = 1;        // environment steps per gradient step
    double reward_scale = 1.0;  // applied to rewards inside the TD target only

    void validate() const {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma must lie in [0, 1]");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("agent.lr must be positive");
        if (batch_size == 0) throw ConfigError("agent.batch_size must be positive");
        if (window == 0) throw ConfigError("agent.window must be positive");
        for (double e : {epsilon_start, epsilon_end})
            if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("agent epsilon values must lie in [0, 1]");
        if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
            throw ConfigError("agent.epsilon_decay_fraction must lie in (0, 1]");
        if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("agent.tau must lie in (0, 1]");
        if (warmup == 0) throw ConfigError("agent.warmup must be positive");
        if (replay_capacity == 0) throw ConfigError("agent.replay_capacity must be positive");
        if (episodes <= 0) throw ConfigError("agent.episodes must be positive");
        if (steps_per_episode <= 0) throw ConfigError("agent.steps_per_episode must be positive");
        if (train_every <= 0) throw ConfigError("agent.train_every must be positive");
        if (!(reward_scale > 0.0) || !std::isfinite(reward_scale)) throw ConfigError("agent.reward_scale must be positive");
    }
};

/// Linear decay from epsilon_start to epsilon_end over the first
/// epsilon_decay_fraction of episodes, flat afterwards.
inline double epsilon_at(const AgentConfig& cfg, int episode) {
    const double span = cfg.epsilon_decay_fraction * cfg.episodes;
    const double progress = span <= 0.0 ? 1.0 : std::min(1.0, std::max(0.0, episode / span));
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * progress;
}

// A feedforward network sees only the newest observation of a window.
inline nn::Vector q_values(const nn::MlpNetwork& net, const ObservationSequence& w) {
    return net.forward(w.latest());
}
inline nn::Vector q_values(const nn::RecurrentQNetwork& net, const ObservationSequence& w) {
    return net.forward(w.frames()).q_values;
}

namespace detail {

inline nn::MlpTrace trace(const nn::MlpNetwork& net, const ObservationSequence& w) {
    return net.forward_trace(w.latest());
}
inline nn::RecurrentTrace trace(const nn::RecurrentQNetwork& net, const ObservationSequence& w) {
    return net.forward_trace(w.frames());
}
inline const nn::Vector& output(const nn::MlpTrace& t) { return t.result(); }
inline const nn::Vector& output(const nn::RecurrentTrace& t) { return t.head.result(); }
inline void backward(const nn::MlpNetwork& net, const nn::MlpTrace& t, std::span<const double> d,
                     nn::GradientBundle& g) {
    net.backward(t, d, g);
}
inline void backward(const nn::RecurrentQNetwork& net, const nn::RecurrentTrace& t, std::span<const double> d,
                     nn::GradientBundle& g) {
    net.backward(t, d, g);
}

}  // namespace detail

/// theta_T <- tau * theta_E + (1 - tau) * theta_T
template <class Net>
void soft_update(Net& target, const Net& online, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("soft update rate must lie in (0, 1]");
    if (!target.same_shape(online)) throw ShapeError("soft update between networks of different shape");
    auto dst = target.parameters();
    auto src = online.parameters();
    for (std::size_t k = 0; k < dst.size(); ++k) {
        if (tau == 1.0) {
            std::copy(src[k].begin(), src[k].end(), dst[k].begin());
            continue;
        }
        for (std::size_t i = 0; i < dst[k].size(); ++i) dst[k][i] = tau * src[k][i] + (1.0 - tau) * dst[k][i];
    }
}

/// Deep Q agent: evaluation network, target network, Adam state, replay memory.
template <class Net>
class QAgent {
public:
    QAgent(Net online, AgentConfig config, std::uint64_t seed)
        : config_(config),
          online_(std::move(online)),
          target_(online_),
          adam_(nn::AdamState::for_network(online_, nn::AdamConfig{config.learning_rate})),
          replay_(config.replay_capacity),
          rng_(seed) {
        config_.validate();
    }

    /// Epsilon-greedy. Draws from `rng` only when epsilon > 0, so greedy
    /// rollouts never disturb the caller's stream.
    int select_action(const ObservationSequence& window, double epsilon, Rng& rng) const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
        const auto q = q_values(online_, window);
        if (epsilon > 0.0 && rng.bernoulli(epsilon)) return static_cast<int>(rng.below(q.size()));
        return argmax(q);
    }

    nn::Vector q(const ObservationSequence& window) const { return q_values(online_, window); }

    void remember(Experience e) { replay_.push(std::move(e)); }

    bool warm() const { return replay_.size() >= config_.warmup; }

    /// One Adam step on the evaluation network against targets from the
    /// target network. Returns the mean squared TD error before the step.
    double train_step(std::span<const Experience* const> batch) {
        if (!warm())
            throw StateError("train_step needs " + std::to_string(config_.warmup) + " stored experiences, have " +
                             std::to_string(replay_.size()));
        if (batch.empty()) throw ShapeError("empty training batch");
        auto grad = nn::zero_gradient(online_);
        const double n = static_cast<double>(batch.size());
        double loss = 0.0;
        for (const Experience* e : batch) {
            double target = config_.reward_scale * e->reward;
            if (!e->terminal) {
                const auto q_next = q_values(target_, e->next_window);
                target = bellman_target(target, false, q_next, config_.gamma);
            }
            const auto tr = detail::trace(online_, e->window);
            const auto& q = detail::output(tr);
            if (e->action < 0 || static_cast<std::size_t>(e->action) >= q.size())
                throw IndexError("experience action " + std::to_string(e->action) + " out of range");
            const double err = q[static_cast<std::size_t>(e->action)] - target;
            loss += err * err;
            if (err == 0.0) continue;
            nn::Vector d(q.size(), 0.0);
            d[static_cast<std::size_t>(e->action)] = 2.0 * err / n;
            detail::backward(online_, tr, d, grad);
        }
        if (!grad.all_zero()) nn::adam_step(online_, grad, adam_);
        return loss / n;
    }

    /// Sample a batch from replay, train on it, then soft-update the target.
    double learn() {
        const auto batch = replay_.sample(config_.batch_size, rng_);
        const double loss = train_step(batch);
        soft_update(target_, online_, config_.tau);
        return loss;
    }

    const AgentConfig& config() const { return config_; }
    const Net& online() const { return online_; }
    Net& online() { return online_; }
    const Net& target() const { return target_; }
    Net& target() { return target_; }
    const ReplayBuffer& replay() const { return replay_; }
    const nn::AdamState& adam() const { return adam_; }
    Rng& rng() { return rng_; }

private:
    AgentConfig config_;
    Net online_;
    Net target_;
    nn::AdamState adam_;
    ReplayBuffer replay_;
    Rng rng_;
};

}  // namespace agro::rl
