#pragma once

#include <concepts>
#include <functional>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/rl/agent.hpp"

namespace agro::rl {

/// Anything with reset() returning the first observation and step(action)
/// returning {observation, reward, done}.
template <class E>
concept Environment = requires(E env, int a) {
    { env.reset() } -> std::convertible_to<std::vector<double>>;
    { env.step(a).observation } -> std::convertible_to<std::vector<double>>;
    { env.step(a).reward } -> std::convertible_to<double>;
    { env.step(a).done } -> std::convertible_to<bool>;
};

enum class RunMode { train, eval };

struct EpisodeTrace {
    std::vector<int> actions;
    std::vector<double> rewards;
    double total_reward = 0.0;
    double loss_sum = 0.0;
    int train_steps = 0;

    double mean_loss() const { return train_steps == 0 ? 0.0 : loss_sum / train_steps; }
    friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

/// Resets `env` and plays one episode. Train mode stores every transition and
/// takes a gradient step plus a soft update every `train_every` steps once the
/// replay memory is warm. Eval mode is greedy and leaves the agent untouched.
template <class Net, Environment Env>
EpisodeTrace run_episode(QAgent<Net>& agent, Env& env, RunMode mode, double epsilon, Rng& rng) {
    const auto& cfg = agent.config();
    if (mode == RunMode::eval) epsilon = 0.0;
    EpisodeTrace trace;
    auto window = ObservationSequence::padded(env.reset(), cfg.window);
    for (int t = 0; t < cfg.steps_per_episode; ++t) {
        const int action = agent.select_action(window, epsilon, rng);
        auto result = env.step(action);
        auto next = window.shifted(result.observation);
        trace.actions.push_back(action);
        trace.rewards.push_back(result.reward);
        trace.total_reward += result.reward;
        if (mode == RunMode::train) {
            agent.remember({window, action, result.reward, next, result.done});
            if (agent.warm() && (t + 1) % cfg.train_every == 0) {
                trace.loss_sum += agent.learn();
                ++trace.train_steps;
            }
        }
        window = std::move(next);
        if (result.done) break;
    }
    return trace;
}

struct CurveRow {
    int episode = 0;
    double reward = 0.0;
    double epsilon = 0.0;
    double loss = 0.0;
};

/// Full training run with the configured epsilon schedule. The agent's own
/// random source drives exploration and replay sampling.
template <class Net, Environment Env>
std::vector<CurveRow> train(QAgent<Net>& agent, Env& env, const std::function<void(const CurveRow&)>& on_episode = {}) {
    std::vector<CurveRow> curve;
    const int episodes = agent.config().episodes;
    curve.reserve(static_cast<std::size_t>(episodes));
    for (int ep = 0; ep < episodes; ++ep) {
        const double eps = epsilon_at(agent.config(), ep);
        const auto trace = run_episode(agent, env, RunMode::train, eps, agent.rng());
        curve.push_back({ep, trace.total_reward, eps, trace.mean_loss()});
        if (on_episode) on_episode(curve.back());
    }
    return curve;
}

/// Mean greedy return over `episodes` evaluation rollouts.
template <class Net, Environment Env>
double evaluate(QAgent<Net>& agent, Env& env, int episodes) {
    if (episodes <= 0) throw ConfigError("evaluation needs at least one episode");
    Rng unused(0);
    double sum = 0.0;
    for (int i = 0; i < episodes; ++i) sum += run_episode(agent, env, RunMode::eval, 0.0, unused).total_reward;
    return sum / episodes;
}

}  // namespace agro::rl
