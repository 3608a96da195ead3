#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/rl/returns.hpp"

namespace agro::rl {

/// Dense Q[s][a] table.
class TabularQ {
public:
    TabularQ(std::size_t states, std::size_t actions, double init = 0.0)
        : states_(states), actions_(actions), q_(states * actions, init) {
        if (states == 0 || actions == 0) throw ConfigError("Q table needs at least one state and one action");
    }

    double at(std::size_t s, std::size_t a) const { return q_[index(s, a)]; }
    double& at(std::size_t s, std::size_t a) { return q_[index(s, a)]; }

    double max_value(std::size_t s) const {
        check_state(s);
        return *std::max_element(q_.begin() + s * actions_, q_.begin() + (s + 1) * actions_);
    }

    int greedy(std::size_t s) const {
        check_state(s);
        return argmax(std::span<const double>(q_.data() + s * actions_, actions_));
    }

    std::size_t states() const { return states_; }
    std::size_t actions() const { return actions_; }
    const std::vector<double>& values() const { return q_; }

private:
    void check_state(std::size_t s) const {
        if (s >= states_) throw IndexError("state " + std::to_string(s) + " out of range");
    }
    std::size_t index(std::size_t s, std::size_t a) const {
        check_state(s);
        if (a >= actions_) throw IndexError("action " + std::to_string(a) + " out of range");
        return s * actions_ + a;
    }

    std::size_t states_, actions_;
    std::vector<double> q_;
};

/// Q(s,a) += alpha [r + gamma max_a' Q(s',a') - Q(s,a)]; the max is 0 for
/// terminal transitions.
inline void tabular_q_update(TabularQ& table, std::size_t s, std::size_t a, double r, std::size_t s_next,
                             bool terminal, double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("learning rate must lie in (0, 1]");
    check_discount(gamma);
    const double bootstrap = terminal ? 0.0 : table.max_value(s_next);
    if (s_next >= table.states()) throw IndexError("next state " + std::to_string(s_next) + " out of range");
    double& q = table.at(s, a);
    q += alpha * (r + gamma * bootstrap - q);
}

/// Finite MDP with deterministic transitions: next[s][a], reward[s][a].
/// Terminal states end the episode after they are entered.
struct FiniteMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<std::size_t> next;  // states * actions
    std::vector<double> reward;     // states * actions
    std::vector<bool> terminal;     // states

    std::size_t successor(std::size_t s, std::size_t a) const { return next[s * actions + a]; }
    double payoff(std::size_t s, std::size_t a) const { return reward[s * actions + a]; }

    void validate() const {
        if (states == 0 || actions == 0) throw ConfigError("MDP needs states and actions");
        if (next.size() != states * actions || reward.size() != states * actions || terminal.size() != states)
            throw ShapeError("MDP tables have inconsistent sizes");
        for (auto n : next)
            if (n >= states) throw IndexError("MDP successor out of range");
    }
};

/// Four-state chain: action 0 steps left, action 1 steps right. Stepping right
/// from the last state pays 1 and stays put; stepping left from the first
/// state pays 0.1.
inline FiniteMdp chain_mdp(std::size_t states = 4) {
    FiniteMdp m;
    m.states = states;
    m.actions = 2;
    m.next.resize(states * 2);
    m.reward.assign(states * 2, 0.0);
    m.terminal.assign(states, false);
    for (std::size_t s = 0; s < states; ++s) {
        m.next[s * 2 + 0] = s == 0 ? 0 : s - 1;
        m.next[s * 2 + 1] = s + 1 == states ? s : s + 1;
    }
    m.reward[0 * 2 + 0] = 0.1;
    m.reward[(states - 1) * 2 + 1] = 1.0;
    return m;
}

/// Seeded random MDP with up to `max_states` states and deterministic moves.
inline FiniteMdp random_mdp(Rng& rng, std::size_t max_states = 16, std::size_t max_actions = 4) {
    FiniteMdp m;
    m.states = 2 + rng.below(max_states - 1);
    m.actions = 2 + rng.below(max_actions - 1);
    m.next.resize(m.states * m.actions);
    m.reward.resize(m.states * m.actions);
    m.terminal.assign(m.states, false);
    for (std::size_t i = 0; i < m.next.size(); ++i) {
        m.next[i] = rng.below(m.states);
        m.reward[i] = rng.uniform(-1.0, 1.0);
    }
    if (rng.bernoulli(0.5)) m.terminal[rng.below(m.states)] = true;
    return m;
}

struct TabularTrainConfig {
    std::uint64_t updates = 50000;
    double gamma = 0.9;
    double alpha_decay_visits = 100.0;  // alpha = 1 / (1 + visits / alpha_decay_visits)
    std::uint64_t episode_length = 20;   // random restart after this many steps
};

/// Q-learning from a uniformly random behaviour policy with random restarts.
inline TabularQ q_learning(const FiniteMdp& mdp, const TabularTrainConfig& cfg, Rng& rng) {
    mdp.validate();
    TabularQ q(mdp.states, mdp.actions);
    std::vector<std::uint64_t> visits(mdp.states * mdp.actions, 0);
    std::size_t s = rng.below(mdp.states);
    std::uint64_t t = 0;
    for (std::uint64_t u = 0; u < cfg.updates; ++u) {
        if (mdp.terminal[s] || t >= cfg.episode_length) {
            s = rng.below(mdp.states);
            t = 0;
        }
        const std::size_t a = rng.below(mdp.actions);
        const std::size_t s2 = mdp.successor(s, a);
        const double alpha = 1.0 / (1.0 + static_cast<double>(visits[s * mdp.actions + a]++) / cfg.alpha_decay_visits);
        tabular_q_update(q, s, a, mdp.payoff(s, a), s2, mdp.terminal[s2], alpha, cfg.gamma);
        s = s2;
        ++t;
    }
    return q;
}

/// Q* of a finite MDP by synchronous value iteration, flattened [s * actions + a].
inline std::vector<double> value_iteration(const FiniteMdp& mdp, double gamma, double tolerance = 1e-12) {
    mdp.validate();
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("value iteration needs a discount in [0, 1)");
    std::vector<double> q(mdp.states * mdp.actions, 0.0), next(q.size());
    auto value = [&](std::size_t s) {
        if (mdp.terminal[s]) return 0.0;
        return *std::max_element(q.begin() + s * mdp.actions, q.begin() + (s + 1) * mdp.actions);
    };
    for (;;) {
        double delta = 0.0;
        for (std::size_t s = 0; s < mdp.states; ++s)
            for (std::size_t a = 0; a < mdp.actions; ++a) {
                const auto i = s * mdp.actions + a;
                next[i] = mdp.payoff(s, a) + gamma * value(mdp.successor(s, a));
                delta = std::max(delta, std::abs(next[i] - q[i]));
            }
        q.swap(next);
        if (delta <= tolerance) return q;
    }
}

}  // namespace agro::rl
