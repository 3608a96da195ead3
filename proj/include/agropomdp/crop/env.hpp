#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agropomdp/crop/config.hpp"
#include "agropomdp/crop/dynamics.hpp"
#include "agropomdp/crop/reward.hpp"
#include "agropomdp/crop/state.hpp"
#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"

namespace agro::crop {

enum class ObservationMode { MDP28, MDP10, POMDP28, POMDP10 };

inline std::size_t observation_size(ObservationMode m) {
    return (m == ObservationMode::MDP10 || m == ObservationMode::POMDP10) ? kObservedVariables : kStateVariables;
}

/// POMDP modes feed an observation window to a recurrent network.
inline bool uses_history(ObservationMode m) { return m == ObservationMode::POMDP10 || m == ObservationMode::POMDP28; }

inline std::string_view to_string(ObservationMode m) {
    switch (m) {
        case ObservationMode::MDP28: return "MDP28";
        case ObservationMode::MDP10: return "MDP10";
        case ObservationMode::POMDP28: return "POMDP28";
        case ObservationMode::POMDP10: return "POMDP10";
    }
    return "?";
}

inline std::optional<ObservationMode> parse_observation_mode(std::string_view s) {
    if (s == "MDP28" || s == "MDP-28") return ObservationMode::MDP28;
    if (s == "MDP10" || s == "MDP-10") return ObservationMode::MDP10;
    if (s == "POMDP28" || s == "POMDP-28") return ObservationMode::POMDP28;
    if (s == "POMDP10" || s == "POMDP-10") return ObservationMode::POMDP10;
    return std::nullopt;
}

/// Projects the state onto the mode's variable subset and divides each
/// component by its scale constant.
inline std::vector<double> observe(const CropState& s, ObservationMode mode,
                                   const std::array<double, kStateVariables>& scale) {
    const auto all = s.variables();
    const std::size_t n = observation_size(mode);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = all[i] / scale[i];
    return out;
}

struct EpisodeSummary {
    double yield = 0;        // kg/ha
    double total_n = 0;      // kg/ha
    double total_leach = 0;  // kg/ha
    double reward = 0;       // undiscounted sum of daily rewards
    std::vector<double> schedule;  // kg/ha applied per day
    std::vector<double> rain;      // mm on each simulated day
};

struct StepResult {
    std::vector<double> observation;
    double reward = 0;
    bool done = false;
};

/// Daily-timestep maize environment. Episodes end at day `episode_days` or
/// at physiological maturity, whichever comes first.
class CropEnv {
public:
    CropEnv(EnvConfig config, ObservationMode mode) : config_(std::move(config)), mode_(mode) {
        config_.validate();
        reset();
    }

    std::vector<double> reset() {
        Rng unused(0);
        return reset(unused);
    }

    /// The surrogate is deterministic; the generator is accepted for interface
    /// symmetry with stochastic environments and left untouched.
    std::vector<double> reset(Rng&) {
        day_ = 0;
        done_ = false;
        state_ = initial_state(config_, config_.weather[static_cast<std::size_t>(config_.planting_offset)]);
        summary_ = EpisodeSummary{};
        return observation();
    }

    StepResult step(int action) { return apply(decode_action(action)); }

    /// Applies an arbitrary amount of nitrogen (expert schedules are not on
    /// the 10 kg/ha action grid).
    StepResult apply(double nitrogen) {
        if (done_) throw StateError("step called after the episode finished");
        const std::size_t idx = static_cast<std::size_t>(config_.planting_offset + day_);
        if (idx >= config_.weather.size()) throw DataError("weather exhausted at day " + std::to_string(day_));
        const auto& w = config_.weather[idx];
        state_ = advance_crop(state_, w, nitrogen, config_);
        ++day_;
        done_ = day_ >= config_.episode_days || state_.gdd >= config_.crop.maturity_gdd();

        std::optional<double> yield;
        if (done_) {
            harvest(state_, config_);
            yield = state_.grnwt;
        }
        const double r = compute_reward(nitrogen, state_.tleachd, yield, config_.weights);
        summary_.total_n += nitrogen;
        summary_.total_leach += state_.tleachd;
        summary_.reward += r;
        summary_.schedule.push_back(nitrogen);
        summary_.rain.push_back(w.rain);
        if (done_) summary_.yield = state_.grnwt;
        else load_weather(state_, config_.weather[idx + 1]);
        return {observation(), r, done_};
    }

    std::vector<double> observation() const { return observe(state_, mode_, config_.observation_scale); }

    const CropState& state() const { return state_; }
    const EpisodeSummary& summary() const { return summary_; }
    const EnvConfig& config() const { return config_; }
    ObservationMode mode() const { return mode_; }
    int day() const { return day_; }
    bool done() const { return done_; }
    std::size_t observation_size() const { return crop::observation_size(mode_); }
    int action_count() const { return kActionCount; }

private:
    EnvConfig config_;
    ObservationMode mode_;
    CropState state_;
    EpisodeSummary summary_;
    int day_ = 0;
    bool done_ = false;
};

}  // namespace agro::crop
