#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "agropomdp/crop/config.hpp"
#include "agropomdp/crop/env.hpp"
#include "agropomdp/error.hpp"
#include "agropomdp/experiment/keyvalue.hpp"
#include "agropomdp/rl/agent.hpp"
#include "agropomdp/weather/csv.hpp"
#include "agropomdp/weather/synth.hpp"
#include "agropomdp/weather/transform.hpp"

namespace agro::experiment {

enum class ModelKind { MDP28, MDP10, POMDP28, POMDP10, tabular_toy, expert1, expert2 };

inline std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::MDP28: return "MDP28";
        case ModelKind::MDP10: return "MDP10";
        case ModelKind::POMDP28: return "POMDP28";
        case ModelKind::POMDP10: return "POMDP10";
        case ModelKind::tabular_toy: return "tabular-toy";
        case ModelKind::expert1: return "expert-1";
        case ModelKind::expert2: return "expert-2";
    }
    return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
    if (auto m = crop::parse_observation_mode(s)) {
        switch (*m) {
            case crop::ObservationMode::MDP28: return ModelKind::MDP28;
            case crop::ObservationMode::MDP10: return ModelKind::MDP10;
            case crop::ObservationMode::POMDP28: return ModelKind::POMDP28;
            case crop::ObservationMode::POMDP10: return ModelKind::POMDP10;
        }
    }
    if (s == "tabular-toy") return ModelKind::tabular_toy;
    if (s == "expert-1") return ModelKind::expert1;
    if (s == "expert-2") return ModelKind::expert2;
    return std::nullopt;
}

inline bool is_learned(ModelKind k) {
    return k == ModelKind::MDP28 || k == ModelKind::MDP10 || k == ModelKind::POMDP28 || k == ModelKind::POMDP10;
}

inline bool is_expert(ModelKind k) { return k == ModelKind::expert1 || k == ModelKind::expert2; }

/// Observation mode of a learned model kind.
inline crop::ObservationMode observation_mode(ModelKind k) {
    switch (k) {
        case ModelKind::MDP28: return crop::ObservationMode::MDP28;
        case ModelKind::MDP10: return crop::ObservationMode::MDP10;
        case ModelKind::POMDP28: return crop::ObservationMode::POMDP28;
        case ModelKind::POMDP10: return crop::ObservationMode::POMDP10;
        default: throw ConfigError("model '" + std::string(to_string(k)) + "' has no observation mode");
    }
}

template <>
struct Codec<ModelKind> {
    static ModelKind parse(std::string_view s) {
        if (auto k = parse_model_kind(s)) return *k;
        throw ConfigError("unknown model '" + std::string(s) +
                          "' (MDP28, MDP10, POMDP28, POMDP10, tabular-toy, expert-1, expert-2)");
    }
    static std::string format(ModelKind k) { return std::string(to_string(k)); }
};

struct ExperimentConfig {
    // experiment.*
    ModelKind model = ModelKind::MDP10;
    std::uint64_t seed = 1;
    int eval_episodes = 1;
    std::string model_path;
    std::vector<ModelKind> models{ModelKind::MDP10, ModelKind::POMDP10};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<double> w3_multipliers{0, 5, 50};
    double rainy_day_mm = 0.0;  // days with rain above this count as rainy

    // weather.*
    std::string weather_source = "synth";  // synth | csv
    std::string weather_path;
    std::uint64_t weather_seed = 1999;
    int weather_days = 204;
    weather::PerturbationSpec perturbation;

    // env.*, soil.*, crop.*
    crop::RewardWeights weights = crop::RewardWeights::for_year(1999);
    int planting_offset = 20;
    int episode_days = 180;
    crop::SoilParams soil;
    crop::CropParams crop;
    std::array<double, crop::kStateVariables> observation_scale = crop::default_observation_scale();

    // agent.*, network.*
    rl::AgentConfig agent = desk_agent();
    std::vector<std::size_t> mlp_hidden{64, 64, 64};
    std::size_t gru_hidden = 32;
    std::vector<std::size_t> head_hidden{64};
    // Greedy check every this many episodes; the best snapshot is kept. 0 keeps the final network.
    int select_every = 5;

    // tabular.*
    std::uint64_t tabular_updates = 50000;
    double tabular_gamma = 0.9;
    std::size_t tabular_states = 4;

    /// Desk-scale agent: 600 episodes with smaller networks, batches and warmup
    /// so a run takes minutes on one core.
    static rl::AgentConfig desk_agent() {
        rl::AgentConfig a;
        a.episodes = 600;
        a.learning_rate = 1e-3;
        a.batch_size = 32;
        a.warmup = 500;
        a.reward_scale = 0.01;
        a.epsilon_end = 0.01;
        return a;
    }

    /// Full-scale settings: 6000 episodes and the large networks.
    void use_full_scale() {
        agent = rl::AgentConfig{};
        mlp_hidden = {256, 256, 256};
        gru_hidden = 64;
        head_hidden = {256, 256, 256};
        select_every = 0;
    }

    void validate() const {
        agent.validate();
        perturbation.validate();
        weights.validate();
        if (eval_episodes <= 0) throw ConfigError("experiment.eval_episodes must be positive");
        if (weather_source != "synth" && weather_source != "csv")
            throw ConfigError("weather.source must be synth or csv, got '" + weather_source + "'");
        if (weather_source == "csv") {
            if (weather_path.empty()) throw ConfigError("weather.source=csv needs weather.path");
            if (!std::filesystem::exists(weather_path))
                throw ConfigError("weather.path '" + weather_path + "' does not exist");
        }
        if (weather_days <= 0) throw ConfigError("weather.days must be positive");
        for (auto h : mlp_hidden)
            if (h == 0) throw ConfigError("network.mlp_hidden sizes must be positive");
        for (auto h : head_hidden)
            if (h == 0) throw ConfigError("network.head_hidden sizes must be positive");
        if (gru_hidden == 0) throw ConfigError("network.gru_hidden must be positive");
        if (select_every < 0) throw ConfigError("agent.select_every must be >= 0");
        for (double m : w3_multipliers)
            if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("experiment.w3_multipliers must be >= 0");
        if (seeds.empty()) throw ConfigError("experiment.seeds must not be empty");
        for (double s : observation_scale)
            if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("env.observation_scale entries must be positive");
        if (tabular_updates == 0) throw ConfigError("tabular.updates must be positive");
        if (tabular_states < 2) throw ConfigError("tabular.states must be at least 2");
        if (!(tabular_gamma >= 0.0 && tabular_gamma < 1.0)) throw ConfigError("tabular.gamma must lie in [0, 1)");
    }
};

struct Binding {
    std::string key;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class Access>
Binding bind(std::string key, Access access) {
    using T = std::remove_cvref_t<decltype(access(std::declval<ExperimentConfig&>()))>;
    return {std::move(key), [access](ExperimentConfig& c, std::string_view v) { access(c) = Codec<T>::parse(v); },
            [access](const ExperimentConfig& c) { return Codec<T>::format(access(c)); }};
}

#define AGRO_KEY(name, member) bind(name, [](auto& c) -> auto& { return c.member; })

/// Every configurable value, in manifest order.
inline const std::vector<Binding>& bindings() {
    static const std::vector<Binding> all = {
        AGRO_KEY("experiment.model", model),
        AGRO_KEY("experiment.seed", seed),
        AGRO_KEY("experiment.eval_episodes", eval_episodes),
        AGRO_KEY("experiment.model_path", model_path),
        AGRO_KEY("experiment.models", models),
        AGRO_KEY("experiment.seeds", seeds),
        AGRO_KEY("experiment.w3_multipliers", w3_multipliers),
        AGRO_KEY("experiment.rainy_day_mm", rainy_day_mm),

        AGRO_KEY("weather.source", weather_source),
        AGRO_KEY("weather.path", weather_path),
        AGRO_KEY("weather.seed", weather_seed),
        AGRO_KEY("weather.days", weather_days),
        AGRO_KEY("weather.temperature_shift", perturbation.temperature_shift),
        AGRO_KEY("weather.rain_scale", perturbation.rain_scale),

        AGRO_KEY("env.w1", weights.w1),
        AGRO_KEY("env.w2", weights.w2),
        AGRO_KEY("env.w3", weights.w3),
        AGRO_KEY("env.planting_offset", planting_offset),
        AGRO_KEY("env.episode_days", episode_days),
        AGRO_KEY("env.observation_scale", observation_scale),

        AGRO_KEY("soil.water_capacity", soil.water_capacity),
        AGRO_KEY("soil.initial_water_fraction", soil.initial_water_fraction),
        AGRO_KEY("soil.optimal_water_fraction", soil.optimal_water_fraction),
        AGRO_KEY("soil.root_zone_depth", soil.root_zone_depth),
        AGRO_KEY("soil.et_coefficient", soil.et_coefficient),
        AGRO_KEY("soil.soil_evaporation_factor", soil.soil_evaporation_factor),
        AGRO_KEY("soil.et_temperature_slope", soil.et_temperature_slope),
        AGRO_KEY("soil.initial_nitrogen", soil.initial_nitrogen),
        AGRO_KEY("soil.leach_coefficient", soil.leach_coefficient),
        AGRO_KEY("soil.leach_half_rain", soil.leach_half_rain),
        AGRO_KEY("soil.denitrification_coefficient", soil.denitrification_coefficient),
        AGRO_KEY("soil.denitrification_water_fraction", soil.denitrification_water_fraction),
        AGRO_KEY("soil.uptake_half_nitrogen", soil.uptake_half_nitrogen),
        AGRO_KEY("soil.water_table_base", soil.water_table_base),

        AGRO_KEY("crop.base_temperature", crop.base_temperature),
        AGRO_KEY("crop.temp_zero_low", crop.temp_zero_low),
        AGRO_KEY("crop.plateau_low", crop.plateau_low),
        AGRO_KEY("crop.plateau_high", crop.plateau_high),
        AGRO_KEY("crop.temp_zero_high", crop.temp_zero_high),
        AGRO_KEY("crop.radiation_use_efficiency", crop.radiation_use_efficiency),
        AGRO_KEY("crop.extinction", crop.extinction),
        AGRO_KEY("crop.harvest_index", crop.harvest_index),
        AGRO_KEY("crop.initial_biomass", crop.initial_biomass),
        AGRO_KEY("crop.lai_max", crop.lai_max),
        AGRO_KEY("crop.lai_biomass_scale", crop.lai_biomass_scale),
        AGRO_KEY("crop.plant_population", crop.plant_population),
        AGRO_KEY("crop.stage_gdd", crop.stage_gdd),
        AGRO_KEY("crop.nitrogen_demand", crop.nitrogen_demand),

        AGRO_KEY("agent.gamma", agent.gamma),
        AGRO_KEY("agent.lr", agent.learning_rate),
        AGRO_KEY("agent.batch_size", agent.batch_size),
        AGRO_KEY("agent.window", agent.window),
        AGRO_KEY("agent.epsilon_start", agent.epsilon_start),
        AGRO_KEY("agent.epsilon_end", agent.epsilon_end),
        AGRO_KEY("agent.epsilon_decay_fraction", agent.epsilon_decay_fraction),
        AGRO_KEY("agent.tau", agent.tau),
        AGRO_KEY("agent.warmup", agent.warmup),
        AGRO_KEY("agent.replay_capacity", agent.replay_capacity),
        AGRO_KEY("agent.episodes", agent.episodes),
        AGRO_KEY("agent.steps_per_episode", agent.steps_per_episode),
        AGRO_KEY("agent.train_every", agent.train_every),
        AGRO_KEY("agent.reward_scale", agent.reward_scale),
        AGRO_KEY("agent.select_every", select_every),

        AGRO_KEY("network.mlp_hidden", mlp_hidden),
        AGRO_KEY("network.gru_hidden", gru_hidden),
        AGRO_KEY("network.head_hidden", head_hidden),

        AGRO_KEY("tabular.updates", tabular_updates),
        AGRO_KEY("tabular.gamma", tabular_gamma),
        AGRO_KEY("tabular.states", tabular_states),
    };
    return all;
}

#undef AGRO_KEY

/// Keys under this prefix are run metadata written into manifests; they are
/// accepted and ignored when a manifest is read back as a config.
inline constexpr std::string_view kManifestPrefix = "manifest.";

inline void apply_entry(ExperimentConfig& cfg, const Entry& e) {
    if (e.key.starts_with(kManifestPrefix)) return;
    for (const auto& b : bindings()) {
        if (b.key != e.key) continue;
        try {
            b.set(cfg, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError(e.where() + ": " + e.key + " = '" + e.value + "': " + err.what());
        }
        return;
    }
    throw ConfigError(e.where() + ": unknown key '" + e.key + "'");
}

inline void apply_entries(ExperimentConfig& cfg, const std::vector<Entry>& entries) {
    for (const auto& e : entries) apply_entry(cfg, e);
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    apply_entries(base, parse_key_values(is, path));
    return base;
}

/// All resolved values, one `key = value` per line, in binding order.
inline void write_config(std::ostream& os, const ExperimentConfig& cfg) {
    std::string_view section;
    for (const auto& b : bindings()) {
        const auto dot = std::string_view(b.key).find('.');
        const auto sec = std::string_view(b.key).substr(0, dot);
        if (!section.empty() && sec != section) os << '\n';
        section = sec;
        os << b.key << " = " << b.get(cfg) << '\n';
    }
}

inline std::string lookup(const ExperimentConfig& cfg, std::string_view key) {
    for (const auto& b : bindings())
        if (b.key == key) return b.get(cfg);
    throw ConfigError("unknown key '" + std::string(key) + "'");
}

/// Weather series after loading or synthesis and perturbation.
inline weather::WeatherSeries build_weather(const ExperimentConfig& cfg) {
    auto base = cfg.weather_source == "csv" ? weather::load_weather_csv(cfg.weather_path)
                                            : weather::synthesize_weather(cfg.weather_seed, cfg.weather_days);
    return weather::perturb(base, cfg.perturbation);
}

inline crop::EnvConfig build_env_config(const ExperimentConfig& cfg) {
    crop::EnvConfig env;
    env.weather = build_weather(cfg);
    env.weights = cfg.weights;
    env.planting_offset = cfg.planting_offset;
    env.episode_days = cfg.episode_days;
    env.soil = cfg.soil;
    env.crop = cfg.crop;
    env.observation_scale = cfg.observation_scale;
    env.validate();
    return env;
}

/// Agent settings for a model kind: feedforward models see only the current
/// observation, so their window is one frame.
inline rl::AgentConfig agent_config_for(const ExperimentConfig& cfg, ModelKind kind) {
    auto a = cfg.agent;
    if (!crop::uses_history(observation_mode(kind))) a.window = 1;
    return a;
}

}  // namespace agro::experiment
