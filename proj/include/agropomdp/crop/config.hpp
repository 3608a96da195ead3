#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "agropomdp/crop/state.hpp"
#include "agropomdp/error.hpp"
#include "agropomdp/weather/series.hpp"

namespace agro::crop {

/// Prices for the reward: w1 per kg yield, w2 per kg applied N, w3 per kg
/// leached N.
struct RewardWeights {
    double w1 = 0.07087;
    double w2 = 0.39;
    double w3 = 1.95;

    static constexpr double kDefaultLeachMultiplier = 5.0;

    /// Published weights for the four study years.
    static RewardWeights for_year(int year) {
        switch (year) {
            case 1965: return {0.03819, 0.26, 1.04};
            case 1980: return {0.07953, 0.49, 1.96};
            case 1999: return {0.07087, 0.39, 1.95};
            case 2020: return {0.1827, 0.87, 3.48};
            default: throw ConfigError("no reward weights for year " + std::to_string(year));
        }
    }

    RewardWeights with_leach_multiplier(double m) const {
        if (!(m >= 0.0) || !std::isfinite(m)) throw ConfigError("leaching multiplier must be >= 0");
        double w = m * w2;
        // 5 * 0.39 is not exactly 1.95; keep the tabulated value when only rounding differs.
        if (std::abs(w - w3) <= 1e-12 * std::max(1.0, std::abs(w3))) w = w3;
        return {w1, w2, w};
    }

    void validate() const {
        for (double w : {w1, w2, w3})
            if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("reward weights must be finite and >= 0");
    }
};

/// Root-zone bucket and mineral nitrogen pool.
struct SoilParams {
    double water_capacity = 300.0;        // mm
    double initial_water_fraction = 0.85;
    double optimal_water_fraction = 0.7;  // swfac = 1 above this fraction of capacity
    double root_zone_depth = 1000.0;      // mm, converts the bucket to volumetric sw
    double et_coefficient = 0.22;         // mm per MJ/m2
    double soil_evaporation_factor = 0.8; // bare-soil share of potential ET
    double et_temperature_slope = 0.03;   // relative ET change per deg C away from 20
    double initial_nitrogen = 40.0;       // kg/ha
    double leach_coefficient = 0.01;      // max daily fraction of soil N leached
    double leach_half_rain = 20.0;        // mm at which leaching is half its max
    double denitrification_coefficient = 0.003;
    double denitrification_water_fraction = 0.9;
    double uptake_half_nitrogen = 20.0;   // kg/ha below which uptake is supply-limited
    double water_table_base = 200.0;      // cm
};

struct CropParams {
    double base_temperature = 10.0;
    double temp_zero_low = 8.0;
    double plateau_low = 18.0;
    double plateau_high = 26.0;
    double temp_zero_high = 40.0;
    double radiation_use_efficiency = 15.0;  // kg/ha biomass per MJ/m2 intercepted
    double extinction = 0.65;
    double harvest_index = 0.5;
    double initial_biomass = 20.0;
    double lai_max = 5.0;
    double lai_biomass_scale = 3000.0;
    double plant_population = 8.0;
    // cumulative GDD at which istage 2..9 begin; stage 9 is physiological maturity
    std::array<double, 8> stage_gdd{50, 250, 480, 750, 900, 1200, 1450, 1550};
    // daily nitrogen demand (kg/ha) by istage 1..9
    std::array<double, 9> nitrogen_demand{0.2, 0.6, 1.5, 2.2, 2.2, 1.5, 0.8, 0.3, 0.0};

    double maturity_gdd() const { return stage_gdd.back(); }
    double silking_gdd() const { return stage_gdd[3]; }
};

/// Per-variable divisors applied when projecting the state to an observation.
inline std::array<double, kStateVariables> default_observation_scale() {
    return {200, 180, 9,  10,  20, 0.4, 40,    40, 20,  5,   //
            50,  10,  20, 5,   10000, 1, 0.03, 150, 20, 30,  //
            1,   2,   1,  20000, 1,  3,   200, 200};
}

struct EnvConfig {
    weather::WeatherSeries weather;
    RewardWeights weights;
    int planting_offset = 20;  // index of planting day in the weather series
    int episode_days = 180;
    SoilParams soil;
    CropParams crop;
    std::array<double, kStateVariables> observation_scale = default_observation_scale();

    void validate() const {
        weights.validate();
        if (planting_offset < 0) throw ConfigError("planting offset must be >= 0");
        if (episode_days <= 0) throw ConfigError("episode length must be positive");
        if (weather.size() < static_cast<std::size_t>(planting_offset + episode_days))
            throw DataError("weather '" + weather.label() + "' has " + std::to_string(weather.size()) +
                            " days, need " + std::to_string(planting_offset + episode_days) +
                            " (planting offset + episode length)");
        const auto& s = soil;
        for (double v : {s.water_capacity, s.root_zone_depth, s.et_coefficient, s.leach_half_rain,
                         s.uptake_half_nitrogen, s.water_table_base, crop.radiation_use_efficiency, crop.extinction,
                         crop.lai_max, crop.lai_biomass_scale, crop.plant_population, crop.initial_biomass})
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("soil and crop parameters must be positive");
        if (!(s.et_temperature_slope >= 0.0)) throw ConfigError("ET temperature slope must be >= 0");
        for (double v : {s.initial_water_fraction, s.optimal_water_fraction, s.soil_evaporation_factor,
                         s.leach_coefficient, s.denitrification_coefficient, s.denitrification_water_fraction,
                         crop.harvest_index})
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("fractional soil/crop parameters must lie in [0, 1]");
        if (s.optimal_water_fraction <= 0.0) throw ConfigError("optimal water fraction must be positive");
        if (!(s.initial_nitrogen >= 0.0)) throw ConfigError("initial soil nitrogen must be >= 0");
        const auto& c = crop;
        if (!(c.temp_zero_low < c.plateau_low && c.plateau_low <= c.plateau_high && c.plateau_high < c.temp_zero_high))
            throw ConfigError("temperature response breakpoints must be increasing");
        for (std::size_t i = 1; i < c.stage_gdd.size(); ++i)
            if (!(c.stage_gdd[i] > c.stage_gdd[i - 1])) throw ConfigError("stage GDD thresholds must increase");
        for (double d : c.nitrogen_demand)
            if (!(d >= 0.0)) throw ConfigError("nitrogen demand must be >= 0");
        for (double d : observation_scale)
            if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("observation scale divisors must be positive");
    }
};

}  // namespace agro::crop
