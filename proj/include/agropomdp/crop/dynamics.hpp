#pragma once

#include <algorithm>
#include <cmath>

#include "agropomdp/crop/config.hpp"
#include "agropomdp/crop/state.hpp"
#include "agropomdp/error.hpp"
#include "agropomdp/weather/series.hpp"

namespace agro::crop {

/// Trapezoidal temperature response: 0 below temp_zero_low, ramps to 1 at
/// plateau_low, flat to plateau_high, back to 0 at temp_zero_high.
inline double temperature_response(double mean_temp, const CropParams& p) {
    if (mean_temp <= p.temp_zero_low || mean_temp >= p.temp_zero_high) return 0.0;
    if (mean_temp < p.plateau_low) return (mean_temp - p.temp_zero_low) / (p.plateau_low - p.temp_zero_low);
    if (mean_temp <= p.plateau_high) return 1.0;
    return (p.temp_zero_high - mean_temp) / (p.temp_zero_high - p.plateau_high);
}

inline int stage_for_gdd(double gdd, const CropParams& p) {
    int stage = 1;
    for (double threshold : p.stage_gdd)
        if (gdd >= threshold) ++stage;
    return stage;
}

inline void load_weather(CropState& s, const weather::WeatherRecord& w) {
    s.rain = w.rain;
    s.tmax = w.tmax;
    s.tmin = w.tmin;
    s.srad = w.srad;
}

/// Fresh state on planting day.
inline CropState initial_state(const EnvConfig& cfg, const weather::WeatherRecord& first_day) {
    CropState s;
    s.pltpop = cfg.crop.plant_population;
    s.soil_water = cfg.soil.initial_water_fraction * cfg.soil.water_capacity;
    s.soil_nitrogen = cfg.soil.initial_nitrogen;
    s.biomass = cfg.crop.initial_biomass;
    s.topwt = s.biomass;
    s.xlai = cfg.crop.lai_max * (1.0 - std::exp(-s.biomass / cfg.crop.lai_biomass_scale));
    s.lai_peak = s.xlai;
    s.sw = s.soil_water / cfg.soil.root_zone_depth;
    s.swfac = std::min(1.0, s.soil_water / (cfg.soil.optimal_water_fraction * cfg.soil.water_capacity));
    s.nstres = 1.0;
    s.rtdep = 5.0;
    s.wtdep = cfg.soil.water_table_base * (1.0 - 0.75 * s.soil_water / cfg.soil.water_capacity);
    load_weather(s, first_day);
    return s;
}

/// One day of the surrogate: phenology, water bucket, nitrogen pool, growth.
/// `applied_n` enters the soil before the day's losses are computed.
inline CropState advance_crop(const CropState& prev, const weather::WeatherRecord& w, double applied_n,
                              const EnvConfig& cfg) {
    if (!std::isfinite(w.srad) || !std::isfinite(w.tmax) || !std::isfinite(w.tmin) || !std::isfinite(w.rain))
        throw DataError("non-finite weather on day " + std::to_string(w.day));
    if (!(applied_n >= 0.0) || !std::isfinite(applied_n)) throw DomainError("applied nitrogen must be >= 0");
    const auto& soil = cfg.soil;
    const auto& crop = cfg.crop;

    CropState s = prev;
    load_weather(s, w);
    const double mean_t = w.mean_temperature();
    const bool mature_before = prev.gdd >= crop.maturity_gdd();

    // phenology
    s.dap = prev.dap + 1;
    s.dtt = std::max(0.0, mean_t - crop.base_temperature);
    s.gdd = prev.gdd + s.dtt;
    s.istage = stage_for_gdd(s.gdd, crop);

    // water bucket
    const double cover = 1.0 - std::exp(-crop.extinction * prev.xlai);
    const double demand_t = std::max(0.2, 1.0 + soil.et_temperature_slope * (mean_t - 20.0));
    const double pot_es = soil.et_coefficient * demand_t * w.srad * soil.soil_evaporation_factor * (1.0 - cover);
    const double pot_tr = soil.et_coefficient * demand_t * w.srad * cover;
    const double wet = prev.soil_water + w.rain;
    s.runoff = std::max(0.0, wet - soil.water_capacity);
    const double available = wet - s.runoff;
    const double pot_et = pot_es + pot_tr;
    const double et = std::min(available, pot_et);
    s.es = pot_et > 0.0 ? pot_es * et / pot_et : 0.0;
    s.soil_water = std::clamp(available - et, 0.0, soil.water_capacity);
    s.sw = s.soil_water / soil.root_zone_depth;
    s.swfac = std::min(1.0, s.soil_water / (soil.optimal_water_fraction * soil.water_capacity));
    s.wtdep = soil.water_table_base * (1.0 - 0.75 * s.soil_water / soil.water_capacity);

    // nitrogen pool: application, then leaching, denitrification, uptake
    double n = prev.soil_nitrogen + applied_n;
    s.tleachd = soil.leach_coefficient * (w.rain / (w.rain + soil.leach_half_rain)) * n;
    n -= s.tleachd;
    s.tnoxd = s.soil_water >= soil.denitrification_water_fraction * soil.water_capacity
                  ? soil.denitrification_coefficient * n
                  : 0.0;
    n -= s.tnoxd;
    const double demand = crop.nitrogen_demand[static_cast<std::size_t>(s.istage) - 1];
    s.trnu = std::min(n, demand * std::min(1.0, n / soil.uptake_half_nitrogen));
    n -= s.trnu;
    s.nstres = demand > 0.0 ? std::clamp(s.trnu / demand, 0.0, 1.0) : 1.0;
    s.soil_nitrogen = std::max(0.0, n);

    s.cumsumfert = prev.cumsumfert + applied_n;
    s.cleach = prev.cleach + s.tleachd;
    s.cnox = prev.cnox + s.tnoxd;
    s.wtnup = prev.wtnup + s.trnu;

    // growth
    if (!mature_before) {
        const double growth = crop.radiation_use_efficiency * w.srad * cover * std::min(s.swfac, s.nstres) *
                              temperature_response(mean_t, crop);
        s.biomass = prev.biomass + growth;
    }
    s.topwt = s.biomass;

    // canopy and roots
    if (s.gdd < crop.silking_gdd()) {
        s.xlai = crop.lai_max * (1.0 - std::exp(-s.biomass / crop.lai_biomass_scale));
        s.lai_peak = std::max(prev.lai_peak, s.xlai);
        s.vstage = std::min(20.0, s.gdd / 40.0);
    } else {
        const double frac =
            std::clamp((s.gdd - crop.silking_gdd()) / (crop.maturity_gdd() - crop.silking_gdd()), 0.0, 1.0);
        s.xlai = s.lai_peak * (1.0 - 0.8 * frac);
    }
    s.rtdep = std::min(150.0, 5.0 + 0.15 * s.gdd);
    s.totir = 0.0;
    return s;
}

/// Harvest bookkeeping: grain weight and grain N fraction.
inline void harvest(CropState& s, const EnvConfig& cfg) {
    s.grnwt = cfg.crop.harvest_index * s.biomass;
    s.pcngrn = s.grnwt > 0.0 ? std::min(0.03, 0.6 * s.wtnup / s.grnwt) : 0.0;
}

}  // namespace agro::crop
