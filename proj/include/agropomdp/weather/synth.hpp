#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/random.hpp"
#include "agropomdp/weather/series.hpp"

namespace agro::weather {

/// Seasonal profile for the synthetic generator. Defaults sketch a central
/// Iowa growing season starting April 10; they are not calibrated.
struct ClimateParams {
    int start_day_of_year = 100;
    double annual_mean_temp = 10.0;    // deg C
    double seasonal_amplitude = 14.5;  // deg C
    int warmest_day_of_year = 200;
    double diurnal_range = 11.0;       // deg C, tmax - tmin on a dry day
    double temp_noise_sd = 2.5;        // deg C, AR(1) anomaly
    double temp_noise_persistence = 0.6;
    double p_wet_after_dry = 0.25;
    double p_wet_after_wet = 0.45;
    double mean_rain = 10.0;           // mm per wet day, exponential
    double srad_mean = 17.0;           // MJ/m2/d
    double srad_amplitude = 7.0;
    double cloudy_srad_factor = 0.55;
};

namespace detail {
inline double standard_normal(Rng& rng) {
    // Box-Muller on the toolkit's own uniform stream.
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}
}  // namespace detail

inline WeatherSeries synthesize_weather(std::uint64_t seed, int days, const ClimateParams& p = {}) {
    if (days < 1) throw ConfigError("synthetic weather needs at least one day");
    Rng rng(seed);
    std::vector<WeatherRecord> out;
    out.reserve(static_cast<std::size_t>(days));
    double anomaly = 0.0;
    bool wet = false;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int d = 0; d < days; ++d) {
        const int doy = p.start_day_of_year + d;
        const double season = std::cos(two_pi * (doy - p.warmest_day_of_year) / 365.0);
        anomaly = p.temp_noise_persistence * anomaly +
                  std::sqrt(1.0 - p.temp_noise_persistence * p.temp_noise_persistence) * p.temp_noise_sd *
                      detail::standard_normal(rng);
        wet = rng.bernoulli(wet ? p.p_wet_after_wet : p.p_wet_after_dry);
        double rain = 0.0;
        if (wet) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            rain = -p.mean_rain * std::log(u);
        }
        const double mean_t = p.annual_mean_temp + p.seasonal_amplitude * season + anomaly;
        const double range = std::max(2.0, p.diurnal_range * (wet ? 0.7 : 1.0) + rng.uniform(-1.5, 1.5));
        const double clear = p.srad_mean + p.srad_amplitude * std::cos(two_pi * (doy - 172) / 365.0);
        const double srad = std::max(1.0, clear * (wet ? p.cloudy_srad_factor : 1.0) * rng.uniform(0.85, 1.05));
        WeatherRecord r;
        r.day = d + 1;
        r.srad = srad;
        r.tmax = mean_t + 0.5 * range;
        r.tmin = mean_t - 0.5 * range;
        r.rain = rain;
        out.push_back(r);
    }
    return {std::move(out), "synth-" + std::to_string(seed)};
}

}  // namespace agro::weather
