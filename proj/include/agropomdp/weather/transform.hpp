#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "agropomdp/error.hpp"
#include "agropomdp/weather/series.hpp"

namespace agro::weather {

/// Uniform temperature shift and rainfall scaling.
struct PerturbationSpec {
    double temperature_shift = 0.0;  // deg C, added to tmax and tmin
    double rain_scale = 1.0;         // in [0, 1]

    void validate() const {
        if (!std::isfinite(temperature_shift)) throw ConfigError("temperature shift must be finite");
        if (!(rain_scale >= 0.0 && rain_scale <= 1.0))
            throw ConfigError("rain scale must lie in [0, 1], got " + std::to_string(rain_scale));
    }

    bool is_identity() const { return temperature_shift == 0.0 && rain_scale == 1.0; }
};

namespace detail {
inline std::string number_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace detail

/// Adds `delta` to tmax and tmin of every day, so the daily mean moves by
/// exactly `delta` and the diurnal range is unchanged.
inline WeatherSeries shift_temperature(const WeatherSeries& s, double delta) {
    if (!std::isfinite(delta)) throw ConfigError("temperature shift must be finite");
    if (delta == 0.0) return s;
    auto records = s.records();
    for (auto& r : records) {
        r.tmax += delta;
        r.tmin += delta;
    }
    return {std::move(records), s.label() + (delta > 0 ? "+" : "") + detail::number_label(delta) + "C"};
}

/// Multiplies every day's rain by `factor` in [0, 1].
inline WeatherSeries scale_rainfall(const WeatherSeries& s, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0))
        throw ConfigError("rainfall factor must lie in [0, 1], got " + std::to_string(factor));
    if (factor == 1.0) return s;
    auto records = s.records();
    for (auto& r : records) r.rain *= factor;
    return {std::move(records), s.label() + "*rain" + detail::number_label(factor)};
}

inline WeatherSeries perturb(const WeatherSeries& s, const PerturbationSpec& p) {
    p.validate();
    return scale_rainfall(shift_temperature(s, p.temperature_shift), p.rain_scale);
}

}  // namespace agro::weather
