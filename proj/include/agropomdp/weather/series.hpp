#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "agropomdp/error.hpp"

namespace agro::weather {

/// One day of weather. srad in MJ/m2/d, temperatures in deg C, rain in mm/d.
struct WeatherRecord {
    int day = 0;
    double srad = 0.0;
    double tmax = 0.0;
    double tmin = 0.0;
    double rain = 0.0;

    double mean_temperature() const { return 0.5 * (tmax + tmin); }

    friend bool operator==(const WeatherRecord&, const WeatherRecord&) = default;
};

/// Returns an empty string when the record is valid, otherwise the reason.
inline std::string record_problem(const WeatherRecord& r) {
    if (!std::isfinite(r.srad) || !std::isfinite(r.tmax) || !std::isfinite(r.tmin) || !std::isfinite(r.rain))
        return "non-finite value";
    if (r.tmax < r.tmin) return "tmax " + std::to_string(r.tmax) + " below tmin " + std::to_string(r.tmin);
    if (r.srad < 0.0) return "negative srad";
    if (r.rain < 0.0) return "negative rain";
    return {};
}

/// Immutable, contiguous daily series. Transforms return new series.
class WeatherSeries {
public:
    WeatherSeries() = default;

    WeatherSeries(std::vector<WeatherRecord> records, std::string label)
        : records_(std::move(records)), label_(std::move(label)) {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (auto why = record_problem(records_[i]); !why.empty())
                throw DataError("weather day " + std::to_string(records_[i].day) + ": " + why);
            if (i > 0 && records_[i].day != records_[i - 1].day + 1)
                throw DataError("weather days not contiguous: " + std::to_string(records_[i - 1].day) + " then " +
                                std::to_string(records_[i].day));
        }
    }

    const std::vector<WeatherRecord>& records() const { return records_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const WeatherRecord& operator[](std::size_t i) const { return records_[i]; }

    friend bool operator==(const WeatherSeries&, const WeatherSeries&) = default;

private:
    std::vector<WeatherRecord> records_;
    std::string label_;
};

}  // namespace agro::weather
