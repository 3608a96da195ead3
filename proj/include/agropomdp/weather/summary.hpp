#pragma once

#include <vector>

#include "agropomdp/weather/series.hpp"

namespace agro::weather {

struct MonthlySummary {
    int month = 0;  // 1-based 30-day bucket
    int days = 0;
    double mean_temperature = 0.0;
    double total_rain = 0.0;
};

/// 30-day buckets in series order; the last bucket may be short.
inline std::vector<MonthlySummary> monthly_summary(const WeatherSeries& s, int month_length = 30) {
    std::vector<MonthlySummary> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int m = static_cast<int>(i) / month_length;
        if (static_cast<int>(out.size()) <= m) out.push_back({m + 1, 0, 0.0, 0.0});
        auto& b = out.back();
        ++b.days;
        b.mean_temperature += s[i].mean_temperature();
        b.total_rain += s[i].rain;
    }
    for (auto& b : out) b.mean_temperature /= b.days;
    return out;
}

}  // namespace agro::weather
