#pragma once

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/weather/series.hpp"

namespace agro::weather {

inline constexpr std::string_view kWeatherHeader = "day,srad,tmax,tmin,rain";

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view cell, std::size_t line_no, std::string_view column) {
    T value{};
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError("weather csv row " + std::to_string(line_no) + ": column '" + std::string(column) +
                        "' is not numeric: '" + std::string(cell) + "'");
    return value;
}

}  // namespace detail

/// Parses `day,srad,tmax,tmin,rain` rows. Row numbers in errors are file
/// line numbers (header is line 1).
inline WeatherSeries parse_weather_csv(std::istream& is, std::string label) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("weather csv is empty");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
    if (detail::trim(line) != kWeatherHeader)
        throw DataError("weather csv header must be '" + std::string(kWeatherHeader) + "', got '" + line + "'");

    std::vector<WeatherRecord> records;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_commas(line);
        if (cells.size() != 5)
            throw DataError("weather csv row " + std::to_string(line_no) + ": expected 5 columns, got " +
                            std::to_string(cells.size()));
        WeatherRecord r;
        r.day = detail::parse_number<int>(cells[0], line_no, "day");
        r.srad = detail::parse_number<double>(cells[1], line_no, "srad");
        r.tmax = detail::parse_number<double>(cells[2], line_no, "tmax");
        r.tmin = detail::parse_number<double>(cells[3], line_no, "tmin");
        r.rain = detail::parse_number<double>(cells[4], line_no, "rain");
        if (auto why = record_problem(r); !why.empty())
            throw DataError("weather csv row " + std::to_string(line_no) + ": " + why);
        if (!records.empty() && r.day != records.back().day + 1)
            throw DataError("weather csv row " + std::to_string(line_no) + ": day " + std::to_string(r.day) +
                            " does not follow day " + std::to_string(records.back().day));
        records.push_back(r);
    }
    if (records.empty()) throw DataError("weather csv has no data rows");
    return WeatherSeries(std::move(records), std::move(label));
}

inline WeatherSeries load_weather_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open weather csv: " + path);
    try {
        return parse_weather_csv(is, path);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

/// Shortest round-trip decimal formatting, so write -> parse is lossless.
inline void write_weather_csv(std::ostream& os, const WeatherSeries& s) {
    auto fmt = [](double v) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, p);
    };
    os << kWeatherHeader << '\n';
    for (const auto& r : s.records())
        os << r.day << ',' << fmt(r.srad) << ',' << fmt(r.tmax) << ',' << fmt(r.tmin) << ',' << fmt(r.rain) << '\n';
}

}  // namespace agro::weather
