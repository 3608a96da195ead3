#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "agropomdp/error.hpp"

namespace agro::experiment {

/// One `key = value` line. `line` is 1-based, 0 for entries that did not come
/// from a file (command-line overrides).
struct Entry {
    std::string key;
    std::string value;
    std::string source;
    int line = 0;

    std::string where() const { return line > 0 ? source + ":" + std::to_string(line) : source; }
};

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Flat `section.key = value` text. `#` starts a comment line; blank lines
/// are skipped. Duplicate keys are an error.
inline std::vector<Entry> parse_key_values(std::istream& is, const std::string& source) {
    std::vector<Entry> out;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        auto text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(source + ":" + std::to_string(line) + ": expected key = value");
        auto key = trim(text.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": missing key");
        for (const auto& e : out)
            if (e.key == key)
                throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + std::string(key) +
                                  "' (first set at line " + std::to_string(e.line) + ")");
        out.push_back({std::string(key), std::string(trim(text.substr(eq + 1))), source, line});
    }
    return out;
}

/// `key=value` from the command line.
inline Entry parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty())
        throw UsageError("override '" + std::string(text) + "' is not key=value");
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), "--set", 0};
}

// Value codecs. Formatting is the shortest round-trip form so a written
// config reads back to identical values.
template <class T>
struct Codec;

template <>
struct Codec<double> {
    static double parse(std::string_view s) {
        double v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ConfigError("expected a number");
        return v;
    }
    static std::string format(double v) {
        std::array<char, 32> buf{};
        auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), p);
    }
};

template <class I>
    requires std::is_integral_v<I> && (!std::is_same_v<I, bool>)
struct Codec<I> {
    static I parse(std::string_view s) {
        I v{};
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw ConfigError("expected an integer");
        return v;
    }
    static std::string format(I v) { return std::to_string(v); }
};

template <>
struct Codec<bool> {
    static bool parse(std::string_view s) {
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw ConfigError("expected true or false");
    }
    static std::string format(bool v) { return v ? "true" : "false"; }
};

template <>
struct Codec<std::string> {
    static std::string parse(std::string_view s) { return std::string(s); }
    static std::string format(const std::string& v) { return v; }
};

inline std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
struct Codec<std::vector<T>> {
    static std::vector<T> parse(std::string_view s) {
        std::vector<T> out;
        for (auto item : split_list(s)) out.push_back(Codec<T>::parse(item));
        return out;
    }
    static std::string format(const std::vector<T>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ',';
            out += Codec<T>::format(v[i]);
        }
        return out;
    }
};

template <class T, std::size_t N>
struct Codec<std::array<T, N>> {
    static std::array<T, N> parse(std::string_view s) {
        const auto items = split_list(s);
        if (items.size() != N)
            throw ConfigError("expected " + std::to_string(N) + " comma-separated values, got " +
                              std::to_string(items.size()));
        std::array<T, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = Codec<T>::parse(items[i]);
        return out;
    }
    static std::string format(const std::array<T, N>& v) {
        return Codec<std::vector<T>>::format(std::vector<T>(v.begin(), v.end()));
    }
};

}  // namespace agro::experiment
