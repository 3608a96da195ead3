#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "agropomdp/error.hpp"
#include "agropomdp/experiment/keyvalue.hpp"

namespace agro::experiment {

namespace fs = std::filesystem;

/// Writes through a temporary sibling and renames it over `path`, so readers
/// never observe a partial file.
inline void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body,
                         bool binary = false) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!os) throw DataError("cannot open '" + tmp.string() + "' for writing");
        body(os);
        os.flush();
        if (!os) throw DataError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory '" + dir.string() + "'");
}

inline std::string cell(double v) { return Codec<double>::format(v); }
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(std::string_view s) { return std::string(s); }
inline std::string cell(const char* s) { return s; }
template <class I>
    requires std::is_integral_v<I>
std::string cell(I v) {
    return std::to_string(v);
}

/// In-memory CSV table with a one-line header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    template <class... Ts>
    void add(const Ts&... values) {
        static_assert(sizeof...(Ts) > 0);
        std::vector<std::string> row{cell(values)...};
        if (row.size() != header_.size()) throw ShapeError("csv row width differs from header");
        rows_.push_back(std::move(row));
    }

    void write(std::ostream& os) const {
        line(os, header_);
        for (const auto& r : rows_) line(os, r);
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

    void save(const fs::path& path) const {
        write_atomic(path, [this](std::ostream& os) { write(os); });
    }

    std::size_t size() const { return rows_.size(); }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

private:
    static void line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace agro::experiment
