#pragma once

// Deterministic table output: fixed number formatting and a header comment
// carrying the config hash and seed.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "imkit/error.hpp"

namespace imkit {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Shortest round-trip text for a double ("%.17g" trimmed by trial).
inline std::string format_double(double v) {
    char buf[32];
    for (int p = 6; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size()) throw ConfigError("CsvTable: row width differs from header");
        rows_.push_back(cells);
    }

    void add_row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(format_double(v));
        add_row(s);
    }

    std::size_t size() const { return rows_.size(); }

    void write(std::ostream& os, const std::string& header_comment = {}) const {
        if (!header_comment.empty()) os << "# " << header_comment << '\n';
        write_line(os, columns_);
        for (const auto& r : rows_) write_line(os, r);
    }

    std::string str(const std::string& header_comment = {}) const {
        std::ostringstream os;
        write(os, header_comment);
        return os.str();
    }

    void save(const std::string& path, const std::string& header_comment = {}) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file: " + path);
        write(f, header_comment);
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string provenance_comment(std::uint64_t config_hash, std::uint64_t seed) {
    return "config_hash=" + hex64(config_hash) + " seed=" + std::to_string(seed);
}

}  // namespace imkit
