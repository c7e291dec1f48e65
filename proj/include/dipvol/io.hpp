#pragma once

// Output formatting shared by the CLI and the tests: 12-significant-digit
// scientific numbers (regression-diff stable), CSV with a header row plus a
// configuration-hash comment line, and an FNV-1a content hash for cache keys.

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace dipvol::io {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& s) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
    return buf;
}

struct CsvWriter {
    std::ostringstream out;

    CsvWriter(const std::vector<std::string>& columns, const std::string& config_line) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out << ',';
            out << columns[i];
        }
        out << '\n';
        out << "# config " << hash_hex(config_line) << ' ' << config_line << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ',';
            out << fmt(values[i]);
        }
        out << '\n';
    }

    void raw_row(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out << ',';
            out << values[i];
        }
        out << '\n';
    }

    std::string str() const { return out.str(); }
};

// Round-trip a value through the 12-digit text form so JSON output carries
// exactly the CSV precision.
inline double round12(double v) {
    return std::stod(fmt(v));
}

}  // namespace dipvol::io
