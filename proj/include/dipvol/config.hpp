#pragma once

// Flat key=value run configuration with defaults, file loading, and a
// byte-exact disk cache keyed by a content hash of the resolved request.
// Precedence: command-line flags > config file > defaults.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dipvol/io.hpp"

namespace dipvol::cfg {

struct RunConfig {
    // shared numerics
    double rtol = 1e-12;
    int workers = 0;  // 0 = auto
    // trace / fit
    double xmax_lo = 20.0;
    double xmax_hi = 500.0;
    int points = 50;
    // scan
    double x00_lo = 0.142152;
    double x00_hi = 0.152135;
    int scan_points = 150;
    // output / cache
    std::string format = "csv";  // csv | json
    std::string cache_dir;       // empty = default resolution
    bool cache_enabled = true;
};

inline const std::map<std::string, std::string>& config_keys() {
    static const std::map<std::string, std::string> keys = {
        {"rtol", "real"},        {"workers", "int"},    {"xmax_lo", "real"},
        {"xmax_hi", "real"},     {"points", "int"},     {"x00_lo", "real"},
        {"x00_hi", "real"},      {"scan_points", "int"},{"format", "string"},
        {"cache_dir", "string"}, {"cache_enabled", "bool"},
    };
    return keys;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    auto it = config_keys().find(key);
    if (it == config_keys().end()) throw ConfigError("unknown configuration key: " + key);
    try {
        if (key == "rtol") c.rtol = std::stod(value);
        else if (key == "workers") c.workers = std::stoi(value);
        else if (key == "xmax_lo") c.xmax_lo = std::stod(value);
        else if (key == "xmax_hi") c.xmax_hi = std::stod(value);
        else if (key == "points") c.points = std::stoi(value);
        else if (key == "x00_lo") c.x00_lo = std::stod(value);
        else if (key == "x00_hi") c.x00_hi = std::stod(value);
        else if (key == "scan_points") c.scan_points = std::stoi(value);
        else if (key == "format") {
            if (value != "csv" && value != "json")
                throw ConfigError("format must be csv or json, got: " + value);
            c.format = value;
        } else if (key == "cache_dir") c.cache_dir = value;
        else if (key == "cache_enabled") {
            if (value == "1" || value == "true") c.cache_enabled = true;
            else if (value == "0" || value == "false") c.cache_enabled = false;
            else throw ConfigError("cache_enabled must be a boolean, got: " + value);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for key " + key + ": " + value);
    }
}

// Flat key=value text, '#' comments, blank lines ignored.
inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        auto l = line.find_first_not_of(" \t\r");
        if (l == std::string::npos) continue;
        auto r = line.find_last_not_of(" \t\r");
        line = line.substr(l, r - l + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        apply_key(base, key, value);
    }
    return base;
}

// ---------------------------------------------------------------------------
// byte cache
// ---------------------------------------------------------------------------

inline std::string cache_directory(const RunConfig& c) {
    if (!c.cache_dir.empty()) return c.cache_dir;
    if (const char* env = std::getenv("DIPVOL_CACHE_DIR"); env && *env) return env;
    return ".dipvol-cache";
}

inline std::optional<std::string> cache_lookup(const RunConfig& c, const std::string& request) {
    if (!c.cache_enabled) return std::nullopt;
    const auto path =
        std::filesystem::path(cache_directory(c)) / (io::hash_hex(request) + ".out");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void cache_store(const RunConfig& c, const std::string& request,
                        const std::string& payload) {
    if (!c.cache_enabled) return;
    const auto dir = std::filesystem::path(cache_directory(c));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) return;  // cache is best-effort
    const auto path = dir / (io::hash_hex(request) + ".out");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << payload;
}

}  // namespace dipvol::cfg
