#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorafair/sim.hpp"

namespace lorafair {

namespace detail {

inline std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    int out = 0;
    try {
        out = std::stoi(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "': not an integer: '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: key '" + key + "': trailing junk in '" + v + "'");
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: key '" + key + "': trailing junk in '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: key '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace detail

// Deployed-set grammar: comma-separated `sf:bw_khz[:cr_n]` entries, e.g.
// "7:125,7:250,8:125" or "7:125:1". cr_n defaults to 1 (coding rate 4/5).
inline std::vector<RateCombo> parse_deployed(const std::string& spec) {
    std::vector<RateCombo> out;
    for (const std::string& item : detail::split(spec, ',')) {
        auto parts = detail::split(item, ':');
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("deployed: entry '" + item + "' is not sf:bw_khz[:cr_n]");
        RateCombo c;
        c.sf = detail::parse_int("deployed", parts[0]);
        c.bw_hz = detail::parse_int("deployed", parts[1]) * 1000;
        c.cr_n = parts.size() == 3 ? detail::parse_int("deployed", parts[2]) : 1;
        if (!valid_sf(c.sf) || !valid_bw(c.bw_hz) || !valid_cr_n(c.cr_n))
            throw std::invalid_argument("deployed: invalid combination '" + item + "'");
        out.push_back(c);
    }
    detail::validate_deployment(out);
    return out;
}

inline NodeDistribution::Kind parse_distribution(const std::string& v) {
    if (v == "uniform") return NodeDistribution::Kind::uniform;
    if (v == "inner") return NodeDistribution::Kind::inner;
    if (v == "middle") return NodeDistribution::Kind::middle;
    if (v == "outer") return NodeDistribution::Kind::outer;
    throw std::invalid_argument("config: unknown distribution '" + v + "'");
}

inline std::string distribution_name(NodeDistribution::Kind k) {
    switch (k) {
        case NodeDistribution::Kind::uniform: return "uniform";
        case NodeDistribution::Kind::inner: return "inner";
        case NodeDistribution::Kind::middle: return "middle";
        case NodeDistribution::Kind::outer: return "outer";
    }
    throw std::logic_error("distribution_name: unreachable");
}

// Applies one key=value pair to the scenario; throws on unknown keys or
// malformed values. Shared by the config-file loader and the sweep axis.
inline void apply_scenario_key(Scenario& sc, const std::string& key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    if (key == "n_nodes") {
        sc.n_nodes = parse_int(key, value);
    } else if (key == "radius_m") {
        sc.radius_m = parse_double(key, value);
    } else if (key == "placement") {
        if (value == "area")
            sc.placement = PlacementMode::area;
        else if (value == "radius")
            sc.placement = PlacementMode::radius;
        else
            throw std::invalid_argument("config: unknown placement '" + value + "'");
    } else if (key == "distribution") {
        sc.distribution.kind = parse_distribution(value);
    } else if (key == "skew_fraction") {
        sc.distribution.skew_fraction = parse_double(key, value);
    } else if (key == "packet_len") {
        sc.packet_len = parse_int(key, value);
    } else if (key == "mean_interval_s") {
        sc.mean_interval_s = parse_double(key, value);
    } else if (key == "sim_time_s") {
        sc.sim_time_s = parse_double(key, value);
    } else if (key == "max_recv") {
        sc.max_recv = parse_int(key, value);
    } else if (key == "channels") {
        sc.channels.clear();
        for (const std::string& c : detail::split(value, ','))
            sc.channels.push_back(parse_double(key, c));
    } else if (key == "strategy") {
        sc.strategy = parse_strategy(value);
    } else if (key == "capture") {
        sc.capture_enabled = parse_bool(key, value);
    } else if (key == "perfect_orthogonality") {
        sc.perfect_orthogonality = parse_bool(key, value);
    } else if (key == "cir_db") {
        sc.cir = CirMatrix(parse_double(key, value));
    } else if (key == "pow_levels") {
        sc.pow_levels.clear();
        for (const std::string& p : detail::split(value, ','))
            sc.pow_levels.push_back(parse_int(key, p));
    } else if (key == "d0_m") {
        sc.propagation.d0_m = parse_double(key, value);
    } else if (key == "pl_d0_db") {
        sc.propagation.pl_d0_db = parse_double(key, value);
    } else if (key == "gamma") {
        sc.propagation.gamma = parse_double(key, value);
    } else if (key == "sigma_db") {
        sc.propagation.sigma_db = parse_double(key, value);
    } else if (key == "sensitivity_mode") {
        if (value == "floor")
            sc.sensitivity.mode = SensitivityMode::floor;
        else if (value == "table")
            sc.sensitivity.mode = SensitivityMode::table;
        else
            throw std::invalid_argument("config: unknown sensitivity_mode '" + value + "'");
    } else if (key == "sensitivity_floor_dbm") {
        sc.sensitivity.floor_dbm = parse_double(key, value);
    } else if (key == "deployed") {
        sc.deployed = parse_deployed(value);
    } else if (key == "bw_weighting") {
        if (value == "linear")
            sc.bw_weighting = BwWeighting::linear;
        else if (value == "quadratic")
            sc.bw_weighting = BwWeighting::quadratic;
        else
            throw std::invalid_argument("config: unknown bw_weighting '" + value + "'");
    } else if (key == "rssi_samples") {
        sc.rssi_samples = parse_int(key, value);
    } else if (key == "preamble_symbols") {
        sc.airtime_opt.preamble_symbols = parse_int(key, value);
    } else if (key == "explicit_header") {
        sc.airtime_opt.explicit_header = parse_bool(key, value);
    } else if (key == "crc_on") {
        sc.airtime_opt.crc_on = parse_bool(key, value);
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

// Loads a flat key=value scenario file. Blank lines and lines starting with
// '#' are ignored; inline comments are not supported.
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    Scenario sc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        apply_scenario_key(sc, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    sc.validate();
    return sc;
}

}  // namespace lorafair
