// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace gfmud {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
    const std::uint64_t x = parse_u64(key, v);
    if (x > 0xffffffffull) throw ConfigError("config: value out of range for '" + key + "'");
    return static_cast<std::uint32_t>(x);
}

std::int64_t parse_i64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty list item in '" + key + "'");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

} // namespace

Scheme scheme_from_string(const std::string& s) {
    if (s == "rsl") return Scheme::rsl;
    if (s == "ssl") return Scheme::ssl;
    if (s == "csi-gamp") return Scheme::csi_gamp;
    if (s == "oracle-lmmse") return Scheme::oracle_lmmse;
    throw ConfigError("config: unknown scheme '" + s +
                      "' (expected rsl, ssl, csi-gamp or oracle-lmmse)");
}

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::rsl: return "rsl";
    case Scheme::ssl: return "ssl";
    case Scheme::csi_gamp: return "csi-gamp";
    case Scheme::oracle_lmmse: return "oracle-lmmse";
    }
    return "?";
}

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig c; // defaults are the desk scale
    if (name == "desk" || name.empty()) return c;
    if (name == "paper") {
        c.antennas = 40;
        c.slot_len = 256;
        c.active_users = 40;
        c.packet_len = 64;
        c.window_len = 256;
        c.window_step = 64;
        c.guard = 64;
        c.lambda = 0.0005;
        c.stream_chunk = 8192;
        c.packet_budget = 100000;
        c.snr_db = {0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
        return c;
    }
    throw ConfigError("config: unknown scale preset '" + name + "' (expected desk or paper)");
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
    if (key == "scheme") scheme = scheme_from_string(value);
    else if (key == "users") users = parse_u32(key, value);
    else if (key == "antennas") antennas = parse_u32(key, value);
    else if (key == "power") power = parse_double(key, value);
    else if (key == "snr_db") snr_db = parse_double_list(key, value);
    else if (key == "packet_budget") packet_budget = parse_u64(key, value);
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "threads") threads = parse_u32(key, value);
    else if (key == "timings") timings = parse_bool(key, value);
    else if (key == "slot_len") slot_len = parse_u32(key, value);
    else if (key == "code_sparsity") code_sparsity = parse_double(key, value);
    else if (key == "active_users") active_users = parse_u32(key, value);
    else if (key == "restarts") restarts = parse_u32(key, value);
    else if (key == "zero_threshold") zero_threshold = parse_double(key, value);
    else if (key == "packet_len") packet_len = parse_u32(key, value);
    else if (key == "window_len") window_len = parse_u32(key, value);
    else if (key == "window_step") window_step = parse_u32(key, value);
    else if (key == "lambda") lambda = parse_double(key, value);
    else if (key == "guard") guard = parse_u32(key, value);
    else if (key == "stream_chunk") stream_chunk = parse_i64(key, value);
    else if (key == "extra_rows") extra_rows = parse_u32(key, value);
    else if (key == "max_iters") max_iters = parse_u32(key, value);
    else if (key == "engine_tol") engine_tol = parse_double(key, value);
    else if (key == "step_min") step_min = parse_double(key, value);
    else if (key == "step_max") step_max = parse_double(key, value);
    else if (key == "step_grow") step_grow = parse_double(key, value);
    else if (key == "outer_rounds") outer_rounds = parse_u32(key, value);
    else if (key == "turbo_trials") turbo_trials = parse_u32(key, value);
    else if (key == "early_exit") early_exit = parse_bool(key, value);
    else if (key == "prior_h_var") prior_h_var = parse_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

void ExperimentConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": empty key or value");
        apply(key, value);
    }
}

void ExperimentConfig::validate() const {
    if (packet_budget < 1) throw ConfigError("config: packet_budget must be >= 1");
    if (snr_db.empty()) throw ConfigError("config: snr_db grid must be non-empty");
    if (users < 1) throw ConfigError("config: users must be >= 1");
    if (antennas < 1) throw ConfigError("config: antennas must be >= 1");
    if (!(power > 0.0)) throw ConfigError("config: power must be > 0");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    const Constellation cst = Constellation::qpsk();
    if (!stream_scheme()) {
        if (slot_len < 2) throw ConfigError("config: slot_len must be >= 2");
        if (!(code_sparsity > 0.0) || code_sparsity > 1.0)
            throw ConfigError("config: code_sparsity must be in (0, 1]");
        if (active_users < 1 || active_users > users)
            throw ConfigError("config: active_users must be in [1, users]");
        if (restarts < 1) throw ConfigError("config: restarts must be >= 1");
        RslCodecConfig ccfg;
        try {
            ccfg = RslCodecConfig::make(slot_len, code_sparsity, users);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (rsl_capacity_bits(ccfg, cst) < id_bits(users))
            throw ConfigError("config: slot capacity below the user id field");
    } else {
        if (packet_len < 2) throw ConfigError("config: packet_len must be >= 2");
        try {
            WindowSchedule{window_len, window_step}.validate(packet_len);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (!(lambda > 0.0) || lambda > 1.0)
            throw ConfigError("config: lambda must be in (0, 1]");
        if (stream_chunk < static_cast<std::int64_t>(window_len))
            throw ConfigError("config: stream_chunk must cover at least one window");
        if (ssl_capacity_bits(packet_len, cst) < id_bits(users))
            throw ConfigError("config: packet capacity below the user id field");
    }
    if (max_iters < 1) throw ConfigError("config: max_iters must be >= 1");
    if (!(engine_tol > 0.0)) throw ConfigError("config: engine_tol must be > 0");
    if (!(step_min > 0.0) || step_min > 1.0)
        throw ConfigError("config: step_min must be in (0, 1]");
    if (!(step_max > 0.0) || step_max > 1.0)
        throw ConfigError("config: step_max must be in (0, 1]");
    if (!(step_grow > 1.0))
        throw ConfigError("config: step_grow must be > 1");
    if (outer_rounds < 1) throw ConfigError("config: outer_rounds must be >= 1");
    if (turbo_trials < 1) throw ConfigError("config: turbo_trials must be >= 1");
    if (!(prior_h_var > 0.0)) throw ConfigError("config: prior_h_var must be > 0");
}

const char* kMetricCsvHeader =
    "scheme,m,n,lambda,t_slot,l_packet,t_window,dt_window,gamma,snr_db,"
    "packets_sent,packets_recovered,per,per_se,wall_seconds,seed";

std::string to_csv(const MetricRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%s,%u,%u,%.8f,%u,%u,%u,%u,%.6f,%.2f,%llu,%llu,%.8f,%.8f,%.3f,%llu",
                  r.scheme.c_str(), r.m, r.n, r.lambda, r.t_slot, r.l_packet, r.t_window,
                  r.dt_window, r.gamma, r.snr_db,
                  static_cast<unsigned long long>(r.packets_sent),
                  static_cast<unsigned long long>(r.packets_recovered), r.per, r.per_se,
                  r.wall_seconds, static_cast<unsigned long long>(r.seed));
    return buf;
}

double throughput_bits_per_symbol(std::uint32_t n_active, std::uint32_t slot_len, double gamma,
                                  std::uint32_t num_users, std::uint32_t alphabet_size) {
    if (n_active == 0) return 0.0;
    if (slot_len < 2) throw std::invalid_argument("throughput: slot_len must be >= 2");
    const double h = symbol_entropy(gamma, alphabet_size);
    const double support_bits = std::floor(static_cast<double>(slot_len - 1) * h);
    const double id = id_bits(num_users);
    return static_cast<double>(n_active) * (support_bits - id) / static_cast<double>(slot_len);
}

} // namespace gfmud
