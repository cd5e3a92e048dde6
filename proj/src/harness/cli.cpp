// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace gfmud {

namespace {

struct CommonArgs {
    std::string config;
    std::string out = "-";
    std::string scale = "desk";
    std::uint64_t seed = 0;
    std::uint32_t threads = 0;
    bool timings = false;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config, "flat key=value experiment config file");
    sub->add_option("--out", a.out, "output CSV path, - for stdout")->capture_default_str();
    sub->add_option("--scale", a.scale, "scale preset: desk or paper")->capture_default_str();
    a.seed_opt = sub->add_option("--seed", a.seed, "master seed (overrides config)");
    a.threads_opt = sub->add_option("--threads", a.threads, "worker threads (overrides config)");
    sub->add_flag("--timings", a.timings, "measure wall_seconds per row");
}

ExperimentConfig build_config(const CommonArgs& a) {
    ExperimentConfig cfg = ExperimentConfig::preset(a.scale);
    if (!a.config.empty()) cfg.load_file(a.config);
    if (a.seed_opt && a.seed_opt->count() > 0) cfg.seed = a.seed;
    if (a.threads_opt && a.threads_opt->count() > 0) cfg.threads = a.threads;
    if (a.timings) cfg.timings = true;
    return cfg;
}

// "-" streams to stdout.
class CsvSink {
  public:
    explicit CsvSink(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (file_.is_open() && !file_) throw std::runtime_error("output write failed");
    }

  private:
    std::ofstream file_;
};

std::vector<double> parse_gamma_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double g = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(g);
        } catch (const std::exception&) {
            throw ConfigError("config: bad gamma list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: empty gamma list");
    return out;
}

void emit_rows(CsvSink& sink, const std::vector<MetricRow>& rows) {
    sink.stream() << kMetricCsvHeader << "\n";
    for (const auto& r : rows) sink.stream() << to_csv(r) << "\n";
    sink.finish();
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"gfmud: blind multiuser detection workbench for grant-free random access"};
    app.require_subcommand(1);

    CommonArgs rsl_args, ssl_args, pt_args, tc_args, rp_args;

    CLI::App* rsl_cmd = app.add_subcommand("rsl-sweep", "PER vs SNR for the time-slotted scheme");
    add_common(rsl_cmd, rsl_args);

    CLI::App* ssl_cmd =
        app.add_subcommand("ssl-sweep", "PER vs SNR on asynchronous streams");
    add_common(ssl_cmd, ssl_args);
    std::string ssl_scheme = "ssl";
    ssl_cmd->add_option("--scheme", ssl_scheme, "ssl, csi-gamp or oracle-lmmse")
        ->capture_default_str();
    int ssl_extra_rows = -1;
    ssl_cmd->add_option("--extra-rows", ssl_extra_rows,
                        "overestimate the oracle per-window packet count by this many rows");

    CLI::App* pt_cmd = app.add_subcommand(
        "phase-transition", "largest supported N per sparsity at a PER target");
    add_common(pt_cmd, pt_args);
    std::string pt_gammas = "0.05,0.1,0.15,0.2,0.25,0.3,0.4,0.5";
    double per_target = 0.01;
    pt_cmd->add_option("--gammas", pt_gammas, "comma-separated sparsity grid")
        ->capture_default_str();
    pt_cmd->add_option("--per-target", per_target, "PER threshold")->capture_default_str();

    CLI::App* tc_cmd =
        app.add_subcommand("throughput-curve", "effective rate formula over a sparsity grid");
    add_common(tc_cmd, tc_args);
    std::string tc_gammas = "0.05,0.1,0.15,0.2,0.25,0.3,0.4,0.5,0.75,1.0";
    tc_cmd->add_option("--gammas", tc_gammas, "comma-separated sparsity grid")
        ->capture_default_str();

    CLI::App* rp_cmd = app.add_subcommand("replay", "re-run detection on a stored scenario");
    add_common(rp_cmd, rp_args);
    std::string rp_in;
    rp_cmd->add_option("--in", rp_in, "scenario file")->required();
    std::string rp_scheme;
    rp_cmd->add_option("--scheme", rp_scheme, "override the config scheme");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (rsl_cmd->parsed()) {
            ExperimentConfig cfg = build_config(rsl_args);
            cfg.scheme = Scheme::rsl;
            CsvSink sink(rsl_args.out);
            emit_rows(sink, per_sweep(cfg));
        } else if (ssl_cmd->parsed()) {
            ExperimentConfig cfg = build_config(ssl_args);
            cfg.scheme = scheme_from_string(ssl_scheme);
            if (!cfg.stream_scheme())
                throw ConfigError("config: ssl-sweep scheme must be ssl, csi-gamp or oracle-lmmse");
            if (ssl_extra_rows >= 0) cfg.extra_rows = static_cast<std::uint32_t>(ssl_extra_rows);
            CsvSink sink(ssl_args.out);
            emit_rows(sink, per_sweep(cfg));
        } else if (pt_cmd->parsed()) {
            ExperimentConfig cfg = build_config(pt_args);
            cfg.scheme = Scheme::rsl;
            const auto pts = phase_transition(parse_gamma_list(pt_gammas), per_target, cfg);
            CsvSink sink(pt_args.out);
            sink.stream() << "gamma,max_n,throughput_bits_per_symbol\n";
            char buf[128];
            for (const auto& p : pts) {
                std::snprintf(buf, sizeof buf, "%.6f,%u,%.6f", p.gamma, p.max_n, p.throughput);
                sink.stream() << buf << "\n";
            }
            sink.finish();
        } else if (tc_cmd->parsed()) {
            ExperimentConfig cfg = build_config(tc_args);
            cfg.scheme = Scheme::rsl;
            cfg.validate();
            const auto gammas = parse_gamma_list(tc_gammas);
            CsvSink sink(tc_args.out);
            sink.stream() << "gamma,n,t_slot,users,throughput_bits_per_symbol\n";
            char buf[160];
            for (double g : gammas) {
                const double tp =
                    throughput_bits_per_symbol(cfg.active_users, cfg.slot_len, g, cfg.users);
                std::snprintf(buf, sizeof buf, "%.6f,%u,%u,%u,%.6f", g, cfg.active_users,
                              cfg.slot_len, cfg.users, tp);
                sink.stream() << buf << "\n";
            }
            sink.finish();
        } else if (rp_cmd->parsed()) {
            ExperimentConfig cfg = build_config(rp_args);
            if (!rp_scheme.empty()) cfg.scheme = scheme_from_string(rp_scheme);
            const MetricRow row = replay_file(rp_in, cfg);
            CsvSink sink(rp_args.out);
            emit_rows(sink, {row});
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace gfmud
