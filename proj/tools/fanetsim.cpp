// fanetsim: command-line driver for the token-circulation FANET simulator.

#include "fanet/config.hpp"
#include "fanet/error.hpp"
#include "fanet/metrics.hpp"
#include "fanet/phy_link.hpp"
#include "fanet/sim_engine.hpp"
#include "fanet/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace fanet;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string link_model;
    std::string mcs_table;
};

std::string keys_help()
{
    std::ostringstream out;
    out << "Config file keys (flat 'key = value', '#' comments):\n";
    for (const auto& doc : config_key_docs()) {
        out << "  " << doc.key;
        for (auto i = doc.key.size(); i < 22; ++i) out << ' ';
        out << "default " << doc.default_value << ": " << doc.description << '\n';
    }
    return out.str();
}

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("-c,--config", c.config, "scenario file (see key list below)");
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--out-dir", c.out_dir, "directory for CSV output")->envname("FANET_OUT_DIR");
    cmd->add_option("--link-model", c.link_model, "override the link model")
        ->check(CLI::IsMember({"analytic", "threshold"}));
    cmd->add_option("--mcs-table", c.mcs_table, "MCS table file replacing the built-in table");
}

ParsedConfig load(const Common& c)
{
    ParsedConfig parsed;
    if (!c.config.empty()) parsed = load_config(c.config);
    auto& cfg = parsed.scenario;
    if (c.seed) {
        cfg.seed = *c.seed;
        if (parsed.sweep) parsed.sweep->seed_base = *c.seed;
    }
    if (c.link_model == "analytic") cfg.link_model = LinkModelKind::AnalyticBer;
    if (c.link_model == "threshold") cfg.link_model = LinkModelKind::SinrThreshold;
    if (!c.mcs_table.empty()) cfg.mcs_table = McsTable::load(c.mcs_table);
    cfg.validate();
    return parsed;
}

void print_report(std::ostream& out, const RunReport& r)
{
    out << "metric,value\n"
        << "sim_time," << format_double(r.sim_time) << '\n'
        << "throughput_bps," << format_double(r.throughput_bps) << '\n'
        << "received_packet_ratio," << format_double(r.received_packet_ratio) << '\n'
        << "mean_location_error_m," << format_double(r.mean_location_error_m) << '\n'
        << "mean_cache_age_s," << format_double(r.mean_cache_age_s) << '\n'
        << "data_sent," << r.data.sent << '\n'
        << "data_received," << r.data.received << '\n'
        << "data_corrupted," << r.data.corrupted << '\n'
        << "data_collided," << r.data.collided << '\n'
        << "control_sent," << r.control.sent << '\n'
        << "control_received," << r.control.received << '\n'
        << "overheard_received," << r.overheard_received << '\n'
        << "overheard_lost," << r.overheard_lost << '\n'
        << "handshake_aborts," << r.handshake_aborts << '\n'
        << "retransmissions," << r.retransmissions << '\n'
        << "payload_bits_delivered," << r.payload_bits_delivered << '\n';
}

void write_samples(std::ostream& out, const RunReport& r)
{
    out << "time,throughput_bps,received_packet_ratio,location_error_m,cache_age_s\n";
    for (const auto& s : r.samples) {
        out << format_double(s.time) << ',' << format_double(s.throughput_bps) << ','
            << format_double(s.received_packet_ratio) << ',' << format_double(s.location_error_m)
            << ',' << format_double(s.cache_age_s) << '\n';
    }
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    return f;
}

int cmd_table(const std::string& mcs_table)
{
    const McsTable table = mcs_table.empty() ? McsTable::builtin() : McsTable::load(mcs_table);
    std::cout << table.to_text();
    return 0;
}

int cmd_run(const Common& c)
{
    const auto parsed = load(c);
    if (!c.out_dir.empty()) ensure_writable_dir(c.out_dir);
    const RunReport report = run(parsed.scenario);
    print_report(std::cout, report);
    if (!c.out_dir.empty()) {
        auto f = open_out(fs::path(c.out_dir) / "run.csv");
        print_report(f, report);
        auto s = open_out(fs::path(c.out_dir) / "samples.csv");
        write_samples(s, report);
    }
    return 0;
}

int cmd_trace(const Common& c, bool positions)
{
    const auto parsed = load(c);
    std::ofstream trace_file;
    std::ofstream pos_file;
    EngineOptions opts;
    if (!c.out_dir.empty()) {
        ensure_writable_dir(c.out_dir);
        trace_file = open_out(fs::path(c.out_dir) / "trace.txt");
        opts.trace = &trace_file;
        if (positions) {
            pos_file = open_out(fs::path(c.out_dir) / "positions.txt");
            opts.position_trace = &pos_file;
        }
    } else {
        opts.trace = &std::cout;
        if (positions) opts.position_trace = &std::cout;
    }
    const RunReport report = run(parsed.scenario, opts);
    if (!c.out_dir.empty()) {
        auto f = open_out(fs::path(c.out_dir) / "run.csv");
        print_report(f, report);
    }
    return 0;
}

struct SweepArgs {
    std::string param;
    std::string grid;
    std::optional<std::uint32_t> repeats;
    int threads = 0;
    bool runs_csv = false;
    bool serial = false;
};

int cmd_sweep(const Common& c, const SweepArgs& a)
{
    auto parsed = load(c);
    SweepSpec sweep = parsed.sweep.value_or(SweepSpec{});
    if (!parsed.sweep) sweep.seed_base = parsed.scenario.seed;
    if (!a.param.empty()) sweep.parameter = parse_sweep_param(a.param);
    if (!a.grid.empty()) sweep.grid = parse_grid(a.grid);
    if (a.repeats) sweep.repeats = *a.repeats;
    if (sweep.grid.empty()) throw ConfigError("sweep needs a grid (--grid or 'grid' key)");
    validate_sweep(parsed.scenario, sweep);

    const fs::path out = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
    ensure_writable_dir(out);
    const auto result = a.serial ? run_sweep_serial(parsed.scenario, sweep)
                                 : run_sweep_parallel(parsed.scenario, sweep, a.threads);
    {
        auto f = open_out(out / "summary.csv");
        write_summary_csv(f, result.summary);
    }
    if (a.runs_csv) {
        auto f = open_out(out / "runs.csv");
        write_runs_csv(f, sweep, result);
    }
    std::cout << "wrote " << (out / "summary.csv").string() << " (" << sweep.grid.size()
              << " points x " << sweep.repeats << " runs)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Token-circulation FANET simulator"};
    app.require_subcommand(1);
    app.footer(keys_help());

    Common common;
    SweepArgs sweep_args;
    bool positions = false;
    std::string table_file;

    auto* run_cmd = app.add_subcommand("run", "run one scenario and print its report");
    add_common(run_cmd, common);

    auto* trace_cmd = app.add_subcommand("trace", "run one scenario and write the full event trace");
    add_common(trace_cmd, common);
    trace_cmd->add_flag("--positions", positions, "also write per-step node positions");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and write summary.csv");
    add_common(sweep_cmd, common);
    sweep_cmd->add_option("--param", sweep_args.param, "snr_db, nodes, pdu_bits, mcs or tokens");
    sweep_cmd->add_option("--grid", sweep_args.grid, "a:b:step or v1,v2,...");
    sweep_cmd->add_option("--repeats", sweep_args.repeats, "runs per grid point")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads, 0 = all cores")
        ->envname("FANET_THREADS")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_flag("--runs-csv", sweep_args.runs_csv, "also write per-run runs.csv");
    sweep_cmd->add_flag("--serial", sweep_args.serial, "use the single-threaded reference runner");

    auto* table_cmd = app.add_subcommand("table", "print the 802.11p MCS table");
    table_cmd->add_option("--mcs-table", table_file, "print this table file instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*table_cmd) return cmd_table(table_file);
        if (*run_cmd) return cmd_run(common);
        if (*trace_cmd) return cmd_trace(common, positions);
        if (*sweep_cmd) return cmd_sweep(common, sweep_args);
    } catch (const std::exception& e) {
        std::cerr << "fanetsim: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
