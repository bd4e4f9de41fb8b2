#pragma once

#include "fanet/config.hpp"
#include "fanet/metrics.hpp"
#include "fanet/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace fanet {

struct SweepResult {
    SweepSummary summary;
    /// runs[p][r] is run r of grid point p, seed = seed_base + r.
    std::vector<std::vector<RunReport>> runs;
};

/// Reference implementation: one run after another.
SweepResult run_sweep_serial(const ScenarioConfig& base, const SweepSpec& sweep);

/// Runs every (point, repeat) pair on an OpenMP team of `threads` threads
/// (0 = runtime default). Identical output to run_sweep_serial.
SweepResult run_sweep_parallel(const ScenarioConfig& base, const SweepSpec& sweep, int threads = 0);

inline constexpr std::string_view kRunsCsvHeader =
    "parameter,value,run,seed,data_sent,data_received,data_corrupted,data_collided,"
    "control_sent,payload_bits_delivered,throughput_bps,received_packet_ratio,"
    "mean_location_error_m,mean_cache_age_s";

void write_runs_csv(std::ostream& out, const SweepSpec& sweep, const SweepResult& result);

/// Throws IoError unless `dir` exists (or can be created) and accepts a new file.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace fanet
