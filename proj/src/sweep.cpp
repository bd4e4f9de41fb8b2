#include "fanet/sweep.hpp"

#include "fanet/error.hpp"
#include "fanet/sim_engine.hpp"

#include <exception>
#include <fstream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fanet {

namespace {

ScenarioConfig point_config(const ScenarioConfig& base, const SweepSpec& sweep, std::size_t p,
                            std::uint32_t r)
{
    ScenarioConfig cfg = apply_param(base, sweep.parameter, sweep.grid[p]);
    cfg.seed = sweep.seed_base + r;
    return cfg;
}

SweepResult summarize(const SweepSpec& sweep, std::vector<std::vector<RunReport>> runs)
{
    SweepResult out;
    out.summary.parameter = std::string(to_string(sweep.parameter));
    out.summary.seed_base = sweep.seed_base;
    for (std::size_t p = 0; p < runs.size(); ++p) {
        out.summary.points.push_back(aggregate(runs[p], sweep.grid[p]));
    }
    out.runs = std::move(runs);
    return out;
}

}  // namespace

SweepResult run_sweep_serial(const ScenarioConfig& base, const SweepSpec& sweep)
{
    validate_sweep(base, sweep);
    std::vector<std::vector<RunReport>> runs(sweep.grid.size());
    for (std::size_t p = 0; p < sweep.grid.size(); ++p) {
        for (std::uint32_t r = 0; r < sweep.repeats; ++r) {
            runs[p].push_back(run(point_config(base, sweep, p, r)));
        }
    }
    return summarize(sweep, std::move(runs));
}

SweepResult run_sweep_parallel(const ScenarioConfig& base, const SweepSpec& sweep, int threads)
{
    validate_sweep(base, sweep);
    const std::size_t points = sweep.grid.size();
    const std::size_t total = points * sweep.repeats;
    std::vector<RunReport> flat(total);
    std::vector<std::exception_ptr> errors(total);

#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
#else
    (void)threads;
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
        const auto p = static_cast<std::size_t>(i) / sweep.repeats;
        const auto r = static_cast<std::uint32_t>(static_cast<std::size_t>(i) % sweep.repeats);
        try {
            flat[i] = run(point_config(base, sweep, p, r));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<std::vector<RunReport>> runs(points);
    for (std::size_t p = 0; p < points; ++p) {
        runs[p].assign(std::make_move_iterator(flat.begin() + p * sweep.repeats),
                       std::make_move_iterator(flat.begin() + (p + 1) * sweep.repeats));
    }
    return summarize(sweep, std::move(runs));
}

void write_runs_csv(std::ostream& out, const SweepSpec& sweep, const SweepResult& result)
{
    out << kRunsCsvHeader << '\n';
    for (std::size_t p = 0; p < result.runs.size(); ++p) {
        for (std::size_t r = 0; r < result.runs[p].size(); ++r) {
            const auto& rep = result.runs[p][r];
            out << to_string(sweep.parameter) << ',' << format_double(sweep.grid[p]) << ',' << r << ','
                << sweep.seed_base + r << ',' << rep.data.sent << ',' << rep.data.received << ','
                << rep.data.corrupted << ',' << rep.data.collided << ',' << rep.control.sent << ','
                << rep.payload_bits_delivered << ',' << format_double(rep.throughput_bps) << ','
                << format_double(rep.received_packet_ratio) << ','
                << format_double(rep.mean_location_error_m) << ','
                << format_double(rep.mean_cache_age_s) << '\n';
        }
    }
}

void ensure_writable_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("output directory '" + dir.string() + "' does not exist and cannot be created");
    }
    const auto probe = dir / ".fanet_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw IoError("output directory '" + dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace fanet
