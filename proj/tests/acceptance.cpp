// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [--fanetsim PATH] [criterion numbers...]

#include "fanet/ber_kernels.hpp"
#include "fanet/config.hpp"
#include "fanet/error.hpp"
#include "fanet/metrics.hpp"
#include "fanet/phy_link.hpp"
#include "fanet/sim_engine.hpp"
#include "fanet/sweep.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace fanet;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fanetsim_path;

std::string fmt(double v, int precision = 4)
{
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

// Reference 802.11p MCS table: index, rate, min SINR, range, duration, coding numerator, denominator.
struct Row {
    int index;
    const char* modulation;
    const char* coding;
    double rate, sinr, range, duration;
};
const Row kMcsReference[8] = {
    {1, "BPSK", "1/2", 3.0, 10.0, 223, 848},   {2, "BPSK", "3/4", 4.5, 11.0, 210, 584},
    {3, "QPSK", "1/2", 6.0, 13.0, 188, 448},   {4, "QPSK", "3/4", 9.0, 15.0, 167, 312},
    {5, "16QAM", "1/2", 12.0, 18.0, 141, 248}, {6, "16QAM", "3/4", 18.0, 22.0, 112, 176},
    {7, "64QAM", "1/2", 24.0, 26.0, 89, 144},  {8, "64QAM", "3/4", 27.0, 27.0, 84, 136},
};

int cells_matching(const McsProfile& p, const Row& row)
{
    const double coding = static_cast<double>(p.coding_rate.numerator) / p.coding_rate.denominator;
    const double expected_coding = row.coding[0] == '1' ? 0.5 : 0.75;
    return (p.index == row.index) + (coding == expected_coding) + (p.data_rate_mbps == row.rate) +
           (p.min_sinr_db == row.sinr) + (p.range_m == row.range) +
           (p.reference_duration_us == row.duration);
}

Outcome table_fidelity()
{
    int api = 0;
    for (const auto& row : kMcsReference) {
        api += cells_matching(mcs_lookup(row.index), row);
        if (to_string(mcs_lookup(row.index).modulation) != std::string_view(row.modulation)) api = -1000;
    }

    int cli = 0;
    std::string text;
    if (!fanetsim_path.empty()) {
        std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen((fanetsim_path + " table").c_str(), "r"), pclose);
        char buf[512];
        while (pipe && fgets(buf, sizeof buf, pipe.get())) text += buf;
    } else {
        text = McsTable::builtin().to_text();
    }
    try {
        const McsTable printed = McsTable::parse(text);
        for (const auto& row : kMcsReference) cli += cells_matching(printed.lookup(row.index), row);
    } catch (const Error&) {
        cli = 0;
    }
    return {api == 48 && cli == 48,
            "mcs_lookup " + std::to_string(api) + "/48 cells, `table` output " + std::to_string(cli) +
                "/48 cells" + (fanetsim_path.empty() ? " (library text, CLI path not given)" : "")};
}

Outcome ber_oracle()
{
    const std::uint64_t bits = 1'000'000;
    bool ok = true;
    std::string detail;
    for (double db : {0.0, 4.0, 8.0, 10.0}) {
        const double expected = oracle::gaussian_tail(std::sqrt(2.0 * db_to_linear(db)));
        const double analytic = bit_error_rate(db_to_linear(db), Modulation::Bpsk);
        const auto errors = count_bit_errors_parallel(analytic, bits, 2024);
        const double freq = static_cast<double>(errors) / bits;
        const double z = std::abs(freq - expected) / oracle::binomial_sigma(expected, bits);
        const bool point_ok = z <= 3.0 && std::abs(analytic - expected) <= 1e-9 * expected;
        ok = ok && point_ok;
        detail += fmt(db, 3) + "dB: oracle " + fmt(expected) + " empirical " + fmt(freq) + " (" + fmt(z, 2) +
                  " sigma); ";
    }
    return {ok, detail};
}

ScenarioConfig pair_config(int mcs, double snr_db, LinkModelKind model)
{
    ScenarioConfig cfg;
    cfg.node_count = 2;
    cfg.mcs_index = mcs;
    cfg.snr_db = snr_db;
    cfg.link_model = model;
    cfg.mobility.v_max = 0.0;
    return cfg;
}

EngineOptions pair_options()
{
    EngineOptions opts;
    opts.initial_positions = std::vector<Position>{{200, 250, 50}, {300, 250, 50}};
    return opts;
}

Outcome threshold_waterfall()
{
    int exact = 0;
    std::string detail;
    for (int mcs = 1; mcs <= 8; ++mcs) {
        const double min_sinr = mcs_lookup(mcs).min_sinr_db;
        int transition = -1;
        bool clean = true;
        for (int db = 8; db <= 28; ++db) {
            auto cfg = pair_config(mcs, db, LinkModelKind::SinrThreshold);
            cfg.sim_duration = 0.2;
            const RunReport r = run(cfg, pair_options());
            const double expected = db >= min_sinr ? 1.0 : 0.0;
            if (r.data.sent == 0 || r.received_packet_ratio != expected) clean = false;
            if (transition < 0 && r.received_packet_ratio == 1.0) transition = db;
        }
        if (clean && transition == static_cast<int>(min_sinr)) ++exact;
        detail += "MCS" + std::to_string(mcs) + "@" + std::to_string(transition) + "dB ";
    }
    return {exact == 8, std::to_string(exact) + "/8 exact transitions: " + detail};
}

// Runs a static 2-node exchange until exactly `frames` addressed data frames
// have been sent. The same seed across MCS values replays the same loss
// draws, so rows with equal success probability give equal counts.
ChannelCounters frames_until(int mcs, double snr_db, std::uint64_t frames, std::uint64_t seed)
{
    auto cfg = pair_config(mcs, snr_db, LinkModelKind::AnalyticBer);
    cfg.sim_duration = 1e9;
    cfg.seed = seed;
    Engine engine(cfg, pair_options());
    while (engine.report().data.sent < frames && engine.step()) {
    }
    return engine.report().data;
}

Outcome mcs_ordering()
{
    const std::uint64_t frames = 10'000;
    int comparisons = 0;
    int violations = 0;
    double worst = -1e9;
    std::string curve;
    for (double db = 0.0; db <= 30.0; db += 2.0) {
        double prev_ratio = 0.0;
        for (int mcs = 1; mcs <= 8; ++mcs) {
            const auto c = frames_until(mcs, db, frames, 17);
            const double ratio = static_cast<double>(c.received) / static_cast<double>(c.sent);
            if (mcs > 1) {
                const double n = static_cast<double>(frames);
                const double sigma = std::sqrt(oracle::binomial_sigma(ratio, n) * oracle::binomial_sigma(ratio, n) +
                                               oracle::binomial_sigma(prev_ratio, n) * oracle::binomial_sigma(prev_ratio, n));
                const double excess = ratio - prev_ratio - 2.0 * sigma;
                worst = std::max(worst, ratio - prev_ratio);
                ++comparisons;
                if (excess > 0.0) ++violations;
            }
            if (mcs == 1 || mcs == 8) curve += "MCS" + std::to_string(mcs) + "@" + fmt(db, 3) + "=" + fmt(ratio, 3) + " ";
            prev_ratio = ratio;
        }
    }
    return {violations == 0, std::to_string(comparisons - violations) + "/" + std::to_string(comparisons) +
                                 " adjacent-MCS comparisons non-increasing within 2 sigma (largest rise " +
                                 fmt(worst, 3) + "); " + curve};
}

Outcome throughput_saturation()
{
    const int repeats = 5;
    std::vector<double> grid;
    for (double db = 0.0; db <= 20.0; db += 1.0) grid.push_back(db);
    auto base = pair_config(1, 0.0, LinkModelKind::AnalyticBer);
    base.sim_duration = 2.0;
    std::vector<MeanStd> stats;
    for (double db : grid) {
        std::vector<double> t;
        for (int r = 0; r < repeats; ++r) {
            auto cfg = base;
            cfg.snr_db = db;
            cfg.seed = 1 + r;
            t.push_back(run(cfg, pair_options()).throughput_bps);
        }
        stats.push_back(mean_std(t));
    }
    int drops = 0;
    for (std::size_t i = 1; i < stats.size(); ++i) {
        const double se = std::sqrt((stats[i].std * stats[i].std + stats[i - 1].std * stats[i - 1].std) / repeats);
        if (stats[i].mean < stats[i - 1].mean - 2.0 * se) ++drops;
    }
    const double last = stats.back().mean;
    const double before = stats[stats.size() - 2].mean;
    const double gap = std::abs(last - before) / last;
    const bool rising = stats.front().mean < 0.5 * last;
    std::string curve;
    for (std::size_t i = 0; i < grid.size(); i += 4) curve += fmt(grid[i], 3) + "dB=" + fmt(stats[i].mean, 4) + " ";
    return {drops == 0 && gap < 0.05 && rising,
            std::to_string(drops) + " significant drops, final-pair gap " + fmt(100 * gap, 3) + "% of plateau " +
                fmt(last, 6) + " bps; " + curve};
}

Outcome node_count_hump()
{
    ScenarioConfig base;
    base.mcs_index = 1;
    base.snr_db = 7.0;
    base.link_model = LinkModelKind::AnalyticBer;
    base.sim_duration = 20.0;
    SweepSpec sweep{SweepParam::NodeCount, parse_grid("2:20:2"), 30, 1};
    const auto result = run_sweep_parallel(base, sweep);
    std::size_t best = 0;
    std::string curve;
    for (std::size_t i = 0; i < result.summary.points.size(); ++i) {
        const auto& p = result.summary.points[i];
        if (p[Metric::ThroughputBps].mean > result.summary.points[best][Metric::ThroughputBps].mean) best = i;
        curve += "N=" + fmt(p.value) + ":" + fmt(p[Metric::ThroughputBps].mean, 5) + "+-" +
                 fmt(p[Metric::ThroughputBps].std, 3) + " ";
    }
    const bool interior = best != 0 && best + 1 != result.summary.points.size();
    return {interior, "argmax N=" + fmt(sweep.grid[best]) + " (R=30, mean+-std bps) " + curve};
}

bool fully_disseminated(const Engine& e)
{
    for (const auto& node : e.nodes()) {
        for (const auto& entry : node.cache) {
            if (entry.counter == 0) return false;
        }
    }
    return true;
}

Outcome protocol_invariants()
{
    std::size_t graphs = 0;
    std::size_t failures = 0;
    std::size_t max_forwards = 0;
    std::string first_failure;
    for (std::uint32_t n = 2; n <= 6; ++n) {
        for (const auto& adj : oracle::connected_graphs(n)) {
            ++graphs;
            ScenarioConfig cfg;
            cfg.node_count = n;
            cfg.link_model = LinkModelKind::SinrThreshold;
            cfg.snr_db = 40.0;
            cfg.mobility.v_max = 0.0;
            cfg.sim_duration = 5.0;
            EngineOptions opts;
            opts.topology = adj;
            opts.check_invariants = true;
            std::string why;
            try {
                Engine engine(cfg, opts);
                const auto holder = initial_token_holder(1, n, 1);
                const auto hops = oracle::bfs(adj, holder.index());
                std::vector<long> first_visit(n, -1);
                first_visit[holder.index()] = 0;
                UavId at = holder;
                while (!fully_disseminated(engine) && engine.forwards() <= n * n && engine.step()) {
                    const auto places = engine.token_places();
                    if (places.size() != 1) {
                        why = "token count " + std::to_string(places.size());
                        break;
                    }
                    const UavId now_at = places[0].node;
                    if (now_at != at) {
                        if (!adj.linked(at.index(), now_at.index())) {
                            why = "token jumped across a non-edge";
                            break;
                        }
                        at = now_at;
                        if (first_visit[at.index()] < 0) {
                            first_visit[at.index()] = static_cast<long>(engine.forwards());
                            if (first_visit[at.index()] < hops[at.index()]) {
                                why = "token reached a node faster than its BFS distance";
                                break;
                            }
                        }
                    }
                }
                if (why.empty() && !fully_disseminated(engine)) {
                    why = "not disseminated within " + std::to_string(n * n) + " forwards";
                }
                if (why.empty() && (engine.report().data.sent != engine.report().data.received)) {
                    why = "lossless run lost a frame";
                }
                max_forwards = std::max<std::size_t>(max_forwards, engine.forwards());
            } catch (const InvariantViolation& e) {
                why = e.what();
            }
            if (!why.empty()) {
                ++failures;
                if (first_failure.empty()) first_failure = "n=" + std::to_string(n) + ": " + why;
            }
        }
    }
    return {failures == 0 && graphs == 1 + 4 + 38 + 728 + 26704,
            std::to_string(graphs - failures) + "/" + std::to_string(graphs) +
                " connected graphs (n<=6) pass; max forwards to full dissemination " +
                std::to_string(max_forwards) + (first_failure.empty() ? "" : "; first failure " + first_failure)};
}

Outcome determinism()
{
    ScenarioConfig cfg;
    cfg.node_count = 12;
    cfg.arena.max = {300, 300, 60};
    cfg.number_of_tokens = 3;
    cfg.snr_db = 9.0;
    cfg.mobility.v_max = 20.0;
    cfg.sim_duration = 3.0;
    cfg.seed = 11;
    auto trace = [](const ScenarioConfig& c) {
        std::ostringstream out;
        EngineOptions opts;
        opts.trace = &out;
        run(c, opts);
        return out.str();
    };
    const auto a = trace(cfg);
    const auto b = trace(cfg);
    auto other = cfg;
    other.seed = 12;
    const auto c = trace(other);

    SweepSpec sweep{SweepParam::SnrDb, parse_grid("4:12:4"), 3, 5};
    auto small = cfg;
    small.sim_duration = 1.0;
    auto csv = [&](const SweepResult& r) {
        std::ostringstream out;
        write_summary_csv(out, r.summary);
        write_runs_csv(out, sweep, r);
        return out.str();
    };
    const auto csv1 = csv(run_sweep_parallel(small, sweep));
    const auto csv2 = csv(run_sweep_parallel(small, sweep));
    const auto csv3 = csv(run_sweep_serial(small, sweep));
    const bool ok = a == b && a != c && csv1 == csv2 && csv1 == csv3 && a.size() > 1000;
    return {ok, "trace " + std::to_string(a.size()) + " bytes, repeat identical: " + (a == b ? "yes" : "no") +
                    ", new seed differs: " + (a != c ? "yes" : "no") +
                    ", CSVs identical (parallel x2, serial): " + (csv1 == csv2 && csv1 == csv3 ? "yes" : "no")};
}

Outcome multi_token_safety()
{
    // Six UAVs on a static ring, 80 m spacing: each sees exactly its two ring neighbours.
    std::vector<Position> ring;
    const double radius = 80.0;
    for (int i = 0; i < 6; ++i) {
        const double a = 2.0 * M_PI * i / 6.0;
        ring.push_back({250 + radius * std::cos(a), 250 + radius * std::sin(a), 50});
    }
    const auto adj = build_adjacency(ring, 100.0);
    if (!oracle::connected(adj)) return {false, "ring topology not connected"};

    const int seeds = 10;
    double age[4] = {0, 0, 0, 0};
    std::string error;
    std::uint64_t collided = 0;
    for (std::uint32_t tokens = 1; tokens <= 3; ++tokens) {
        for (int s = 1; s <= seeds; ++s) {
            ScenarioConfig cfg;
            cfg.node_count = 6;
            cfg.comm_range = 100.0;
            cfg.number_of_tokens = tokens;
            cfg.link_model = LinkModelKind::SinrThreshold;
            cfg.snr_db = 40.0;
            cfg.mobility.v_max = 0.0;
            cfg.sim_duration = 5.0;
            cfg.seed = static_cast<std::uint64_t>(s);
            EngineOptions opts;
            opts.initial_positions = ring;
            opts.check_invariants = true;  // conservation checked after every event
            try {
                const RunReport r = run(cfg, opts);
                age[tokens] += r.mean_cache_age_s / seeds;
                collided += r.data.collided;
            } catch (const InvariantViolation& e) {
                error = "tokens=" + std::to_string(tokens) + " seed " + std::to_string(s) + ": " + e.what();
            }
        }
    }
    const bool ok = error.empty() && age[2] <= age[1];
    return {ok, "conservation held at every event for T=1,2,3 x " + std::to_string(seeds) +
                    " seeds" + (error.empty() ? "" : " EXCEPT " + error) + "; mean cache age T=1 " +
                    fmt(age[1]) + " s, T=2 " + fmt(age[2]) + " s, T=3 " + fmt(age[3]) +
                    " s; collided data frames " + std::to_string(collided)};
}

struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--fanetsim" && i + 1 < argc) {
            fanetsim_path = argv[++i];
        } else {
            only.insert(std::stoi(arg));
        }
    }

    const std::vector<Criterion> criteria{
        {1, "MCS table fidelity", table_fidelity},
        {2, "BER oracle", ber_oracle},
        {3, "threshold waterfall", threshold_waterfall},
        {4, "MCS ordering", mcs_ordering},
        {5, "throughput-vs-SNR saturation", throughput_saturation},
        {6, "node-count hump", node_count_hump},
        {7, "protocol invariant suite", protocol_invariants},
        {8, "determinism", determinism},
        {9, "multi-token safety", multi_token_safety},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.number << "] " << c.name << " (" << fmt(secs, 3)
                  << " s): " << out.detail << std::endl;
        failed += out.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
