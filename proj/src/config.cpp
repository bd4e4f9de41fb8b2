#include "fanet/config.hpp"

#include "fanet/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fanet {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<double> to_double(std::string_view s)
{
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

bool is_integral(double v) { return std::floor(v) == v; }

std::uint32_t integral_param(double value, double lo, double hi, std::string_view name)
{
    if (!is_integral(value) || value < lo || value > hi) {
        std::ostringstream msg;
        msg << name << " value " << value << " must be an integer in " << lo << ".." << hi;
        throw ConfigError(msg.str());
    }
    return static_cast<std::uint32_t>(value);
}

struct Located {
    std::string value;
    std::size_t line = 0;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Located> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        const auto it = entries_.find(key);
        std::ostringstream msg;
        if (it != entries_.end()) msg << "line " << it->second.line << ": ";
        msg << "key '" << key << "': " << what;
        throw ConfigError(msg.str());
    }

    const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

    double real(const std::string& key) const
    {
        const auto v = to_double(raw(key));
        if (!v) fail(key, "expected a number, got '" + raw(key) + "'");
        return *v;
    }

    std::uint64_t uint(const std::string& key, std::uint64_t max = UINT64_MAX) const
    {
        const auto v = to_uint(raw(key));
        if (!v) fail(key, "expected a non-negative integer, got '" + raw(key) + "'");
        if (*v > max) fail(key, "value " + raw(key) + " is too large");
        return *v;
    }

    std::size_t line(const std::string& key) const { return entries_.at(key).line; }

private:
    std::map<std::string, Located> entries_;
};

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = [] {
        std::set<std::string> k;
        for (const auto& doc : config_key_docs()) k.emplace(doc.key);
        return k;
    }();
    return keys;
}

}  // namespace

std::string_view to_string(SweepParam p) noexcept
{
    switch (p) {
    case SweepParam::SnrDb:
        return "snr_db";
    case SweepParam::NodeCount:
        return "nodes";
    case SweepParam::PduBits:
        return "pdu_bits";
    case SweepParam::McsIndex:
        return "mcs";
    case SweepParam::TokenCount:
        return "tokens";
    }
    return "?";
}

SweepParam parse_sweep_param(std::string_view name)
{
    for (auto p : {SweepParam::SnrDb, SweepParam::NodeCount, SweepParam::PduBits,
                   SweepParam::McsIndex, SweepParam::TokenCount}) {
        if (to_string(p) == name) return p;
    }
    throw ConfigError("unknown sweep parameter '" + std::string(name) +
                      "' (expected snr_db, nodes, pdu_bits, mcs or tokens)");
}

std::vector<double> parse_grid(std::string_view text)
{
    text = trim(text);
    if (text.empty()) {
        throw ConfigError("grid must not be empty");
    }
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        while (true) {
            const auto colon = text.find(':', start);
            const auto piece = text.substr(start, colon == std::string_view::npos ? text.npos : colon - start);
            const auto v = to_double(piece);
            if (!v) throw ConfigError("bad grid '" + std::string(text) + "': expected a:b:step");
            parts.push_back(*v);
            if (colon == std::string_view::npos) break;
            start = colon + 1;
        }
        if (parts.size() != 3) throw ConfigError("bad grid '" + std::string(text) + "': expected a:b:step");
        const double a = parts[0], b = parts[1], step = parts[2];
        if (!(step > 0.0) || b < a) {
            throw ConfigError("bad grid '" + std::string(text) + "': need step > 0 and a <= b");
        }
        const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
        if (count > 1'000'000) throw ConfigError("grid has too many points");
        for (std::size_t i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
        const auto v = to_double(piece);
        if (!v) throw ConfigError("bad grid value '" + std::string(trim(piece)) + "'");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

ScenarioConfig apply_param(const ScenarioConfig& base, SweepParam param, double value)
{
    ScenarioConfig cfg = base;
    switch (param) {
    case SweepParam::SnrDb:
        if (!std::isfinite(value)) throw ConfigError("snr_db must be finite");
        cfg.snr_db = value;
        break;
    case SweepParam::NodeCount:
        cfg.node_count = integral_param(value, 2, UavId::kBroadcastValue - 1, "nodes");
        break;
    case SweepParam::PduBits:
        cfg.pdu_payload_bits = integral_param(value, 1, UINT32_MAX, "pdu_bits");
        break;
    case SweepParam::McsIndex:
        cfg.mcs_index = static_cast<int>(integral_param(value, 1, McsTable::kRows, "mcs"));
        break;
    case SweepParam::TokenCount:
        cfg.number_of_tokens = integral_param(value, 1, UINT32_MAX, "tokens");
        break;
    }
    return cfg;
}

void validate_sweep(const ScenarioConfig& base, const SweepSpec& sweep)
{
    if (sweep.grid.empty()) throw ConfigError("sweep grid must not be empty");
    if (sweep.repeats < 1) throw ConfigError("repeats must be at least 1");
    for (double v : sweep.grid) apply_param(base, sweep.parameter, v).validate();
}

ParsedConfig parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    std::map<std::string, Located> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                              std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
        if (!known_keys().count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (entries.count(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                              "' repeated (first set on line " + std::to_string(entries[key].line) + ")");
        }
        if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' has no value");
        entries.emplace(key, Located{value, line_no});
    }

    for (const char* required : {"nodes", "mcs", "snr_db", "seed", "duration"}) {
        if (!entries.count(required)) {
            throw ConfigError(std::string("missing required key '") + required + "'");
        }
    }

    const Reader r(std::move(entries));
    ScenarioConfig cfg;
    cfg.node_count = static_cast<std::uint32_t>(r.uint("nodes", UINT32_MAX));
    {
        const auto mcs = r.uint("mcs", 1000);
        if (mcs < 1 || mcs > McsTable::kRows) {
            r.fail("mcs", "mcs must be in 1..8 (802.11p MCS table), got " + r.raw("mcs"));
        }
        cfg.mcs_index = static_cast<int>(mcs);
    }
    cfg.snr_db = r.real("snr_db");
    cfg.seed = r.uint("seed");
    cfg.sim_duration = r.real("duration");

    auto u32 = [&](const char* key, std::uint32_t& field) {
        if (r.has(key)) field = static_cast<std::uint32_t>(r.uint(key, UINT32_MAX));
    };
    auto real = [&](const char* key, double& field) {
        if (r.has(key)) field = r.real(key);
    };
    u32("tokens", cfg.number_of_tokens);
    u32("pdu_bits", cfg.pdu_payload_bits);
    u32("header_bits", cfg.header_bits);
    u32("entry_bits", cfg.entry_bits);
    u32("control_bits", cfg.control_frame_bits);
    u32("retry_cap", cfg.retry_cap);
    real("arena_x", cfg.arena.max.x);
    real("arena_y", cfg.arena.max.y);
    real("arena_z", cfg.arena.max.z);
    real("comm_range", cfg.comm_range);
    real("v_max", cfg.mobility.v_max);
    real("step_interval", cfg.mobility.step_interval);
    real("preamble_us", cfg.preamble_us);
    real("sample_rate_hz", cfg.sample_rate_hz);
    if (r.has("control_busy_window")) cfg.control_busy_window = r.real("control_busy_window");
    if (r.has("hold_interval")) cfg.hold_interval = r.real("hold_interval");
    if (r.has("link_model")) {
        const auto& m = r.raw("link_model");
        if (m == "analytic") {
            cfg.link_model = LinkModelKind::AnalyticBer;
        } else if (m == "threshold") {
            cfg.link_model = LinkModelKind::SinrThreshold;
        } else {
            r.fail("link_model", "expected 'analytic' or 'threshold', got '" + m + "'");
        }
    }
    if (r.has("mcs_table")) {
        std::filesystem::path p = r.raw("mcs_table");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        try {
            cfg.mcs_table = McsTable::load(p);
        } catch (const Error& e) {
            r.fail("mcs_table", e.what());
        }
    }

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // Point at the line of the first key the message names, when there is one.
        const std::string what = e.what();
        for (const auto& doc : config_key_docs()) {
            const std::string key(doc.key);
            if (r.has(key) && what.rfind(key, 0) == 0) r.fail(key, what);
        }
        throw;
    }

    ParsedConfig out{cfg, std::nullopt};
    const bool any_sweep = r.has("sweep") || r.has("grid") || r.has("repeats");
    if (any_sweep) {
        if (!r.has("sweep") || !r.has("grid")) {
            throw ConfigError("sweeps need both 'sweep' and 'grid' keys");
        }
        SweepSpec sweep;
        sweep.seed_base = cfg.seed;
        try {
            sweep.parameter = parse_sweep_param(r.raw("sweep"));
        } catch (const ConfigError& e) {
            r.fail("sweep", e.what());
        }
        try {
            sweep.grid = parse_grid(r.raw("grid"));
        } catch (const ConfigError& e) {
            r.fail("grid", e.what());
        }
        if (r.has("repeats")) {
            const auto rep = r.uint("repeats", UINT32_MAX);
            if (rep < 1) r.fail("repeats", "repeats must be at least 1");
            sweep.repeats = static_cast<std::uint32_t>(rep);
        }
        try {
            validate_sweep(cfg, sweep);
        } catch (const ConfigError& e) {
            r.fail("grid", e.what());
        }
        out.sweep = sweep;
    }
    return out;
}

ParsedConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path.string() + "': file not found or unreadable");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

const std::vector<ConfigKeyDoc>& config_key_docs()
{
    static const std::vector<ConfigKeyDoc> docs{
        {"nodes", "(required)", "number of UAVs, >= 2"},
        {"mcs", "(required)", "802.11p MCS index 1..8"},
        {"snr_db", "(required)", "link SNR in dB, same for every link"},
        {"seed", "(required)", "64-bit run seed; also the sweep seed base"},
        {"duration", "(required)", "simulated seconds, >= 0"},
        {"tokens", "1", "number of circulating tokens, 1..nodes"},
        {"link_model", "analytic", "analytic (BER -> frame success) or threshold (min SINR)"},
        {"pdu_bits", "256", "application payload bits carried in each token frame"},
        {"arena_x", "500", "arena extent along x in metres"},
        {"arena_y", "500", "arena extent along y in metres"},
        {"arena_z", "100", "arena extent along z in metres"},
        {"comm_range", "150", "communication range in metres"},
        {"v_max", "10", "maximum UAV speed in m/s"},
        {"step_interval", "0.1", "mobility step in seconds"},
        {"control_busy_window", "2 x token airtime", "how long RTS/CTS marks a neighbour busy (s)"},
        {"hold_interval", "busy window", "mean delay before a held token retries (s)"},
        {"preamble_us", "40", "PHY preamble added to every frame airtime (us)"},
        {"header_bits", "128", "token header size in bits"},
        {"entry_bits", "96", "bits per location entry in the token"},
        {"control_bits", "160", "RTS/CTS frame size in bits"},
        {"retry_cap", "8", "data transmissions per hop before the token is held"},
        {"sample_rate_hz", "10", "metric sampling rate in simulated time"},
        {"mcs_table", "built-in", "path to an MCS table file replacing the built-in one"},
        {"sweep", "(none)", "swept parameter: snr_db, nodes, pdu_bits, mcs or tokens"},
        {"grid", "(none)", "sweep values: a:b:step or v1,v2,..."},
        {"repeats", "1", "runs per grid point, seeds seed + run index"},
    };
    return docs;
}

}  // namespace fanet
