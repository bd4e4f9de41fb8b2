#pragma once

#include "fanet/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fanet {

enum class SweepParam : std::uint8_t { SnrDb, NodeCount, PduBits, McsIndex, TokenCount };

std::string_view to_string(SweepParam p) noexcept;
/// Accepts snr_db, nodes, pdu_bits, mcs, tokens. Throws ConfigError otherwise.
SweepParam parse_sweep_param(std::string_view name);

struct SweepSpec {
    SweepParam parameter = SweepParam::SnrDb;
    std::vector<double> grid;
    std::uint32_t repeats = 1;
    std::uint64_t seed_base = 1;

    bool operator==(const SweepSpec&) const = default;
};

/// "a:b:step" (inclusive of b within rounding) or "v1,v2,...".
std::vector<double> parse_grid(std::string_view text);

/// Copy of `base` with the swept parameter set to `value`. Throws ConfigError
/// when the value is outside the parameter's domain (e.g. fractional nodes).
ScenarioConfig apply_param(const ScenarioConfig& base, SweepParam param, double value);

/// Checks every grid value against the parameter's domain and repeats >= 1.
void validate_sweep(const ScenarioConfig& base, const SweepSpec& sweep);

struct ParsedConfig {
    ScenarioConfig scenario;
    std::optional<SweepSpec> sweep;
};

/// Flat `key = value` text, `#` starts a comment. Required keys: nodes, mcs,
/// snr_db, seed, duration. A relative mcs_table path resolves against
/// `base_dir`. Errors name the line and key.
ParsedConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses a file. Throws IoError when it cannot be read.
ParsedConfig load_config(const std::filesystem::path& path);

struct ConfigKeyDoc {
    std::string_view key;
    std::string_view default_value;
    std::string_view description;
};

/// Every accepted key with its default, in documentation order.
const std::vector<ConfigKeyDoc>& config_key_docs();

}  // namespace fanet
