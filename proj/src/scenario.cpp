#include "fanet/scenario.hpp"

#include "fanet/error.hpp"

#include <cmath>
#include <string>

namespace fanet {

namespace {

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ConfigError(message);
    }
}

}  // namespace

void ScenarioConfig::validate() const
{
    require(node_count >= 2, "node_count must be at least 2");
    require(node_count < UavId::kBroadcastValue, "node_count too large");
    require(is_finite(arena.min) && is_finite(arena.max), "arena bounds must be finite");
    require(arena.min.x <= arena.max.x && arena.min.y <= arena.max.y && arena.min.z <= arena.max.z,
            "arena min corner must not exceed max corner");
    require(std::isfinite(comm_range) && comm_range > 0.0, "comm_range must be positive");
    require(mcs_index >= 1 && mcs_index <= McsTable::kRows,
            "mcs must be in 1..8 (802.11p MCS table), got " + std::to_string(mcs_index));
    require(std::isfinite(snr_db), "snr_db must be finite");
    require(pdu_payload_bits >= 1, "pdu_bits must be positive");
    require(number_of_tokens >= 1, "tokens must be at least 1");
    require(number_of_tokens <= node_count,
            "tokens (" + std::to_string(number_of_tokens) + ") must not exceed nodes (" +
                std::to_string(node_count) + ")");
    require(std::isfinite(mobility.v_max) && mobility.v_max >= 0.0, "v_max must be >= 0");
    require(std::isfinite(mobility.step_interval) && mobility.step_interval > 0.0,
            "step_interval must be positive");
    require(std::isfinite(sim_duration) && sim_duration >= 0.0, "duration must be >= 0");
    require(!control_busy_window || (std::isfinite(*control_busy_window) && *control_busy_window >= 0.0),
            "control_busy_window must be >= 0");
    require(!hold_interval || (std::isfinite(*hold_interval) && *hold_interval > 0.0),
            "hold_interval must be positive");
    require(std::isfinite(preamble_us) && preamble_us >= 0.0, "preamble_us must be >= 0");
    require(header_bits > 0 && entry_bits > 0 && control_frame_bits > 0,
            "frame field widths must be positive");
    require(retry_cap >= 1, "retry_cap must be at least 1");
    require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, "sample_rate_hz must be positive");
}

std::uint64_t ScenarioConfig::token_frame_bits() const
{
    return std::uint64_t{header_bits} + std::uint64_t{node_count} * entry_bits + pdu_payload_bits;
}

double ScenarioConfig::token_airtime() const
{
    return frame_airtime(token_frame_bits(), mcs(), link());
}

double ScenarioConfig::control_airtime() const
{
    return frame_airtime(control_frame_bits, mcs(), link());
}

double ScenarioConfig::busy_window() const
{
    return control_busy_window ? *control_busy_window : 2.0 * token_airtime();
}

double ScenarioConfig::hold_retry_interval() const
{
    if (hold_interval) {
        return *hold_interval;
    }
    const double window = busy_window();
    return window > 0.0 ? window : token_airtime();
}

UavId initial_token_holder(std::uint32_t token_id, std::uint32_t node_count,
                           std::uint32_t number_of_tokens)
{
    const auto slot = (std::uint64_t{token_id} - 1) * node_count / number_of_tokens;
    return UavId{static_cast<std::uint32_t>(slot)};
}

}  // namespace fanet
