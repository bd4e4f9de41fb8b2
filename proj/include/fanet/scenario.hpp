#pragma once

#include "fanet/core_model.hpp"
#include "fanet/mobility.hpp"
#include "fanet/phy_link.hpp"

#include <cstdint>
#include <optional>

namespace fanet {

/// Full description of one experiment. Defaults describe a 10-node swarm in
/// a 500 x 500 x 100 m box at MCS 1.
struct ScenarioConfig {
    std::uint32_t node_count = 10;
    Arena arena;
    double comm_range = 150.0;
    int mcs_index = 1;
    double snr_db = 20.0;
    LinkModelKind link_model = LinkModelKind::AnalyticBer;
    std::uint32_t pdu_payload_bits = 256;
    std::uint32_t number_of_tokens = 1;
    MobilityConfig mobility;
    std::uint64_t seed = 1;
    double sim_duration = 10.0;

    // Unset means "derive from the token airtime" (see busy_window()).
    std::optional<double> control_busy_window;
    std::optional<double> hold_interval;

    double preamble_us = 40.0;
    std::uint32_t header_bits = 128;
    std::uint32_t entry_bits = 96;
    std::uint32_t control_frame_bits = 160;
    std::uint32_t retry_cap = 8;
    double sample_rate_hz = 10.0;
    McsTable mcs_table = McsTable::builtin();

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;

    const McsProfile& mcs() const { return mcs_table.lookup(mcs_index); }
    LinkModel link() const { return LinkModel{link_model, preamble_us}; }

    /// Token header + one entry per node + application payload.
    std::uint64_t token_frame_bits() const;
    double token_airtime() const;
    double control_airtime() const;

    /// Explicit value, or twice the token airtime.
    double busy_window() const;
    /// Explicit value, or the busy window.
    double hold_retry_interval() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Even spread of the initial tokens: token i starts at floor((i-1) N / T).
UavId initial_token_holder(std::uint32_t token_id, std::uint32_t node_count,
                           std::uint32_t number_of_tokens);

}  // namespace fanet
