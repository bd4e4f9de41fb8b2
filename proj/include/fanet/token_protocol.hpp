#pragma once

#include "fanet/core_model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace fanet {

/// Everything one UAV knows. Owned by the engine; the protocol functions
/// below are the only code that mutates it.
struct UavState {
    UavId id;
    Position true_pos;
    LocationTable cache;
    std::vector<Token> held_tokens;      // waiting for a viable neighbor
    std::vector<double> busy_until;      // per UavId; a neighbor is busy while now < value
    std::uint32_t own_counter = 0;

    UavState() = default;
    UavState(UavId self, std::size_t node_count, const Position& pos);

    std::size_t node_count() const noexcept { return cache.size(); }
    bool is_busy(UavId other, double now) const noexcept;
    bool holds(std::uint32_t token_id) const noexcept;
};

struct NoAction {
    bool operator==(const NoAction&) const = default;
};
struct SendRts {
    UavId target;
    bool operator==(const SendRts&) const = default;
};
struct SendCts {
    UavId target;
    bool operator==(const SendCts&) const = default;
};
/// The token already carries source = sender and destination = target.
struct SendToken {
    UavId target;
    Token token;
    bool operator==(const SendToken&) const = default;
};
struct HoldToken {
    Token token;
    bool operator==(const HoldToken&) const = default;
};

using ProtocolAction = std::variant<NoAction, SendRts, SendCts, SendToken, HoldToken>;

struct ProtocolParams {
    double control_busy_window = 1e-3;  // s
};

/// Takes a new position fix: own_counter += 1 and cache[self] is rewritten.
void update_own_entry(UavState& state, double now);

/// Per UAV the entry with the strictly larger counter wins; ties keep `cache`.
/// Throws ProtocolError when the lengths differ.
LocationTable merge_cache(const LocationTable& cache, const LocationTable& table);

/// Folds the holder's cache into the token, makes the holder's own entry
/// authoritative and counts the hop. Throws ProtocolError unless the token is
/// addressed to `state.id`.
Token update_token(const UavState& state, Token token);

/// Forwarding decision for a token the node possesses. Busy neighbors are
/// dropped first; a single survivor gets the token even if it is the source,
/// except that a freshly received token is held rather than sent back when
/// the source is idle only because every other neighbor is busy
/// (`after_hold` lifts that restriction). With several survivors the source
/// is dropped and the one whose entry in the token is stalest (lowest
/// counter, then lowest id) is chosen.
/// Returns SendToken (token re-addressed) or HoldToken.
ProtocolAction select_next_uav(const UavState& state, std::span<const UavId> neighbors,
                               const Token& token, double now, bool after_hold = false);

/// Reaction to one decoded (or corrupted) frame.
///  - corrupted: nothing happens.
///  - token addressed here: refresh own fix, update token, merge cache, pick
///    the next hop; yields [SendRts, SendToken] or [HoldToken] (token then
///    sits in held_tokens).
///  - token overheard: cache merge only.
///  - RTS/CTS: sender (and the other endpoint, when it is not this node) are
///    busy until now + window; an RTS addressed here yields [SendCts].
/// Throws ProtocolError for a token whose table length is wrong; the state is
/// left untouched in that case.
std::vector<ProtocolAction> on_receive_frame(UavState& state, const Frame& frame, bool success,
                                             double now, std::span<const UavId> neighbors,
                                             const ProtocolParams& params);

/// Re-runs the forwarding decision (with after_hold set) for every held
/// token, in held order.
std::vector<ProtocolAction> retry_held_tokens(UavState& state, std::span<const UavId> neighbors,
                                              double now);

}  // namespace fanet
