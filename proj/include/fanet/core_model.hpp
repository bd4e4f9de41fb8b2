#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fanet {

/// Dense node identity in [0, node_count). The value 0xFFFF is reserved as
/// the broadcast address and never names a real node.
struct UavId {
    std::uint32_t value = 0;

    static constexpr std::uint32_t kBroadcastValue = 0xFFFF;

    static constexpr UavId broadcast() noexcept { return UavId{kBroadcastValue}; }
    constexpr bool is_broadcast() const noexcept { return value == kBroadcastValue; }
    constexpr std::size_t index() const noexcept { return value; }

    constexpr auto operator<=>(const UavId&) const = default;
};

constexpr UavId uav(std::uint32_t i) noexcept { return UavId{i}; }

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b) noexcept;
bool is_finite(const Position& p) noexcept;

/// Axis-aligned flight volume in meters.
struct Arena {
    Position min{0.0, 0.0, 0.0};
    Position max{500.0, 500.0, 100.0};

    bool contains(const Position& p) const noexcept;
    double diagonal() const noexcept;

    bool operator==(const Arena&) const = default;
};

/// One UAV's position as known by some holder, plus the freshness counter
/// assigned by the UAV itself. counter == 0 marks the never-updated placeholder.
struct LocationEntry {
    UavId uav;
    Position pos;
    std::uint32_t counter = 0;
    double updated_at = 0.0;

    bool operator==(const LocationEntry&) const = default;
};

using LocationTable = std::vector<LocationEntry>;

/// Placeholder table with one zero-counter entry per node.
LocationTable empty_table(std::size_t node_count);

struct Token {
    std::uint32_t token_id = 0;
    UavId source;                        // previous forwarder
    std::optional<UavId> destination;    // unset until the first send
    LocationTable table;
    std::uint32_t hop_count = 0;

    std::size_t node_count() const noexcept { return table.size(); }

    bool operator==(const Token&) const = default;
};

/// Fresh token created at `holder`. Every entry is a placeholder except the
/// holder's own, which is live (counter 1) at `holder_pos`.
/// Throws ConfigError when node_count < 2, DomainError on a zero id or bad holder.
Token new_token(std::uint32_t token_id, UavId holder, std::size_t node_count,
                const Position& holder_pos = {}, double now = 0.0);

std::uint64_t token_length_bits(const Token& token, std::uint32_t header_bits,
                                std::uint32_t entry_bits);

enum class Channel : std::uint8_t { Data, Control };
enum class FrameKind : std::uint8_t { TokenFrame, Rts, Cts };

std::string_view to_string(Channel c) noexcept;
std::string_view to_string(FrameKind k) noexcept;

/// Simulator-native on-air unit. Not an 802.11 MAC frame.
struct Frame {
    std::uint64_t id = 0;
    Channel channel = Channel::Data;
    FrameKind kind = FrameKind::TokenFrame;
    UavId src;
    UavId dst;
    std::uint64_t payload_bits = 1;
    std::optional<Token> token;
    double tx_start = 0.0;
    double tx_end = 0.0;

    bool overlaps(const Frame& other) const noexcept {
        return tx_start < other.tx_end && other.tx_start < tx_end;
    }
};

/// Checks the kind/channel pairing, token presence and interval ordering.
/// Throws ProtocolError on violation.
void validate_frame(const Frame& frame);

// Wire layout used for round-trip checks and the documented binary format.
// Header (128 bits): version:8 token_id:16 source:16 destination:16
//                    node_count:16 hop_count:32 reserved:24
// Entry (96 bits):   id:8 x:24 y:24 z:24 counter:16
// Coordinates are signed fixed point with 1/64 m resolution. updated_at is
// local bookkeeping and is not carried on the wire.
namespace wire {

inline constexpr std::uint32_t kHeaderBits = 128;
inline constexpr std::uint32_t kEntryBits = 96;
inline constexpr double kCoordinateScale = 64.0;
inline constexpr std::uint16_t kNoDestination = 0xFFFF;
inline constexpr std::uint8_t kVersion = 1;

std::vector<std::uint8_t> encode(const Token& token);
Token decode(std::span<const std::uint8_t> bytes);

/// Snaps a coordinate onto the wire grid.
double quantize(double coordinate);

}  // namespace wire

}  // namespace fanet
