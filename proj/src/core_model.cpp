#include "fanet/core_model.hpp"

#include "fanet/error.hpp"

#include <cmath>
#include <string>

namespace fanet {

double distance(const Position& a, const Position& b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool is_finite(const Position& p) noexcept
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

bool Arena::contains(const Position& p) const noexcept
{
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
}

double Arena::diagonal() const noexcept { return distance(min, max); }

LocationTable empty_table(std::size_t node_count)
{
    LocationTable table(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        table[i].uav = UavId{static_cast<std::uint32_t>(i)};
    }
    return table;
}

Token new_token(std::uint32_t token_id, UavId holder, std::size_t node_count,
                const Position& holder_pos, double now)
{
    if (node_count < 2) {
        throw ConfigError("token needs at least 2 nodes, got " + std::to_string(node_count));
    }
    if (token_id < 1) {
        throw DomainError("token ids start at 1");
    }
    if (holder.index() >= node_count) {
        throw DomainError("token holder " + std::to_string(holder.value) + " outside 0.." +
                          std::to_string(node_count - 1));
    }
    Token token;
    token.token_id = token_id;
    token.source = holder;
    token.table = empty_table(node_count);
    auto& own = token.table[holder.index()];
    own.pos = holder_pos;
    own.counter = 1;
    own.updated_at = now;
    return token;
}

std::uint64_t token_length_bits(const Token& token, std::uint32_t header_bits,
                                std::uint32_t entry_bits)
{
    return std::uint64_t{header_bits} + std::uint64_t{token.node_count()} * entry_bits;
}

std::string_view to_string(Channel c) noexcept
{
    return c == Channel::Data ? "data" : "control";
}

std::string_view to_string(FrameKind k) noexcept
{
    switch (k) {
    case FrameKind::TokenFrame:
        return "token";
    case FrameKind::Rts:
        return "rts";
    case FrameKind::Cts:
        return "cts";
    }
    return "?";
}

void validate_frame(const Frame& frame)
{
    if (frame.kind == FrameKind::TokenFrame) {
        if (frame.channel != Channel::Data) {
            throw ProtocolError("token frames travel on the data channel");
        }
        if (!frame.token) {
            throw ProtocolError("token frame without a token");
        }
    } else {
        if (frame.channel != Channel::Control) {
            throw ProtocolError("RTS/CTS frames travel on the control channel");
        }
        if (frame.token) {
            throw ProtocolError("control frame carrying a token");
        }
    }
    if (!(frame.tx_end > frame.tx_start)) {
        throw ProtocolError("frame must end after it starts");
    }
    if (frame.payload_bits == 0) {
        throw ProtocolError("frame payload must be positive");
    }
}

namespace wire {
namespace {

class BitWriter {
public:
    void put(std::uint64_t value, unsigned bits)
    {
        for (unsigned i = bits; i-- > 0;) {
            if (used_ % 8 == 0) {
                bytes_.push_back(0);
            }
            if ((value >> i) & 1U) {
                bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (used_ % 8));
            }
            ++used_;
        }
    }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t used_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t get(unsigned bits)
    {
        std::uint64_t value = 0;
        for (unsigned i = 0; i < bits; ++i) {
            const std::size_t byte = pos_ / 8;
            const unsigned bit = (bytes_[byte] >> (7 - pos_ % 8)) & 1U;
            value = (value << 1) | bit;
            ++pos_;
        }
        return value;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

constexpr std::int64_t kCoordMax = (std::int64_t{1} << 23) - 1;
constexpr std::int64_t kCoordMin = -(std::int64_t{1} << 23);

std::uint64_t encode_coordinate(double c)
{
    const auto fixed = static_cast<std::int64_t>(std::llround(c * kCoordinateScale));
    if (!std::isfinite(c) || fixed > kCoordMax || fixed < kCoordMin) {
        throw DomainError("coordinate does not fit the 24-bit wire field");
    }
    return static_cast<std::uint64_t>(fixed) & 0xFFFFFFU;
}

double decode_coordinate(std::uint64_t raw)
{
    auto fixed = static_cast<std::int64_t>(raw);
    if (fixed & 0x800000) {
        fixed -= std::int64_t{1} << 24;
    }
    return static_cast<double>(fixed) / kCoordinateScale;
}

void require(bool ok, const char* what)
{
    if (!ok) {
        throw DomainError(std::string("token does not fit the wire format: ") + what);
    }
}

}  // namespace

double quantize(double coordinate)
{
    return std::round(coordinate * kCoordinateScale) / kCoordinateScale;
}

std::vector<std::uint8_t> encode(const Token& token)
{
    require(token.token_id <= 0xFFFF, "token id");
    require(token.node_count() <= 256, "node count");
    require(token.source.value < 0xFFFF, "source");
    require(!token.destination || token.destination->value < 0xFFFF, "destination");

    BitWriter w;
    w.put(kVersion, 8);
    w.put(token.token_id, 16);
    w.put(token.source.value, 16);
    w.put(token.destination ? token.destination->value : kNoDestination, 16);
    w.put(token.node_count(), 16);
    w.put(token.hop_count, 32);
    w.put(0, 24);
    for (const auto& e : token.table) {
        require(e.uav.value <= 0xFF, "entry id");
        require(e.counter <= 0xFFFF, "counter");
        w.put(e.uav.value, 8);
        w.put(encode_coordinate(e.pos.x), 24);
        w.put(encode_coordinate(e.pos.y), 24);
        w.put(encode_coordinate(e.pos.z), 24);
        w.put(e.counter, 16);
    }
    return w.take();
}

Token decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHeaderBits / 8) {
        throw ProtocolError("token shorter than its header");
    }
    BitReader r(bytes);
    if (r.get(8) != kVersion) {
        throw ProtocolError("unknown token wire version");
    }
    Token token;
    token.token_id = static_cast<std::uint32_t>(r.get(16));
    token.source = UavId{static_cast<std::uint32_t>(r.get(16))};
    const auto dst = static_cast<std::uint32_t>(r.get(16));
    if (dst != kNoDestination) {
        token.destination = UavId{dst};
    }
    const auto n = static_cast<std::size_t>(r.get(16));
    token.hop_count = static_cast<std::uint32_t>(r.get(32));
    r.get(24);
    if (bytes.size() != (kHeaderBits + n * kEntryBits) / 8) {
        throw ProtocolError("token length does not match its node count");
    }
    token.table.resize(n);
    for (auto& e : token.table) {
        e.uav = UavId{static_cast<std::uint32_t>(r.get(8))};
        e.pos.x = decode_coordinate(r.get(24));
        e.pos.y = decode_coordinate(r.get(24));
        e.pos.z = decode_coordinate(r.get(24));
        e.counter = static_cast<std::uint32_t>(r.get(16));
    }
    return token;
}

}  // namespace wire

}  // namespace fanet
