#pragma once

#include "fanet/core_model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fanet {

enum class Modulation : std::uint8_t { Bpsk, Qpsk, Qam16, Qam64 };

std::string_view to_string(Modulation m) noexcept;

struct CodingRate {
    int numerator = 1;
    int denominator = 2;

    double value() const noexcept { return static_cast<double>(numerator) / denominator; }
    bool operator==(const CodingRate&) const = default;
};

/// One row of the IEEE 802.11p MCS table (10 MHz channel).
struct McsProfile {
    int index = 1;
    Modulation modulation = Modulation::Bpsk;
    CodingRate coding_rate;
    double data_rate_mbps = 3.0;
    double min_sinr_db = 10.0;
    double range_m = 223.0;
    double reference_duration_us = 848.0;

    bool operator==(const McsProfile&) const = default;
};

/// The eight MCS rows. The built-in copy holds the 802.11p reference values;
/// a replacement can be read from a text file with the same column order:
///
///     # MCS  Modulation  Coding  Rate_Mbps  MinSINR_dB  Range_m  Duration
///     1      BPSK        1/2     3.0        10.0        223      848
///
/// Blank lines and lines starting with '#' are ignored.
class McsTable {
public:
    static constexpr int kRows = 8;

    static const McsTable& builtin();
    static McsTable parse(std::string_view text);
    static McsTable load(const std::filesystem::path& path);

    explicit McsTable(const std::array<McsProfile, kRows>& rows);

    /// Throws UnknownMcsError outside 1..8.
    const McsProfile& lookup(int index) const;
    const std::array<McsProfile, kRows>& rows() const noexcept { return rows_; }

    /// Same layout `parse` accepts, header line included.
    std::string to_text() const;

    bool operator==(const McsTable&) const = default;

private:
    std::array<McsProfile, kRows> rows_;
};

/// Row of the built-in table.
McsProfile mcs_lookup(int index);

double db_to_linear(double snr_db) noexcept;

/// Standard normal upper tail probability.
double q_function(double x) noexcept;

/// Uncoded AWGN bit error probability at per-bit SNR `snr_linear`.
///
/// BPSK and Gray-coded QPSK use Q(sqrt(2g)). Square M-QAM uses the Gray
/// approximation (4/log2 M)(1 - 1/sqrt M) Q(sqrt(3g/(M-1))), floored by the
/// next lower modulation order. The approximation undershoots at low SNR
/// (64QAM falls below 16QAM near 0 dB); the floor keeps the curve ordering
/// BPSK <= QPSK <= 16QAM <= 64QAM and strict monotonicity in g.
double bit_error_rate(double snr_linear, Modulation modulation);

/// (1 - ber)^bits, evaluated through log1p for long frames.
double success_from_ber(double ber, std::uint64_t length_bits);

enum class LinkModelKind : std::uint8_t { AnalyticBer, SinrThreshold };

std::string_view to_string(LinkModelKind k) noexcept;

struct LinkModel {
    LinkModelKind kind = LinkModelKind::AnalyticBer;
    double preamble_us = 40.0;
};

/// Analytic: (1 - BER)^bits at the scenario SNR (coding rate ignored).
/// Threshold: 1 when snr_db >= min SINR of the MCS (inclusive), else 0.
double frame_success_probability(double snr_db, const McsProfile& mcs,
                                 std::uint64_t length_bits, const LinkModel& model);

/// Preamble plus serialization time, in seconds.
double frame_airtime(std::uint64_t length_bits, const McsProfile& mcs, const LinkModel& model);

bool in_range(const Position& a, const Position& b, double comm_range) noexcept;

}  // namespace fanet
