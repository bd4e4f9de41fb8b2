#pragma once

#include "fanet/core_model.hpp"
#include "fanet/token_protocol.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fanet {

/// Outcomes of addressed frames on one channel. Every sent frame ends in
/// exactly one of received / corrupted / collided.
struct ChannelCounters {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t corrupted = 0;
    std::uint64_t collided = 0;

    bool balanced() const noexcept { return sent == received + corrupted + collided; }
    bool operator==(const ChannelCounters&) const = default;
};

struct MetricSample {
    double time = 0.0;
    double throughput_bps = 0.0;         // cumulative up to `time`
    double received_packet_ratio = 0.0;  // cumulative up to `time`
    double location_error_m = 0.0;
    double cache_age_s = 0.0;

    bool operator==(const MetricSample&) const = default;
};

struct RunReport {
    ChannelCounters data;
    ChannelCounters control;
    std::uint64_t overheard_received = 0;  // not part of the ratio or throughput
    std::uint64_t overheard_lost = 0;
    std::uint64_t malformed_dropped = 0;
    std::uint64_t handshake_aborts = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t payload_bits_delivered = 0;
    double sim_time = 0.0;
    double throughput_bps = 0.0;
    double received_packet_ratio = 0.0;
    double mean_location_error_m = 0.0;  // average over samples
    double mean_cache_age_s = 0.0;       // average over samples
    std::vector<MetricSample> samples;

    /// Recomputes the derived fields from the counters and samples.
    void finalize();

    bool operator==(const RunReport&) const = default;
};

/// Delivered addressed payload bits per simulated second.
/// Throws DomainError when sim_time is zero.
double throughput(const RunReport& report);

/// Addressed data frames received over data frames sent; 0 when nothing was sent.
double received_packet_ratio(const RunReport& report);

/// Mean over ordered pairs (i != j) of |cache_i[j].pos - true_pos_j|.
/// Never-updated entries count as the arena diagonal.
double location_error(std::span<const UavState> nodes, const Arena& arena);

/// Mean over ordered pairs (i != j) of now - cache_i[j].updated_at.
double mean_cache_age(std::span<const UavState> nodes, double now);

enum class Metric : std::uint8_t {
    ThroughputBps,
    ReceivedPacketRatio,
    MeanLocationErrorM,
    MeanCacheAgeS,
    DataFramesSent,
    DataFramesReceived,
};

inline constexpr std::array<Metric, 6> kAllMetrics{
    Metric::ThroughputBps,      Metric::ReceivedPacketRatio, Metric::MeanLocationErrorM,
    Metric::MeanCacheAgeS,      Metric::DataFramesSent,      Metric::DataFramesReceived,
};

std::string_view to_string(Metric m) noexcept;
double metric_value(const RunReport& report, Metric m) noexcept;

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample std, (R - 1) denominator; 0 for R == 1

    bool operator==(const MeanStd&) const = default;
};

/// Throws DomainError on an empty sample.
MeanStd mean_std(std::span<const double> values);

struct SweepPoint {
    double value = 0.0;
    std::size_t runs = 0;
    std::array<MeanStd, kAllMetrics.size()> stats{};

    const MeanStd& operator[](Metric m) const { return stats[static_cast<std::size_t>(m)]; }
    bool operator==(const SweepPoint&) const = default;
};

/// Per-metric mean and sample std. Throws DomainError on an empty list.
SweepPoint aggregate(std::span<const RunReport> reports, double value = 0.0);

struct SweepSummary {
    std::string parameter;
    std::uint64_t seed_base = 0;
    std::vector<SweepPoint> points;

    bool operator==(const SweepSummary&) const = default;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

inline constexpr std::string_view kSummaryCsvHeader =
    "parameter,value,metric,mean,std,runs,seed_base";

/// One header line, then one row per (grid value, metric) in grid order.
void write_summary_csv(std::ostream& out, const SweepSummary& summary);

}  // namespace fanet
