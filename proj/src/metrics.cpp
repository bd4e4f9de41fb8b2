#include "fanet/metrics.hpp"

#include "fanet/error.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace fanet {

void RunReport::finalize()
{
    throughput_bps = sim_time > 0.0 ? throughput(*this) : 0.0;
    received_packet_ratio = fanet::received_packet_ratio(*this);
    if (samples.empty()) {
        mean_location_error_m = 0.0;
        mean_cache_age_s = 0.0;
        return;
    }
    double err = 0.0;
    double age = 0.0;
    for (const auto& s : samples) {
        err += s.location_error_m;
        age += s.cache_age_s;
    }
    mean_location_error_m = err / static_cast<double>(samples.size());
    mean_cache_age_s = age / static_cast<double>(samples.size());
}

double throughput(const RunReport& report)
{
    if (!(report.sim_time > 0.0)) {
        throw DomainError("throughput is undefined for zero simulated time");
    }
    return static_cast<double>(report.payload_bits_delivered) / report.sim_time;
}

double received_packet_ratio(const RunReport& report)
{
    if (report.data.sent == 0) {
        return 0.0;
    }
    return static_cast<double>(report.data.received) / static_cast<double>(report.data.sent);
}

double location_error(std::span<const UavState> nodes, const Arena& arena)
{
    if (nodes.size() < 2) {
        throw DomainError("location error needs at least 2 nodes");
    }
    const double worst = arena.diagonal();
    double total = 0.0;
    for (const auto& holder : nodes) {
        for (const auto& other : nodes) {
            if (holder.id == other.id) continue;
            const auto& entry = holder.cache[other.id.index()];
            total += entry.counter == 0 ? worst : distance(entry.pos, other.true_pos);
        }
    }
    const double pairs = static_cast<double>(nodes.size() * (nodes.size() - 1));
    return total / pairs;
}

double mean_cache_age(std::span<const UavState> nodes, double now)
{
    if (nodes.size() < 2) {
        throw DomainError("cache age needs at least 2 nodes");
    }
    double total = 0.0;
    for (const auto& holder : nodes) {
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j == holder.id.index()) continue;
            total += now - holder.cache[j].updated_at;
        }
    }
    return total / static_cast<double>(nodes.size() * (nodes.size() - 1));
}

std::string_view to_string(Metric m) noexcept
{
    switch (m) {
    case Metric::ThroughputBps:
        return "throughput_bps";
    case Metric::ReceivedPacketRatio:
        return "received_packet_ratio";
    case Metric::MeanLocationErrorM:
        return "mean_location_error_m";
    case Metric::MeanCacheAgeS:
        return "mean_cache_age_s";
    case Metric::DataFramesSent:
        return "data_frames_sent";
    case Metric::DataFramesReceived:
        return "data_frames_received";
    }
    return "?";
}

double metric_value(const RunReport& report, Metric m) noexcept
{
    switch (m) {
    case Metric::ThroughputBps:
        return report.throughput_bps;
    case Metric::ReceivedPacketRatio:
        return report.received_packet_ratio;
    case Metric::MeanLocationErrorM:
        return report.mean_location_error_m;
    case Metric::MeanCacheAgeS:
        return report.mean_cache_age_s;
    case Metric::DataFramesSent:
        return static_cast<double>(report.data.sent);
    case Metric::DataFramesReceived:
        return static_cast<double>(report.data.received);
    }
    return 0.0;
}

MeanStd mean_std(std::span<const double> values)
{
    if (values.empty()) {
        throw DomainError("cannot aggregate an empty sample");
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() == 1) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

SweepPoint aggregate(std::span<const RunReport> reports, double value)
{
    if (reports.empty()) {
        throw DomainError("cannot aggregate an empty list of runs");
    }
    SweepPoint point;
    point.value = value;
    point.runs = reports.size();
    std::vector<double> column(reports.size());
    for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
        for (std::size_t r = 0; r < reports.size(); ++r) {
            column[r] = metric_value(reports[r], kAllMetrics[m]);
        }
        point.stats[m] = mean_std(column);
    }
    return point;
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_summary_csv(std::ostream& out, const SweepSummary& summary)
{
    out << kSummaryCsvHeader << '\n';
    for (const auto& point : summary.points) {
        for (std::size_t m = 0; m < kAllMetrics.size(); ++m) {
            out << summary.parameter << ',' << format_double(point.value) << ','
                << to_string(kAllMetrics[m]) << ',' << format_double(point.stats[m].mean) << ','
                << format_double(point.stats[m].std) << ',' << point.runs << ','
                << summary.seed_base << '\n';
        }
    }
}

}  // namespace fanet
