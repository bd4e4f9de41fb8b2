#include "fanet/phy_link.hpp"

#include "fanet/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fanet {

namespace {

constexpr std::array<McsProfile, McsTable::kRows> kBuiltinRows{{
    {1, Modulation::Bpsk, {1, 2}, 3.0, 10.0, 223.0, 848.0},
    {2, Modulation::Bpsk, {3, 4}, 4.5, 11.0, 210.0, 584.0},
    {3, Modulation::Qpsk, {1, 2}, 6.0, 13.0, 188.0, 448.0},
    {4, Modulation::Qpsk, {3, 4}, 9.0, 15.0, 167.0, 312.0},
    {5, Modulation::Qam16, {1, 2}, 12.0, 18.0, 141.0, 248.0},
    {6, Modulation::Qam16, {3, 4}, 18.0, 22.0, 112.0, 176.0},
    {7, Modulation::Qam64, {1, 2}, 24.0, 26.0, 89.0, 144.0},
    {8, Modulation::Qam64, {3, 4}, 27.0, 27.0, 84.0, 136.0},
}};

Modulation parse_modulation(const std::string& s, int line)
{
    if (s == "BPSK") return Modulation::Bpsk;
    if (s == "QPSK") return Modulation::Qpsk;
    if (s == "16QAM" || s == "QAM16" || s == "QAM-16") return Modulation::Qam16;
    if (s == "64QAM" || s == "QAM64" || s == "QAM-64") return Modulation::Qam64;
    throw ConfigError("line " + std::to_string(line) + ": unknown modulation '" + s + "'");
}

CodingRate parse_rate(const std::string& s, int line)
{
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(line) + ": bad coding rate '" + s + "'");
}

void check_table(const std::array<McsProfile, McsTable::kRows>& rows)
{
    for (int i = 0; i < McsTable::kRows; ++i) {
        const auto& r = rows[i];
        if (r.index != i + 1) {
            throw ConfigError("MCS rows must be numbered 1..8 in order");
        }
        if (!(r.data_rate_mbps > 0.0) || !(r.range_m > 0.0) || r.coding_rate.denominator <= 0 ||
            r.coding_rate.numerator <= 0) {
            throw ConfigError("MCS " + std::to_string(r.index) + ": non-positive rate or range");
        }
        if (i > 0) {
            const auto& p = rows[i - 1];
            if (!(r.data_rate_mbps > p.data_rate_mbps)) {
                throw ConfigError("MCS data rate must strictly increase with index");
            }
            if (r.min_sinr_db < p.min_sinr_db) {
                throw ConfigError("MCS min SINR must not decrease with index");
            }
            if (r.range_m > p.range_m) {
                throw ConfigError("MCS range must not increase with index");
            }
        }
    }
}

double modulation_order(Modulation m)
{
    switch (m) {
    case Modulation::Qam16:
        return 16.0;
    case Modulation::Qam64:
        return 64.0;
    default:
        return 4.0;
    }
}

double square_qam_ber(double g, double m)
{
    const double k = std::log2(m);
    return (4.0 / k) * (1.0 - 1.0 / std::sqrt(m)) * q_function(std::sqrt(3.0 * g / (m - 1.0)));
}

}  // namespace

std::string_view to_string(Modulation m) noexcept
{
    switch (m) {
    case Modulation::Bpsk:
        return "BPSK";
    case Modulation::Qpsk:
        return "QPSK";
    case Modulation::Qam16:
        return "16QAM";
    case Modulation::Qam64:
        return "64QAM";
    }
    return "?";
}

std::string_view to_string(LinkModelKind k) noexcept
{
    return k == LinkModelKind::AnalyticBer ? "analytic" : "threshold";
}

McsTable::McsTable(const std::array<McsProfile, kRows>& rows) : rows_(rows) { check_table(rows_); }

const McsTable& McsTable::builtin()
{
    static const McsTable table(kBuiltinRows);
    return table;
}

McsTable McsTable::parse(std::string_view text)
{
    std::array<McsProfile, kRows> rows{};
    int filled = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        for (auto& c : line) {
            if (c == '|' || c == ',') c = ' ';
        }
        std::istringstream fields(line);
        McsProfile row;
        std::string modulation, rate;
        if (!(fields >> row.index >> modulation >> rate >> row.data_rate_mbps >> row.min_sinr_db >>
              row.range_m >> row.reference_duration_us)) {
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected 7 columns (MCS, modulation, coding, rate, min SINR, "
                              "range, duration)");
        }
        std::string extra;
        if (fields >> extra) {
            throw ConfigError("line " + std::to_string(line_no) + ": trailing column '" + extra + "'");
        }
        row.modulation = parse_modulation(modulation, line_no);
        row.coding_rate = parse_rate(rate, line_no);
        if (filled >= kRows) {
            throw ConfigError("line " + std::to_string(line_no) + ": more than 8 MCS rows");
        }
        rows[filled++] = row;
    }
    if (filled != kRows) {
        throw ConfigError("MCS table needs exactly 8 rows, found " + std::to_string(filled));
    }
    return McsTable(rows);
}

McsTable McsTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open MCS table '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const McsProfile& McsTable::lookup(int index) const
{
    if (index < 1 || index > kRows) {
        throw UnknownMcsError("unknown MCS " + std::to_string(index) + " (valid range 1..8)");
    }
    return rows_[static_cast<std::size_t>(index - 1)];
}

std::string McsTable::to_text() const
{
    std::ostringstream out;
    out << "# MCS  Modulation  Coding  Rate_Mbps  MinSINR_dB  Range_m  Duration\n";
    out << std::fixed;
    for (const auto& r : rows_) {
        out << std::left << std::setw(7) << r.index << std::setw(12) << to_string(r.modulation)
            << std::setw(8)
            << (std::to_string(r.coding_rate.numerator) + "/" +
                std::to_string(r.coding_rate.denominator))
            << std::setprecision(1) << std::setw(11) << r.data_rate_mbps << std::setw(12)
            << r.min_sinr_db << std::setprecision(0) << std::setw(9) << r.range_m
            << r.reference_duration_us << '\n';
    }
    return out.str();
}

McsProfile mcs_lookup(int index) { return McsTable::builtin().lookup(index); }

double db_to_linear(double snr_db) noexcept { return std::pow(10.0, snr_db / 10.0); }

double q_function(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double bit_error_rate(double snr_linear, Modulation modulation)
{
    if (std::isnan(snr_linear) || snr_linear < 0.0) {
        throw DomainError("SNR must be non-negative (linear scale)");
    }
    if (std::isinf(snr_linear)) {
        return 0.0;
    }
    const double psk = q_function(std::sqrt(2.0 * snr_linear));
    switch (modulation) {
    case Modulation::Bpsk:
    case Modulation::Qpsk:
        return psk;
    case Modulation::Qam16:
        return std::max(square_qam_ber(snr_linear, 16.0), psk);
    case Modulation::Qam64:
        return std::max(square_qam_ber(snr_linear, modulation_order(modulation)),
                        bit_error_rate(snr_linear, Modulation::Qam16));
    }
    return psk;
}

double success_from_ber(double ber, std::uint64_t length_bits)
{
    if (!(ber >= 0.0 && ber <= 1.0)) {
        throw DomainError("bit error rate must lie in [0, 1]");
    }
    if (ber == 0.0) {
        return 1.0;
    }
    if (ber == 1.0) {
        return 0.0;
    }
    return std::exp(static_cast<double>(length_bits) * std::log1p(-ber));
}

double frame_success_probability(double snr_db, const McsProfile& mcs, std::uint64_t length_bits,
                                 const LinkModel& model)
{
    if (length_bits < 1) {
        throw DomainError("frame length must be at least one bit");
    }
    if (model.kind == LinkModelKind::SinrThreshold) {
        return snr_db >= mcs.min_sinr_db ? 1.0 : 0.0;
    }
    const double ber = bit_error_rate(db_to_linear(snr_db), mcs.modulation);
    return success_from_ber(ber, length_bits);
}

double frame_airtime(std::uint64_t length_bits, const McsProfile& mcs, const LinkModel& model)
{
    if (length_bits < 1) {
        throw DomainError("frame length must be at least one bit");
    }
    return model.preamble_us * 1e-6 +
           static_cast<double>(length_bits) / (mcs.data_rate_mbps * 1e6);
}

bool in_range(const Position& a, const Position& b, double comm_range) noexcept
{
    return distance(a, b) <= comm_range;
}

}  // namespace fanet
