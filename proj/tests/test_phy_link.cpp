#include "fanet/ber_kernels.hpp"
#include "fanet/error.hpp"
#include "fanet/phy_link.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fanet;

namespace {

struct Row {
    int index;
    Modulation mod;
    int num, den;
    double rate, sinr, range, duration;
};

// Reference 802.11p MCS table.
const Row kMcsReference[] = {
    {1, Modulation::Bpsk, 1, 2, 3.0, 10.0, 223, 848},  {2, Modulation::Bpsk, 3, 4, 4.5, 11.0, 210, 584},
    {3, Modulation::Qpsk, 1, 2, 6.0, 13.0, 188, 448},  {4, Modulation::Qpsk, 3, 4, 9.0, 15.0, 167, 312},
    {5, Modulation::Qam16, 1, 2, 12.0, 18.0, 141, 248}, {6, Modulation::Qam16, 3, 4, 18.0, 22.0, 112, 176},
    {7, Modulation::Qam64, 1, 2, 24.0, 26.0, 89, 144},  {8, Modulation::Qam64, 3, 4, 27.0, 27.0, 84, 136},
};

}  // namespace

TEST_CASE("mcs_lookup reproduces every cell of the table")
{
    for (const auto& row : kMcsReference) {
        const McsProfile p = mcs_lookup(row.index);
        CHECK(p.index == row.index);
        CHECK(p.modulation == row.mod);
        CHECK(p.coding_rate.numerator == row.num);
        CHECK(p.coding_rate.denominator == row.den);
        CHECK(p.data_rate_mbps == row.rate);
        CHECK(p.min_sinr_db == row.sinr);
        CHECK(p.range_m == row.range);
        CHECK(p.reference_duration_us == row.duration);
    }
    CHECK_THROWS_AS(mcs_lookup(0), UnknownMcsError);
    CHECK_THROWS_AS(mcs_lookup(9), UnknownMcsError);
    try {
        mcs_lookup(9);
    } catch (const UnknownMcsError& e) {
        CHECK(std::string(e.what()).find("1..8") != std::string::npos);
    }
}

TEST_CASE("table text round trip and parse errors")
{
    const auto text = McsTable::builtin().to_text();
    CHECK(McsTable::parse(text) == McsTable::builtin());
    CHECK_THROWS_AS(McsTable::parse("1 BPSK 1/2 3.0 10.0 223 848\n"), ConfigError);
    std::string swapped = text;
    swapped.replace(swapped.find("3.0"), 3, "5.0");  // rates no longer increasing
    CHECK_THROWS_AS(McsTable::parse(swapped), ConfigError);
}

TEST_CASE("db_to_linear")
{
    CHECK(db_to_linear(0) == 1.0);
    CHECK(db_to_linear(10) == doctest::Approx(10.0));
    CHECK(db_to_linear(20) == doctest::Approx(100.0));
}

TEST_CASE("BPSK BER matches the numeric Gaussian tail")
{
    for (double db : {0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
        const double g = db_to_linear(db);
        const double expected = oracle::gaussian_tail(std::sqrt(2.0 * g));
        CAPTURE(db);
        CHECK(bit_error_rate(g, Modulation::Bpsk) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(bit_error_rate(g, Modulation::Qpsk) == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(bit_error_rate(1.0, Modulation::Bpsk) == doctest::Approx(0.0786496035251).epsilon(1e-9));
    CHECK(bit_error_rate(10.0, Modulation::Bpsk) == doctest::Approx(3.87210821552e-6).epsilon(1e-9));
}

TEST_CASE("square QAM BER follows the Gray approximation above the floor")
{
    auto approx = [](double g, double m) {
        return 4.0 / std::log2(m) * (1.0 - 1.0 / std::sqrt(m)) *
               oracle::gaussian_tail(std::sqrt(3.0 * g / (m - 1.0)));
    };
    for (double db : {10.0, 14.0, 20.0}) {
        const double g = db_to_linear(db);
        CAPTURE(db);
        CHECK(bit_error_rate(g, Modulation::Qam16) == doctest::Approx(approx(g, 16)).epsilon(1e-9));
        CHECK(bit_error_rate(g, Modulation::Qam64) == doctest::Approx(approx(g, 64)).epsilon(1e-9));
    }
    // At 0 dB the raw 64QAM approximation dips under 16QAM; the floor keeps the ordering.
    CHECK(approx(1.0, 64) < approx(1.0, 16));
    CHECK(bit_error_rate(1.0, Modulation::Qam64) >= bit_error_rate(1.0, Modulation::Qam16));
}

TEST_CASE("BER limits and domain")
{
    for (auto m : {Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64}) {
        CHECK(bit_error_rate(1e12, m) == 0.0);
        CHECK(bit_error_rate(std::numeric_limits<double>::infinity(), m) == 0.0);
        CHECK_THROWS_AS(bit_error_rate(-1.0, m), DomainError);
        CHECK(bit_error_rate(0.0, m) <= 0.5);
    }
}

TEST_CASE("BER is non-increasing in SNR and ordered by modulation")
{
    const Modulation order[] = {Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64};
    double prev[4] = {1, 1, 1, 1};
    for (double db = -10.0; db <= 40.0; db += 0.25) {
        const double g = db_to_linear(db);
        double cur[4];
        for (int k = 0; k < 4; ++k) {
            cur[k] = bit_error_rate(g, order[k]);
            CHECK(cur[k] <= prev[k]);
            prev[k] = cur[k];
        }
        for (int k = 0; k + 1 < 4; ++k) CHECK(cur[k] <= cur[k + 1]);
    }
}

TEST_CASE("frame success probability")
{
    const LinkModel analytic{LinkModelKind::AnalyticBer, 40.0};
    const LinkModel threshold{LinkModelKind::SinrThreshold, 40.0};
    CHECK(success_from_ber(1e-3, 1000) == doctest::Approx(std::pow(0.999, 1000)).epsilon(1e-12));
    CHECK(success_from_ber(1e-3, 1000) == doctest::Approx(0.36769542477096373).epsilon(1e-12));
    CHECK(success_from_ber(0.0, 1'000'000) == 1.0);

    const auto& m3 = mcs_lookup(3);
    CHECK(frame_success_probability(13.0, m3, 5000, threshold) == 1.0);
    CHECK(frame_success_probability(12.999, m3, 10, threshold) == 0.0);
    CHECK(frame_success_probability(200.0, m3, 100000, analytic) == 1.0);

    // Waterfall ordering across the table for every SNR.
    for (double db = -5.0; db <= 40.0; db += 0.5) {
        for (std::uint64_t bits : {200u, 1088u, 4000u}) {
            double prev = 1.0;
            for (int i = 1; i <= 8; ++i) {
                const double p = frame_success_probability(db, mcs_lookup(i), bits, analytic);
                CHECK(p <= prev);
                CHECK(p >= 0.0);
                prev = p;
            }
        }
    }
}

TEST_CASE("frame airtime")
{
    const LinkModel link{LinkModelKind::AnalyticBer, 40.0};
    CHECK(frame_airtime(800, mcs_lookup(1), link) == doctest::Approx(306.6666667e-6).epsilon(1e-9));
    CHECK(frame_airtime(800, mcs_lookup(8), link) == doctest::Approx(69.6296296e-6).epsilon(1e-9));
    double prev = 1.0;
    double prev_duration = 1e9;
    for (int i = 1; i <= 8; ++i) {
        const double t = frame_airtime(800, mcs_lookup(i), link);
        CHECK(t < prev);
        CHECK(mcs_lookup(i).reference_duration_us < prev_duration);
        prev = t;
        prev_duration = mcs_lookup(i).reference_duration_us;
    }
}

TEST_CASE("in_range")
{
    CHECK(in_range({0, 0, 0}, {0, 0, 100}, 150));
    CHECK_FALSE(in_range({0, 0, 0}, {0, 0, 100}, 50));
    CHECK(in_range({1, 2, 3}, {1, 2, 3}, 0.0));
    CHECK(in_range({0, 0, 0}, {0, 0, 150}, 150));
}

TEST_CASE("Monte-Carlo bit errors agree with the analytic BER")
{
    const std::uint64_t bits = 1'000'000;
    for (double db : {0.0, 4.0, 8.0}) {
        const double p = bit_error_rate(db_to_linear(db), Modulation::Bpsk);
        const auto errors = count_bit_errors_serial(p, bits, 7);
        const double freq = static_cast<double>(errors) / bits;
        CAPTURE(db);
        CHECK(std::abs(freq - p) <= 3.0 * oracle::binomial_sigma(p, bits));
    }
}

TEST_CASE("serial and parallel kernels agree exactly")
{
    for (std::uint64_t bits : {0ull, 1ull, 65535ull, 65536ull, 65537ull, 1'000'003ull}) {
        CHECK(count_bit_errors_serial(0.01, bits, 3) == count_bit_errors_parallel(0.01, bits, 3));
    }
}
