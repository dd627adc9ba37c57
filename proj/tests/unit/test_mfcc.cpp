#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "respire/error.hpp"
#include "respire/mfcc.hpp"

using namespace respire;
using namespace respire::mfcc;
using corpus::Signal;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::IoError;
}

MfccConfig small_config() {
    MfccConfig c;
    c.frame_length = 64;
    c.hop = 64;
    c.fft_size = 64;
    c.num_filters = 6;
    c.num_coeffs = 5;
    c.expected_rate = 8000;
    return c;
}

}  // namespace

TEST_CASE("pre-emphasis difference equation") {
    const auto same = pre_emphasize(Signal{{0.3, -0.2, 0.9}, 8000}, 0.0);
    CHECK(same.samples == std::vector<double>{0.3, -0.2, 0.9});
    const auto y = pre_emphasize(Signal{{1, 1, 1}, 8000}, 0.97);
    CHECK(y.samples[0] == 1.0);
    CHECK(y.samples[1] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(y.samples[2] == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(code_of([] { pre_emphasize(Signal{{}, 8000}, 0.5); }) == Errc::EmptySignal);
}

TEST_CASE("pre-emphasis boosts high frequencies of white noise") {
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    Signal s{std::vector<double>(256), 8000};
    for (auto& v : s.samples) v = g(rng);
    const auto y = pre_emphasize(s, 0.97);
    auto hf_ratio = [](const std::vector<double>& x) {
        const auto p = oracle::dft_power(x, x.size());
        double lo = 0, hi = 0;
        for (std::size_t k = 0; k < p.size(); ++k) (k < p.size() / 2 ? lo : hi) += p[k];
        return hi / (lo + hi);
    };
    CHECK(hf_ratio(y.samples) > hf_ratio(s.samples));
}

TEST_CASE("Hamming endpoints, midpoint, symmetry, bounds") {
    for (std::size_t n = 2; n <= 4096; n += (n < 64 ? 1 : 37)) {
        const auto w = hamming_window(n).weights;
        REQUIRE(w.size() == n);
        CHECK(w.front() == doctest::Approx(0.08).epsilon(1e-12));
        CHECK(w.back() == doctest::Approx(0.08).epsilon(1e-12));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(w[i] - w[n - 1 - i]) <= 1e-12);
            CHECK(w[i] >= 0.08 - 1e-12);
            CHECK(w[i] <= 1.0);
        }
    }
    CHECK(hamming_window(5).weights[2] == 1.0);
    CHECK(code_of([] { hamming_window(1); }) == Errc::WindowTooShort);
}

TEST_CASE("Hamming sum against direct summation") {
    const auto w = hamming_window(2048).weights;
    long double direct = 0;
    for (std::size_t i = 0; i < 2048; ++i)
        direct += 0.54L - 0.46L * std::cos(2.0L * std::numbers::pi_v<long double> * i / 2047.0L);
    double sum = 0;
    for (double v : w) sum += v;
    CHECK(std::abs(sum - static_cast<double>(direct)) < 1e-9);
}

TEST_CASE("frame counts") {
    CHECK(frame_count(2048, 2048, 512) == 1);
    CHECK(frame_count(219618, 2048, 512) == 425);
    CHECK(frame_count(2047, 2048, 512) == 0);
    std::mt19937 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t frame = 1 + rng() % 300, hop = 1 + rng() % frame, len = rng() % 3000;
        CHECK(frame_count(len, frame, hop) == oracle::frame_count(len, frame, hop));
    }
    MfccConfig c;
    CHECK(code_of([&] { frame_signal(Signal{std::vector<double>(2047, 0.0), 44100}, c); }) == Errc::SignalTooShort);
}

TEST_CASE("frames are windowed slices at multiples of hop") {
    MfccConfig c = small_config();
    c.hop = 16;
    Signal s{std::vector<double>(100), 8000};
    for (std::size_t i = 0; i < 100; ++i) s.samples[i] = static_cast<double>(i);
    const auto frames = frame_signal(s, c);
    REQUIRE(frames.size() == 3);
    const auto w = oracle::hamming(64);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < 64; ++n) CHECK(frames[k][n] == doctest::Approx(double(k * 16 + n) * w[n]));
}

TEST_CASE("mel scale") {
    CHECK(hz_to_mel(0.0) == 0.0);
    const double expected = 2595.0 * std::log(1.0 + 1000.0 / 700.0) / std::log(10.0);
    CHECK(std::abs(hz_to_mel(1000.0) - expected) / expected < 1e-9);
    CHECK(hz_to_mel(1000.0) == doctest::Approx(999.99).epsilon(1e-4));
    CHECK(std::abs(mel_to_hz(hz_to_mel(4410.0)) - 4410.0) < 1e-6);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 22050.0);
    for (int i = 0; i < 1000; ++i) {
        const double f = u(rng);
        CHECK(std::abs(mel_to_hz(hz_to_mel(f)) - f) <= 1e-9 * std::max(1.0, f));
    }
    CHECK(code_of([] { hz_to_mel(-1.0); }) == Errc::NegativeFrequency);
    CHECK(code_of([] { mel_to_hz(-1.0); }) == Errc::NegativeFrequency);
}

TEST_CASE("FFT matches the naive DFT") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t n : {1u, 2u, 8u, 64u, 2048u}) {
        std::vector<double> x(n);
        for (auto& v : x) v = u(rng);
        const auto fast = spectrum(x, n, SpectrumMode::Power);
        const auto slow = oracle::dft_power(x, n);
        CHECK(oracle::rel_error(fast, slow) < 1e-9);
    }
    std::vector<std::complex<double>> bad(6);
    CHECK(code_of([&] { fft(bad); }) == Errc::InvalidConfig);
}

TEST_CASE("filterbank shape") {
    const MfccConfig c;
    const auto bank = build_filterbank(c, 44100);
    REQUIRE(bank.num_filters() == 40);
    REQUIRE(bank.num_bins() == 1025);
    for (std::size_t i = 0; i < 40; ++i) {
        const auto f = bank.filter(i);
        const auto lo = bank.edge_bins()[i], mid = bank.edge_bins()[i + 1], hi = bank.edge_bins()[i + 2];
        CHECK(*std::max_element(f.begin(), f.end()) == 1.0);
        CHECK(f[mid] == 1.0);
        if (lo != mid) CHECK(f[lo] == 0.0);
        if (hi != mid) CHECK(f[hi] == 0.0);
        for (std::size_t k = 0; k < f.size(); ++k) {
            CHECK(f[k] >= 0.0);
            if (k < lo || k > hi) CHECK(f[k] == 0.0);
            if (k > lo && k <= mid) CHECK(f[k] >= f[k - 1]);
            if (k > mid && k <= hi) CHECK(f[k] <= f[k - 1]);
        }
    }
    // shared slopes complement each other
    for (std::size_t i = 0; i + 1 < 40; ++i)
        for (std::size_t k = bank.edge_bins()[i + 1] + 1; k < bank.edge_bins()[i + 2]; ++k)
            CHECK(bank.filter(i)[k] + bank.filter(i + 1)[k] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bank.edge_hz().back() == 22050.0);
    CHECK(bank.edge_hz().front() == 0.0);
}

TEST_CASE("filter centers are equally spaced in mel") {
    const MfccConfig c;
    const auto bank = build_filterbank(c, 44100);
    const double step = oracle::mel(22050.0) / 41.0;
    CHECK(std::abs(bank.center_hz(1) - oracle::inv_mel(2.0 * step)) < 1e-9 * bank.center_hz(1));
    for (std::size_t i = 0; i < 40; ++i)
        CHECK(hz_to_mel(bank.center_hz(i)) == doctest::Approx(step * double(i + 1)).epsilon(1e-9));
}

TEST_CASE("filterbank equals the oracle construction") {
    for (std::size_t fft_size : {64u, 512u, 2048u}) {
        MfccConfig c;
        c.fft_size = fft_size;
        c.frame_length = fft_size;
        c.num_filters = fft_size == 64 ? 6 : 40;
        for (int rate : {8000, 16000, 44100}) {
            const auto bank = build_filterbank(c, rate);
            const auto ref = oracle::filterbank(c.num_filters, fft_size, rate);
            for (std::size_t i = 0; i < c.num_filters; ++i) {
                const auto f = bank.filter(i);
                CHECK(std::equal(f.begin(), f.end(), ref[i].begin()));
            }
        }
    }
    MfccConfig c;
    c.fft_size = 64;
    c.frame_length = 64;
    c.num_filters = 40;
    CHECK(code_of([&] { build_filterbank(c, 44100); }) == Errc::TooManyFilters);
}

TEST_CASE("DCT orthonormality") {
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> u(-30, 5);
    for (std::size_t n : {2u, 6u, 40u}) {
        std::vector<double> x(n);
        for (auto& v : x) v = u(rng);
        const auto c = dct_ii(x);
        CHECK(oracle::rel_error(c, oracle::dct(x)) < 1e-12);
        CHECK(oracle::rel_error(inverse_dct_ii(c), x) < 1e-9);
    }
}

TEST_CASE("random frames match the naive oracle") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    MfccConfig c = small_config();
    for (int trial = 0; trial < 20; ++trial) {
        Signal s{std::vector<double>(64), 8000};
        for (auto& v : s.samples) v = u(rng);
        const auto m = compute_mfcc(s, c);
        REQUIRE(m.frames() == 1);
        const auto ref = oracle::mfcc_frame(s.samples, c, 8000);
        std::vector<double> got(m.coeffs());
        for (std::size_t k = 0; k < got.size(); ++k) got[k] = m(k, 0);
        CHECK(oracle::rel_error(got, ref) < 1e-9);
    }
}

TEST_CASE("DC input lands in the first filter") {
    MfccConfig c;
    c.pre_emphasis_alpha = 0.0;
    Signal s{std::vector<double>(2048, 1.0), 44100};
    const auto logs = log_filterbank_energies(s, c);
    REQUIRE(logs.size() == 1);
    CHECK(std::max_element(logs[0].begin(), logs[0].end()) - logs[0].begin() == 0);
    const auto m = compute_mfcc(s, c);
    const auto ref = oracle::mfcc_frame(s.samples, c, 44100);
    std::vector<double> got(m.coeffs());
    for (std::size_t k = 0; k < got.size(); ++k) got[k] = m(k, 0);
    CHECK(oracle::rel_error(got, ref) < 1e-6);
}

TEST_CASE("silence gives zero cepstrum") {
    const MfccConfig c;
    Signal s{std::vector<double>(4096, 0.0), 44100};
    const auto logs = log_filterbank_energies(s, c);
    for (const auto& frame : logs)
        for (double e : frame) CHECK(e == std::log(c.log_floor));
    const auto m = compute_mfcc(s, c);
    CHECK(m.coeffs() == 23);
    CHECK(m.frames() == frame_count(4096, 2048, 512));
    for (std::size_t k = 0; k < m.coeffs(); ++k)
        for (std::size_t t = 0; t < m.frames(); ++t) CHECK(std::abs(m(k, t)) < 1e-9);
}

TEST_CASE("1 kHz tone peaks in the filter covering 1 kHz") {
    MfccConfig c;
    c.pre_emphasis_alpha = 0.0;
    Signal s{std::vector<double>(4096), 44100};
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 44100.0);
    const auto logs = log_filterbank_energies(s, c);
    const auto bank = build_filterbank(c, 44100);
    const auto best = static_cast<std::size_t>(std::max_element(logs[0].begin(), logs[0].end()) - logs[0].begin());
    CHECK(bank.edge_hz()[best] < 1000.0);
    CHECK(bank.edge_hz()[best + 2] > 1000.0);
}

TEST_CASE("magnitude mode and first coefficient switch") {
    MfccConfig c = small_config();
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    Signal s{std::vector<double>(64), 8000};
    for (auto& v : s.samples) v = u(rng);
    c.first_coeff = 0;
    const auto with_c0 = compute_mfcc(s, c);
    c.first_coeff = 1;
    const auto without = compute_mfcc(s, c);
    for (std::size_t k = 0; k + 1 < c.num_coeffs; ++k) CHECK(with_c0(k + 1, 0) == without(k, 0));
    c.spectrum_mode = SpectrumMode::Magnitude;
    CHECK_FALSE(compute_mfcc(s, c) == without);
}

TEST_CASE("leading rows equal a smaller extraction") {
    MfccConfig c;
    Signal s{std::vector<double>(8192), 44100};
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& v : s.samples) v = u(rng);
    c.num_coeffs = 39;
    const auto big = compute_mfcc(s, c);
    c.num_coeffs = 23;
    CHECK(big.leading_rows(23) == compute_mfcc(s, c));
    CHECK(compute_mfcc(s, c) == compute_mfcc(s, c));
}

TEST_CASE("config validation and digest") {
    MfccConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.hop = 0;
    CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidConfig);
    bad = c;
    bad.fft_size = 1000;
    CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidConfig);
    bad = c;
    bad.num_coeffs = 40;
    CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidConfig);
    bad = c;
    bad.num_coeffs = 39;
    CHECK_NOTHROW(bad.validate());
    CHECK(config_digest(c) == config_digest(MfccConfig{}));
    CHECK(config_digest(c) != config_digest(bad));
}
