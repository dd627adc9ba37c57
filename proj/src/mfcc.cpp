#include "respire/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "respire/error.hpp"
#include "respire/text.hpp"

namespace respire::mfcc {

using corpus::Signal;

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void MfccConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (frame_length < 2) fail("frame_length must be at least 2");
    if (hop == 0 || hop > frame_length) fail("hop must be in (0, frame_length]");
    if (!is_power_of_two(fft_size)) fail("fft_size must be a power of two");
    if (fft_size < frame_length) fail("fft_size must be at least frame_length");
    if (!(pre_emphasis_alpha >= 0.0 && pre_emphasis_alpha < 1.0)) fail("pre_emphasis_alpha must be in [0, 1)");
    if (num_filters < 2) fail("num_filters must be at least 2");
    if (first_coeff > 1) fail("first_coeff must be 0 or 1");
    if (num_coeffs < 2) fail("num_coeffs must be at least 2");
    if (first_coeff + num_coeffs > num_filters)
        fail("num_coeffs=" + std::to_string(num_coeffs) + " exceeds the " + std::to_string(num_filters) +
             "-filter bank");
    if (!(log_floor > 0.0)) fail("log_floor must be positive");
    if (expected_rate <= 0) fail("expected_rate must be positive");
}

std::string canonical_string(const MfccConfig& cfg) {
    return "frame_length=" + std::to_string(cfg.frame_length) + ";hop=" + std::to_string(cfg.hop) +
           ";pre_emphasis_alpha=" + text::format_real(cfg.pre_emphasis_alpha) +
           ";num_filters=" + std::to_string(cfg.num_filters) + ";num_coeffs=" + std::to_string(cfg.num_coeffs) +
           ";fft_size=" + std::to_string(cfg.fft_size) + ";log_floor=" + text::format_real(cfg.log_floor) +
           ";spectrum_mode=" + (cfg.spectrum_mode == SpectrumMode::Power ? "power" : "magnitude") +
           ";first_coeff=" + std::to_string(cfg.first_coeff) + ";expected_rate=" + std::to_string(cfg.expected_rate);
}

std::string config_digest(const MfccConfig& cfg) { return text::digest_hex(canonical_string(cfg)); }

Signal pre_emphasize(const Signal& signal, double alpha) {
    if (signal.samples.empty()) throw Error(Errc::EmptySignal, "cannot pre-emphasize an empty signal");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "alpha must be in [0, 1)");
    Signal out;
    out.sample_rate = signal.sample_rate;
    out.samples.resize(signal.samples.size());
    out.samples[0] = signal.samples[0];
    for (std::size_t n = 1; n < signal.samples.size(); ++n)
        out.samples[n] = signal.samples[n] - alpha * signal.samples[n - 1];
    return out;
}

WindowVector hamming_window(std::size_t n) {
    if (n < 2) throw Error(Errc::WindowTooShort, "Hamming window needs N >= 2, got " + std::to_string(n));
    WindowVector w;
    w.weights.resize(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        const double v = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
        w.weights[i] = v;
        w.weights[n - 1 - i] = v;
    }
    return w;
}

std::size_t frame_count(std::size_t signal_length, std::size_t frame_length, std::size_t hop) {
    if (hop == 0 || signal_length < frame_length) return 0;
    return (signal_length - frame_length) / hop + 1;
}

std::vector<std::vector<double>> frame_signal(const Signal& signal, const MfccConfig& cfg) {
    if (cfg.hop == 0 || cfg.hop > cfg.frame_length) throw Error(Errc::InvalidConfig, "hop must be in (0, frame_length]");
    if (signal.samples.size() < cfg.frame_length)
        throw Error(Errc::SignalTooShort, "signal of " + std::to_string(signal.samples.size()) +
                                              " samples is shorter than one frame of " +
                                              std::to_string(cfg.frame_length));
    const auto window = hamming_window(cfg.frame_length);
    const auto count = frame_count(signal.samples.size(), cfg.frame_length, cfg.hop);
    std::vector<std::vector<double>> frames(count, std::vector<double>(cfg.frame_length));
    for (std::size_t k = 0; k < count; ++k) {
        const double* src = signal.samples.data() + k * cfg.hop;
        for (std::size_t n = 0; n < cfg.frame_length; ++n) frames[k][n] = src[n] * window.weights[n];
    }
    return frames;
}

double hz_to_mel(double hz) {
    if (!(hz >= 0.0)) throw Error(Errc::NegativeFrequency, "frequency " + text::format_real(hz));
    return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) {
    if (!(mel >= 0.0)) throw Error(Errc::NegativeFrequency, "mel value " + text::format_real(mel));
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

void fft(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw Error(Errc::InvalidConfig, "FFT size must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddles evaluated directly rather than by recurrence.
    std::vector<std::complex<double>> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const auto t = twiddle[k * stride] * data[start + k + half];
                data[start + k + half] = data[start + k] - t;
                data[start + k] += t;
            }
        }
    }
}

std::vector<double> spectrum(std::span<const double> frame, std::size_t fft_size, SpectrumMode mode) {
    if (frame.size() > fft_size) throw Error(Errc::InvalidConfig, "frame longer than fft_size");
    std::vector<std::complex<double>> buf(fft_size);
    for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
    fft(buf);
    std::vector<double> out(fft_size / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = mode == SpectrumMode::Power ? std::norm(buf[k]) / static_cast<double>(fft_size) : std::abs(buf[k]);
    return out;
}

FilterBank::FilterBank(const MfccConfig& cfg, int sample_rate) : num_bins_(cfg.fft_size / 2 + 1) {
    if (cfg.num_filters < 2) throw Error(Errc::InvalidConfig, "num_filters must be at least 2");
    if (sample_rate <= 0) throw Error(Errc::InvalidConfig, "sample rate must be positive");
    if (!is_power_of_two(cfg.fft_size)) throw Error(Errc::InvalidConfig, "fft_size must be a power of two");
    if (cfg.num_filters > num_bins_)
        throw Error(Errc::TooManyFilters, std::to_string(cfg.num_filters) + " filters over " +
                                              std::to_string(num_bins_) + " FFT bins");

    const double nyquist = sample_rate / 2.0;
    const double mel_max = hz_to_mel(nyquist);
    const std::size_t edges = cfg.num_filters + 2;
    edge_hz_.resize(edges);
    edge_bins_.resize(edges);
    for (std::size_t j = 0; j < edges; ++j) {
        const double mel = mel_max * static_cast<double>(j) / static_cast<double>(edges - 1);
        edge_hz_[j] = j + 1 == edges ? nyquist : mel_to_hz(mel);
        const double bin = std::round(edge_hz_[j] * static_cast<double>(cfg.fft_size) / sample_rate);
        edge_bins_[j] = std::min(static_cast<std::size_t>(bin), num_bins_ - 1);
    }

    filters_.assign(cfg.num_filters, std::vector<double>(num_bins_, 0.0));
    for (std::size_t i = 0; i < cfg.num_filters; ++i) {
        const std::size_t lo = edge_bins_[i], mid = edge_bins_[i + 1], hi = edge_bins_[i + 2];
        auto& row = filters_[i];
        for (std::size_t k = lo + 1; k < mid; ++k)
            row[k] = static_cast<double>(k - lo) / static_cast<double>(mid - lo);
        for (std::size_t k = mid + 1; k < hi; ++k)
            row[k] = static_cast<double>(hi - k) / static_cast<double>(hi - mid);
        row[mid] = 1.0;
    }
}

std::vector<double> FilterBank::apply(std::span<const double> spec) const {
    if (spec.size() != num_bins_)
        throw Error(Errc::DimensionMismatch, "spectrum has " + std::to_string(spec.size()) + " bins, bank expects " +
                                                 std::to_string(num_bins_));
    std::vector<double> energies(filters_.size(), 0.0);
    for (std::size_t i = 0; i < filters_.size(); ++i) {
        const auto& row = filters_[i];
        const std::size_t lo = edge_bins_[i], hi = edge_bins_[i + 2];
        double sum = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) sum += row[k] * spec[k];
        energies[i] = sum;
    }
    return energies;
}

FilterBank build_filterbank(const MfccConfig& cfg, int sample_rate) { return FilterBank(cfg, sample_rate); }

namespace {

// cos(pi k (2n+1) / 2N) with orthonormal scaling folded in, cached per size.
const std::vector<double>& dct_basis(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<const std::vector<double>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto basis = std::make_unique<std::vector<double>>(n * n);
        const double s0 = std::sqrt(1.0 / static_cast<double>(n));
        const double sk = std::sqrt(2.0 / static_cast<double>(n));
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                (*basis)[k * n + i] = (k == 0 ? s0 : sk) *
                                      std::cos(std::numbers::pi * static_cast<double>(k) *
                                               (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
        slot = std::move(basis);
    }
    return *slot;
}

std::shared_ptr<const FilterBank> cached_filterbank(const MfccConfig& cfg, int sample_rate) {
    static std::mutex mutex;
    static std::map<std::pair<std::string, int>, std::shared_ptr<const FilterBank>> cache;
    auto key = std::pair{std::to_string(cfg.fft_size) + "/" + std::to_string(cfg.num_filters), sample_rate};
    std::lock_guard lock(mutex);
    auto& slot = cache[key];
    if (!slot) slot = std::make_shared<const FilterBank>(cfg, sample_rate);
    return slot;
}

}  // namespace

std::vector<double> dct_ii(std::span<const double> input) {
    const std::size_t n = input.size();
    if (n == 0) return {};
    const auto& basis = dct_basis(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += basis[k * n + i] * input[i];
        out[k] = sum;
    }
    return out;
}

std::vector<double> inverse_dct_ii(std::span<const double> coeffs) {
    const std::size_t n = coeffs.size();
    if (n == 0) return {};
    const auto& basis = dct_basis(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += basis[k * n + i] * coeffs[k];
        out[i] = sum;
    }
    return out;
}

MfccMatrix MfccMatrix::leading_rows(std::size_t m) const {
    if (m > coeffs_) throw Error(Errc::InvalidConfig, "requested more coefficient rows than computed");
    MfccMatrix out(m, frames_);
    std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(m * frames_), out.data_.begin());
    return out;
}

std::vector<std::vector<double>> log_filterbank_energies(const Signal& signal, const MfccConfig& cfg) {
    cfg.validate();
    if (signal.sample_rate <= 0) throw Error(Errc::InvalidConfig, "signal has no sample rate");
    const auto emphasized = pre_emphasize(signal, cfg.pre_emphasis_alpha);
    const auto frames = frame_signal(emphasized, cfg);
    const auto bank = cached_filterbank(cfg, signal.sample_rate);

    std::vector<std::vector<double>> out;
    out.reserve(frames.size());
    for (const auto& frame : frames) {
        auto energies = bank->apply(spectrum(frame, cfg.fft_size, cfg.spectrum_mode));
        for (double& e : energies) e = std::log(std::max(e, cfg.log_floor));
        out.push_back(std::move(energies));
    }
    return out;
}

MfccMatrix compute_mfcc(const Signal& signal, const MfccConfig& cfg) {
    const auto log_energies = log_filterbank_energies(signal, cfg);
    MfccMatrix m(cfg.num_coeffs, log_energies.size());
    for (std::size_t t = 0; t < log_energies.size(); ++t) {
        const auto cepstrum = dct_ii(log_energies[t]);
        for (std::size_t c = 0; c < cfg.num_coeffs; ++c) m(c, t) = cepstrum[cfg.first_coeff + c];
    }
    return m;
}

}  // namespace respire::mfcc
