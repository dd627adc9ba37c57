#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "respire/corpus.hpp"

namespace respire::mfcc {

enum class SpectrumMode { Power, Magnitude };

struct MfccConfig {
    std::size_t frame_length = 2048;
    std::size_t hop = 512;  // overlap 1536
    double pre_emphasis_alpha = 0.97;
    std::size_t num_filters = 40;
    std::size_t num_coeffs = 23;
    std::size_t fft_size = 2048;
    double log_floor = 1e-10;
    SpectrumMode spectrum_mode = SpectrumMode::Power;
    // Index of the first retained cepstral coefficient (1 drops c0).
    std::size_t first_coeff = 1;
    // Clips at any other rate are resampled to this before extraction.
    int expected_rate = 44100;

    // Throws InvalidConfig.
    void validate() const;
    friend bool operator==(const MfccConfig&, const MfccConfig&) = default;
};

// Canonical text form and its digest; every artifact derived from features
// carries the digest so mismatched pipelines are detected.
std::string canonical_string(const MfccConfig& cfg);
std::string config_digest(const MfccConfig& cfg);

// y[0] = x[0], y[n] = x[n] - alpha * x[n-1].
corpus::Signal pre_emphasize(const corpus::Signal& signal, double alpha);

struct WindowVector {
    std::vector<double> weights;
    std::size_t size() const noexcept { return weights.size(); }
};

// W[n] = 0.54 - 0.46 cos(2 pi n / (N - 1)); exactly symmetric.
WindowVector hamming_window(std::size_t n);

// floor((len - frame) / hop) + 1, or 0 when the signal is shorter than a frame.
std::size_t frame_count(std::size_t signal_length, std::size_t frame_length, std::size_t hop);

// Frames k*hop .. k*hop+frame_length, each multiplied by the Hamming window.
// The trailing partial frame is dropped.
std::vector<std::vector<double>> frame_signal(const corpus::Signal& signal, const MfccConfig& cfg);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data);

// Bins 0..fft_size/2 of |X|^2 / fft_size (Power) or |X| (Magnitude); the frame
// is zero-padded to fft_size.
std::vector<double> spectrum(std::span<const double> frame, std::size_t fft_size, SpectrumMode mode);

class FilterBank {
public:
    FilterBank(const MfccConfig& cfg, int sample_rate);

    std::size_t num_filters() const noexcept { return filters_.size(); }
    std::size_t num_bins() const noexcept { return num_bins_; }
    const std::vector<double>& filter(std::size_t i) const { return filters_[i]; }
    // num_filters + 2 edges equally spaced in mel from 0 to Nyquist.
    const std::vector<double>& edge_hz() const noexcept { return edge_hz_; }
    const std::vector<std::size_t>& edge_bins() const noexcept { return edge_bins_; }
    double center_hz(std::size_t i) const { return edge_hz_[i + 1]; }

    std::vector<double> apply(std::span<const double> spectrum) const;

private:
    std::size_t num_bins_;
    std::vector<std::vector<double>> filters_;
    std::vector<double> edge_hz_;
    std::vector<std::size_t> edge_bins_;
};

FilterBank build_filterbank(const MfccConfig& cfg, int sample_rate);

// Orthonormal DCT-II and its inverse (DCT-III with the same scaling).
std::vector<double> dct_ii(std::span<const double> input);
std::vector<double> inverse_dct_ii(std::span<const double> coeffs);

// M rows (cepstral index) by N columns (frame), row-major.
class MfccMatrix {
public:
    MfccMatrix() = default;
    MfccMatrix(std::size_t coeffs, std::size_t frames) : coeffs_(coeffs), frames_(frames), data_(coeffs * frames) {}

    std::size_t coeffs() const noexcept { return coeffs_; }
    std::size_t frames() const noexcept { return frames_; }
    double& operator()(std::size_t c, std::size_t t) { return data_[c * frames_ + t]; }
    double operator()(std::size_t c, std::size_t t) const { return data_[c * frames_ + t]; }
    std::span<const double> row(std::size_t c) const { return {data_.data() + c * frames_, frames_}; }

    // The first `m` coefficient rows.
    MfccMatrix leading_rows(std::size_t m) const;

    friend bool operator==(const MfccMatrix&, const MfccMatrix&) = default;

private:
    std::size_t coeffs_ = 0;
    std::size_t frames_ = 0;
    std::vector<double> data_;
};

// Per-frame log filterbank energies that feed the DCT, frames x num_filters.
std::vector<std::vector<double>> log_filterbank_energies(const corpus::Signal& signal, const MfccConfig& cfg);

// The full chain: pre-emphasis, Hamming framing, FFT spectrum, mel filterbank,
// floored natural log, orthonormal DCT-II, coefficients first_coeff ..
// first_coeff + num_coeffs - 1.
MfccMatrix compute_mfcc(const corpus::Signal& signal, const MfccConfig& cfg);

}  // namespace respire::mfcc
