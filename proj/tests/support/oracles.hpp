#pragma once

// Reference implementations written straight from the textbook formulas.
// They are deliberately slow and share no code with the library beyond the
// plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "respire/mfcc.hpp"
#include "respire/svm.hpp"
#include "respire/tree.hpp"
#include "respire/types.hpp"

namespace oracle {

inline double mel(double hz) { return 2595.0 * std::log(1.0 + hz / 700.0) / std::log(10.0); }
inline double inv_mel(double m) { return 700.0 * (std::exp(m * std::log(10.0) / 2595.0) - 1.0); }

inline std::vector<double> hamming(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    return w;
}

// Zero-padded O(N^2) DFT, one-sided power |X_k|^2 / N.
inline std::vector<double> dft_power(std::span<const double> frame, std::size_t n) {
    std::vector<double> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < frame.size(); ++t) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += frame[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = std::norm(acc) / static_cast<double>(n);
    }
    return out;
}

// Orthonormal DCT-II by direct summation.
inline std::vector<double> dct(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += v[i] * std::cos(std::numbers::pi / static_cast<double>(n) * (static_cast<double>(i) + 0.5) *
                                 static_cast<double>(k));
        out[k] = s * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
    }
    return out;
}

// Triangles between mel-spaced edges snapped to the nearest FFT bin.
inline std::vector<std::vector<double>> filterbank(std::size_t filters, std::size_t fft, double rate) {
    const std::size_t bins = fft / 2 + 1;
    std::vector<long> edge(filters + 2);
    for (std::size_t j = 0; j < edge.size(); ++j) {
        const double hz = j + 1 == edge.size() ? rate / 2.0
                                               : inv_mel(mel(rate / 2.0) * static_cast<double>(j) /
                                                         static_cast<double>(filters + 1));
        edge[j] = std::min<long>(std::lround(hz * static_cast<double>(fft) / rate), static_cast<long>(bins) - 1);
    }
    std::vector<std::vector<double>> bank(filters, std::vector<double>(bins, 0.0));
    for (std::size_t i = 0; i < filters; ++i) {
        const long lo = edge[i], c = edge[i + 1], hi = edge[i + 2];
        for (long k = 0; k < static_cast<long>(bins); ++k) {
            double w = 0.0;
            if (k == c) w = 1.0;
            else if (k > lo && k < c) w = static_cast<double>(k - lo) / static_cast<double>(c - lo);
            else if (k > c && k < hi) w = static_cast<double>(hi - k) / static_cast<double>(hi - c);
            bank[i][static_cast<std::size_t>(k)] = w;
        }
    }
    return bank;
}

// Cepstrum of a single frame-length chunk: pre-emphasis, window, DFT, bank, log, DCT.
inline std::vector<double> mfcc_frame(std::span<const double> raw, const respire::mfcc::MfccConfig& cfg, double rate) {
    const std::size_t n = raw.size();
    std::vector<double> x(n);
    const auto w = hamming(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (raw[i] - (i ? cfg.pre_emphasis_alpha * raw[i - 1] : 0.0)) * w[i];
    const auto power = dft_power(x, cfg.fft_size);
    const auto bank = filterbank(cfg.num_filters, cfg.fft_size, rate);
    std::vector<double> logs(cfg.num_filters);
    for (std::size_t f = 0; f < cfg.num_filters; ++f) {
        double e = 0.0;
        for (std::size_t k = 0; k < power.size(); ++k) e += bank[f][k] * power[k];
        logs[f] = std::log(std::max(e, cfg.log_floor));
    }
    const auto c = dct(logs);
    return {c.begin() + static_cast<long>(cfg.first_coeff),
            c.begin() + static_cast<long>(cfg.first_coeff + cfg.num_coeffs)};
}

inline std::size_t frame_count(std::size_t len, std::size_t frame, std::size_t hop) {
    std::size_t count = 0;
    for (std::size_t start = 0; start + frame <= len; start += hop) ++count;
    return count;
}

inline double gini(double p, double q) {
    const double t = p + q;
    if (t <= 0.0) return 0.0;
    return 1.0 - (p / t) * (p / t) - (q / t) * (q / t);
}

struct Split {
    std::size_t feature;
    double threshold;
    double gain;
};

// Tries every feature and every midpoint between distinct sorted values.
inline std::optional<Split> root_split(const respire::Matrix& x, std::span<const respire::Label> y) {
    const double n = static_cast<double>(x.rows());
    double P = 0, N = 0;
    for (auto l : y) (l == respire::Label::Patient ? P : N) += 1.0 / n;
    const double parent = (P + N) * gini(P, N);
    std::optional<Split> best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::set<double> values;
        for (std::size_t r = 0; r < x.rows(); ++r) values.insert(x(r, f));
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            const double thr = (*it + *std::next(it)) / 2.0;
            double lp = 0, ln = 0, rp = 0, rn = 0;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                const bool pat = y[r] == respire::Label::Patient;
                if (x(r, f) < thr) (pat ? lp : ln) += 1.0 / n;
                else (pat ? rp : rn) += 1.0 / n;
            }
            const double gain = parent - (lp + ln) * gini(lp, ln) - (rp + rn) * gini(rp, rn);
            if (!best || gain > best->gain + 1e-12) best = Split{f, thr, gain};
        }
    }
    return best;
}

struct Confusion {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
};

inline Confusion count(std::span<const respire::Label> truth, std::span<const respire::Label> pred) {
    Confusion c;
    using respire::Label;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::Patient && pred[i] == Label::Patient) c.tp++;
        if (truth[i] == Label::Patient && pred[i] == Label::NonPatient) c.fn++;
        if (truth[i] == Label::NonPatient && pred[i] == Label::Patient) c.fp++;
        if (truth[i] == Label::NonPatient && pred[i] == Label::NonPatient) c.tn++;
    }
    return c;
}

// max |a-b| / max(max|b|, tiny)
inline double rel_error(std::span<const double> a, std::span<const double> b) {
    double scale = 0.0, err = 0.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    return err / std::max(scale, 1e-300);
}

inline double rbf(std::span<const double> a, std::span<const double> b, double sigma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

// Largest KKT violation of a trained dual, measured on y_i f(x_i):
// alpha = 0 needs >= 1, 0 < alpha < C needs == 1, alpha = C needs <= 1.
inline double kkt_violation(const respire::Matrix& x, const respire::learners::SvmTraining& t, double C,
                            double sigma) {
    const std::size_t n = x.rows();
    const double eps = 1e-8 * C;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = t.model.bias;
        for (std::size_t j = 0; j < n; ++j) f += t.alpha[j] * t.y[j] * rbf(x.row(j), x.row(i), sigma);
        const double m = t.y[i] * f;
        double v = 0.0;
        if (t.alpha[i] <= eps) v = std::max(0.0, 1.0 - m);
        else if (t.alpha[i] >= C - eps) v = std::max(0.0, m - 1.0);
        else v = std::abs(m - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace oracle
