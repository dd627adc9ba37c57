#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "respire/corpus.hpp"
#include "respire/mfcc.hpp"
#include "respire/types.hpp"

namespace respire::features {

inline constexpr std::size_t kStatsPerCoeff = 7;

// Order of the statistics inside each coefficient's block of the feature vector.
enum class Statistic { Mean, Sd, Rms, Entropy, Kurtosis, Skewness, Variance };

inline constexpr std::array<Statistic, kStatsPerCoeff> kStatisticOrder = {
    Statistic::Mean,     Statistic::Sd,       Statistic::Rms,      Statistic::Entropy,
    Statistic::Kurtosis, Statistic::Skewness, Statistic::Variance,
};

std::string_view to_string(Statistic s) noexcept;

// Population moments of one cepstral coefficient's time series.
struct StatSummary {
    double mean = 0.0;
    double sd = 0.0;
    double rms = 0.0;
    double entropy = 0.0;   // Shannon entropy (bits) of the energy-normalized series
    double kurtosis = 0.0;  // non-excess: Gaussian -> 3
    double skewness = 0.0;
    double variance = 0.0;
    // Set when every value is identical: skewness and kurtosis are reported as 0 and 3.
    bool degenerate = false;

    double get(Statistic s) const noexcept;
};

StatSummary summarize_row(std::span<const double> series);

// Shannon entropy of p_j = x_j^2 / sum x_k^2, in bits; 0 for an all-zero series.
double energy_entropy(std::span<const double> series);

// Index (c-1)*7 + s for 1-based coefficient row c and statistic s.
std::vector<double> feature_vector(const mfcc::MfccMatrix& m);

// f001 .. fNNN for `mel_coeff_count` coefficients.
std::vector<std::string> feature_names(std::size_t mel_coeff_count);

struct FeatureAddress {
    std::size_t coeff;  // 1-based cepstral row
    Statistic statistic;
};
FeatureAddress describe_feature(std::size_t index);

// z-scores fitted on training rows. Columns whose sd is negligible keep sd = 1.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> sds;

    std::size_t size() const noexcept { return means.size(); }
    std::vector<double> apply(std::span<const double> row) const;
    Matrix apply(const Matrix& rows) const;
    LabeledRows apply(const LabeledRows& rows) const;
    Standardizer select(std::span<const std::size_t> columns) const;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

Standardizer fit_standardizer(const Matrix& train_rows);
// Uses only the rows tagged Train.
Standardizer fit_standardizer(const LabeledRows& rows);
Standardizer fit_standardizer(const corpus::FeatureTable& table);

}  // namespace respire::features
