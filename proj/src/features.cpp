#include "respire/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "respire/error.hpp"

namespace respire::features {

std::string_view to_string(Statistic s) noexcept {
    switch (s) {
        case Statistic::Mean: return "mean";
        case Statistic::Sd: return "sd";
        case Statistic::Rms: return "rms";
        case Statistic::Entropy: return "entropy";
        case Statistic::Kurtosis: return "kurtosis";
        case Statistic::Skewness: return "skewness";
        case Statistic::Variance: return "variance";
    }
    return "mean";
}

double StatSummary::get(Statistic s) const noexcept {
    switch (s) {
        case Statistic::Mean: return mean;
        case Statistic::Sd: return sd;
        case Statistic::Rms: return rms;
        case Statistic::Entropy: return entropy;
        case Statistic::Kurtosis: return kurtosis;
        case Statistic::Skewness: return skewness;
        case Statistic::Variance: return variance;
    }
    return 0.0;
}

double energy_entropy(std::span<const double> series) {
    double energy = 0.0;
    for (double v : series) energy += v * v;
    if (energy == 0.0) return 0.0;
    double h = 0.0;
    for (double v : series) {
        const double p = v * v / energy;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

StatSummary summarize_row(std::span<const double> series) {
    if (series.size() < 2)
        throw Error(Errc::SeriesTooShort, "need at least 2 values, got " + std::to_string(series.size()));
    const double n = static_cast<double>(series.size());

    double sum = 0.0, sum_sq = 0.0;
    for (double v : series) {
        sum += v;
        sum_sq += v * v;
    }
    StatSummary s;
    s.mean = sum / n;
    s.rms = std::sqrt(sum_sq / n);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.variance = m2;
    s.sd = std::sqrt(m2);
    s.entropy = energy_entropy(series);

    s.degenerate = std::all_of(series.begin(), series.end(), [&](double v) { return v == series.front(); });
    if (s.degenerate || m2 == 0.0) {
        s.degenerate = true;
        s.skewness = 0.0;
        s.kurtosis = 3.0;
    } else {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

std::vector<double> feature_vector(const mfcc::MfccMatrix& m) {
    std::vector<double> out;
    out.reserve(m.coeffs() * kStatsPerCoeff);
    for (std::size_t c = 0; c < m.coeffs(); ++c) {
        const auto summary = summarize_row(m.row(c));
        for (Statistic s : kStatisticOrder) out.push_back(summary.get(s));
    }
    return out;
}

std::vector<std::string> feature_names(std::size_t mel_coeff_count) {
    std::vector<std::string> names;
    names.reserve(mel_coeff_count * kStatsPerCoeff);
    for (std::size_t i = 1; i <= mel_coeff_count * kStatsPerCoeff; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "f%03zu", i);
        names.emplace_back(buf);
    }
    return names;
}

FeatureAddress describe_feature(std::size_t index) {
    return {index / kStatsPerCoeff + 1, kStatisticOrder[index % kStatsPerCoeff]};
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
    if (row.size() != means.size())
        throw Error(Errc::DimensionMismatch, "row has " + std::to_string(row.size()) + " features, standardizer " +
                                                 std::to_string(means.size()));
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - means[j]) / sds[j];
    return out;
}

Matrix Standardizer::apply(const Matrix& rows) const {
    if (rows.cols() != means.size() && !rows.empty())
        throw Error(Errc::DimensionMismatch, "matrix has " + std::to_string(rows.cols()) +
                                                 " columns, standardizer " + std::to_string(means.size()));
    Matrix out(rows.rows(), means.size());
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t j = 0; j < means.size(); ++j) out(r, j) = (rows(r, j) - means[j]) / sds[j];
    return out;
}

LabeledRows Standardizer::apply(const LabeledRows& rows) const { return {apply(rows.x), rows.y, rows.splits}; }

Standardizer Standardizer::select(std::span<const std::size_t> columns) const {
    Standardizer out;
    for (std::size_t c : columns) {
        if (c >= means.size()) throw Error(Errc::DimensionMismatch, "column " + std::to_string(c) + " out of range");
        out.means.push_back(means[c]);
        out.sds.push_back(sds[c]);
    }
    return out;
}

Standardizer fit_standardizer(const Matrix& rows) {
    if (rows.rows() < 2)
        throw Error(Errc::TooFewRows, "standardizer needs at least 2 training rows, got " + std::to_string(rows.rows()));
    const std::size_t d = rows.cols();
    const double n = static_cast<double>(rows.rows());
    Standardizer z;
    z.means.assign(d, 0.0);
    z.sds.assign(d, 0.0);
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t j = 0; j < d; ++j) z.means[j] += rows(r, j);
    for (auto& m : z.means) m /= n;
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = rows(r, j) - z.means[j];
            z.sds[j] += dev * dev;
        }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(z.sds[j] / n);
        // Rounding in the mean of a constant column leaves a residue near 1e-17.
        z.sds[j] = sd <= 1e-12 * std::max(1.0, std::abs(z.means[j])) ? 1.0 : sd;
    }
    return z;
}

Standardizer fit_standardizer(const LabeledRows& rows) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows.splits.empty() || rows.splits[i] == Split::Train) train.push_back(i);
    return fit_standardizer(rows.x.select_rows(train));
}

Standardizer fit_standardizer(const corpus::FeatureTable& table) {
    return fit_standardizer(table.labeled_rows(Split::Train).x);
}

}  // namespace respire::features
