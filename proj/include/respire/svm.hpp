#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "respire/types.hpp"

namespace respire::learners {

// exp(-||x - y||^2 / (2 sigma^2)).
double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma);

struct SvmConfig {
    double C = 1.0;
    double sigma = 1.0;  // gamma = 1 / (2 sigma^2)
    double kkt_tolerance = 1e-3;
    std::size_t max_iterations = 0;  // 0 means 10 * n_samples

    double gamma() const noexcept { return 1.0 / (2.0 * sigma * sigma); }
    void validate() const;
    friend bool operator==(const SvmConfig&, const SvmConfig&) = default;
};

struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i
    double bias = 0.0;
    double sigma = 1.0;

    std::size_t dimension() const noexcept { return support_vectors.cols(); }
    friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

struct SvmTraining {
    SvmModel model;
    std::vector<double> alpha;  // one per training row, before pruning
    std::vector<int> y;          // +1 / -1
    std::size_t iterations = 0;
    bool converged = false;
    // Largest pairwise KKT gap at termination.
    double final_gap = 0.0;
    // Dual objective after each pair update, when requested.
    std::vector<double> objective_trace;
};

// Soft-margin dual solved by sequential pairwise updates, choosing the pair
// with maximal first-order violation and second-order gain. Stops when the
// KKT gap falls below kkt_tolerance or the iteration budget runs out.
SvmTraining train_svm(const Matrix& x, std::span<const Label> y, const SvmConfig& cfg, bool record_trace = false);

struct SvmPrediction {
    Label label;
    double decision;
};

// decision = sum_i alpha_i y_i k(sv_i, x) + b; a decision of exactly 0 is Patient.
SvmPrediction predict_svm(const SvmModel& model, std::span<const double> x);

}  // namespace respire::learners
