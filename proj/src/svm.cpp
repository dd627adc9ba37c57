#include "respire/svm.hpp"

#include <cmath>
#include <limits>

#include "respire/error.hpp"

namespace respire::learners {

namespace {

constexpr double kTau = 1e-12;
constexpr double kSupportThreshold = 1e-8;

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        d += diff * diff;
    }
    return d;
}

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
    if (x.size() != y.size())
        throw Error(Errc::DimensionMismatch,
                    "kernel arguments of length " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    if (!(sigma > 0.0)) throw Error(Errc::InvalidConfig, "sigma must be positive");
    return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

void SvmConfig::validate() const {
    if (!(C > 0.0)) throw Error(Errc::InvalidConfig, "C must be positive");
    if (!(sigma > 0.0)) throw Error(Errc::InvalidConfig, "sigma must be positive");
    if (!(kkt_tolerance > 0.0)) throw Error(Errc::InvalidConfig, "kkt_tolerance must be positive");
}

SvmTraining train_svm(const Matrix& x, std::span<const Label> labels, const SvmConfig& cfg, bool record_trace) {
    cfg.validate();
    const std::size_t n = x.rows();
    if (n != labels.size())
        throw Error(Errc::DimensionMismatch,
                    std::to_string(n) + " rows but " + std::to_string(labels.size()) + " labels");
    if (n == 0) throw Error(Errc::EmptyData, "no training rows");

    SvmTraining out;
    out.y.resize(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        out.y[i] = label_sign(labels[i]);
        (out.y[i] > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw Error(Errc::SingleClassData, "SVM training needs both classes");
    const auto& y = out.y;
    const double C = cfg.C;

    // Dense kernel matrix for this run.
    std::vector<double> kernel(n * n);
    const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    for (std::size_t i = 0; i < n; ++i) {
        kernel[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = std::exp(-squared_distance(x.row(i), x.row(j)) * inv_two_sigma2);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };

    std::vector<double>& alpha = out.alpha;
    alpha.assign(n, 0.0);
    // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
    std::vector<double> grad(n, -1.0);
    auto at_upper = [&](std::size_t t) { return alpha[t] >= C; };
    auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
    auto objective = [&] {
        double f = 0.0;
        for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
        return -0.5 * f;
    };

    const std::size_t max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * n;
    if (record_trace) out.objective_trace.push_back(objective());

    while (true) {
        // i: maximal violator in I_up; j: second-order choice in I_low.
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t i_sel = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if (y[t] > 0) {
                if (!at_upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i_sel = static_cast<std::ptrdiff_t>(t); }
            } else {
                if (!at_lower(t) && grad[t] >= gmax) { gmax = grad[t]; i_sel = static_cast<std::ptrdiff_t>(t); }
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t j_sel = -1;
        double obj_min = std::numeric_limits<double>::infinity();
        if (i_sel >= 0) {
            const auto i = static_cast<std::size_t>(i_sel);
            for (std::size_t t = 0; t < n; ++t) {
                double grad_diff;
                if (y[t] > 0) {
                    if (at_lower(t)) continue;
                    gmax2 = std::max(gmax2, grad[t]);
                    grad_diff = gmax + grad[t];
                } else {
                    if (at_upper(t)) continue;
                    gmax2 = std::max(gmax2, -grad[t]);
                    grad_diff = gmax - grad[t];
                }
                if (grad_diff > 0.0) {
                    double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
                    if (quad <= 0.0) quad = kTau;
                    const double obj = -(grad_diff * grad_diff) / quad;
                    if (obj <= obj_min) { obj_min = obj; j_sel = static_cast<std::ptrdiff_t>(t); }
                }
            }
        }
        out.final_gap = gmax + gmax2;
        if (i_sel < 0 || j_sel < 0 || out.final_gap < cfg.kkt_tolerance) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter) break;
        ++out.iterations;

        const auto i = static_cast<std::size_t>(i_sel);
        const auto j = static_cast<std::size_t>(j_sel);
        const double old_ai = alpha[i], old_aj = alpha[j];
        double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (quad <= 0.0) quad = kTau;

        if (y[i] != y[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
            }
            if (diff > 0.0) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
            } else {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
            }
            if (sum > C) {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
            }
        }

        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        for (std::size_t t = 0; t < n; ++t)
            grad[t] += y[t] * (y[i] * K(i, t) * dai + y[j] * K(j, t) * daj);
        if (record_trace) out.objective_trace.push_back(objective());
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (at_upper(t)) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    SvmModel& model = out.model;
    model.sigma = cfg.sigma;
    model.bias = -rho;
    model.support_vectors = Matrix(0, x.cols());
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] < kSupportThreshold) continue;
        model.support_vectors.push_row(x.row(t));
        model.dual_coef.push_back(alpha[t] * y[t]);
    }
    return out;
}

SvmPrediction predict_svm(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.dimension())
        throw Error(Errc::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, model expects " +
                                                 std::to_string(model.dimension()));
    const double inv_two_sigma2 = 1.0 / (2.0 * model.sigma * model.sigma);
    double decision = model.bias;
    for (std::size_t i = 0; i < model.dual_coef.size(); ++i)
        decision += model.dual_coef[i] * std::exp(-squared_distance(model.support_vectors.row(i), x) * inv_two_sigma2);
    return {decision >= 0.0 ? Label::Patient : Label::NonPatient, decision};
}

}  // namespace respire::learners
