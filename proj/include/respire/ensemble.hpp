#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "respire/tree.hpp"
#include "respire/types.hpp"

namespace respire::learners {

enum class EnsembleKind { Bagging, AdaBoostM1 };

struct EnsembleModel {
    EnsembleKind kind = EnsembleKind::Bagging;
    std::vector<TreeModel> members;
    std::vector<double> member_weights;  // 1 for bagging, ln(1/beta_t) for AdaBoost.M1
    std::uint64_t rng_seed = 0;
    double patient_prior = 0.5;  // training share of Patient, used to break vote ties

    friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;
};

struct BaggingConfig {
    std::size_t n_learners = 100;
    TreeConfig tree{3715, 1};
    std::uint64_t seed = 61080;

    friend bool operator==(const BaggingConfig&, const BaggingConfig&) = default;
};

// Row indices of bootstrap sample `member` (n draws with replacement). The
// stream depends only on (seed, member), so members can be built in any order.
std::vector<std::size_t> bootstrap_indices(std::uint64_t seed, std::size_t member, std::size_t n);

EnsembleModel train_bagging(const Matrix& x, std::span<const Label> y, const BaggingConfig& cfg, std::size_t jobs = 1);

struct AdaBoostConfig {
    std::size_t rounds = 100;
    TreeConfig tree{20, 1};

    friend bool operator==(const AdaBoostConfig&, const AdaBoostConfig&) = default;
};

// Per-round record of a boosting run.
struct AdaBoostRound {
    double error = 0.0;       // weighted training error of the round's tree
    bool accepted = false;
    double member_weight = 0.0;
    double weight_sum = 0.0;  // sum of sample weights after renormalization
};

struct AdaBoostLog {
    std::vector<double> initial_weights;
    std::vector<AdaBoostRound> rounds;
};

inline constexpr double kMinBeta = 1e-10;

// beta = eps / (1 - eps), floored at kMinBeta.
double adaboost_beta(double error);
// ln(1 / beta).
double adaboost_member_weight(double error);

// Stops early when a round's error reaches 0.5 (that tree is discarded) or 0
// (kept with the floored beta). If the very first tree already has error 0.5
// it is kept with weight 1 so the ensemble is never empty.
EnsembleModel train_adaboost_m1(const Matrix& x, std::span<const Label> y, const AdaBoostConfig& cfg,
                                AdaBoostLog* log = nullptr);

struct EnsemblePrediction {
    Label label;
    double vote_margin;  // (winner - runner-up) / total weight
};

// Weighted vote. Ties go to the class with the larger training prior, then Patient.
EnsemblePrediction predict_ensemble(const EnsembleModel& model, std::span<const double> x);

}  // namespace respire::learners
