#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "respire/ensemble.hpp"
#include "respire/features.hpp"
#include "respire/mfcc.hpp"
#include "respire/svm.hpp"
#include "respire/tree.hpp"

namespace respire::learners {

enum class ModelKind { Svm, Tree, Bagging, AdaBoostM1 };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::Svm, ModelKind::Tree, ModelKind::Bagging,
                                               ModelKind::AdaBoostM1};

std::string_view to_string(ModelKind kind) noexcept;
// Accepts svm, tree, bagging, adaboost, adaboost_m1 (case-insensitive).
std::optional<ModelKind> parse_model_kind(std::string_view text);

// Learner choice plus the hyperparameters of every learner; only the block
// matching `kind` is used.
struct LearnerSpec {
    ModelKind kind = ModelKind::Svm;
    SvmConfig svm;
    TreeConfig tree;
    BaggingConfig bagging;
    AdaBoostConfig adaboost;

    friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

using Payload = std::variant<SvmModel, TreeModel, EnsembleModel>;

// Throws SplitLeak if any row is tagged as test data.
Payload train_payload(const LearnerSpec& spec, const LabeledRows& rows, std::size_t jobs = 1);

struct Prediction {
    Label label;
    double score;  // SVM decision value, tree leaf patient share, or ensemble vote margin
};

Prediction predict_payload(const Payload& payload, std::span<const double> x);

// A model that maps a raw feature vector (all mel_coeff_count * 7 features)
// to a label: column selection, standardization, then the learner.
struct TrainedModel {
    LearnerSpec spec;
    mfcc::MfccConfig mel_config;
    std::size_t raw_feature_count = 0;
    std::vector<std::size_t> selected_features;
    features::Standardizer standardizer;  // over the selected columns
    Payload payload;

    ModelKind kind() const noexcept { return spec.kind; }
    std::string feature_digest() const { return mfcc::config_digest(mel_config); }
};

// `train` holds raw features of training rows. An empty selection keeps all columns.
TrainedModel train_model(const LearnerSpec& spec, const LabeledRows& train, std::span<const std::size_t> selected,
                         const mfcc::MfccConfig& mel_config, std::size_t jobs = 1);

Prediction predict(const TrainedModel& model, std::span<const double> raw_features);

inline constexpr int kModelSchemaVersion = 1;

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace respire::learners
