#include "respire/json_io.hpp"

#include "respire/error.hpp"

namespace respire::mfcc {

void to_json(nlohmann::json& j, const MfccConfig& cfg) {
    j = nlohmann::json{
        {"frame_length", cfg.frame_length},
        {"hop", cfg.hop},
        {"pre_emphasis_alpha", cfg.pre_emphasis_alpha},
        {"num_filters", cfg.num_filters},
        {"num_coeffs", cfg.num_coeffs},
        {"fft_size", cfg.fft_size},
        {"log_floor", cfg.log_floor},
        {"spectrum_mode", cfg.spectrum_mode == SpectrumMode::Power ? "power" : "magnitude"},
        {"first_coeff", cfg.first_coeff},
        {"expected_rate", cfg.expected_rate},
    };
}

void from_json(const nlohmann::json& j, MfccConfig& cfg) {
    cfg = MfccConfig{};
    j.at("frame_length").get_to(cfg.frame_length);
    j.at("hop").get_to(cfg.hop);
    j.at("pre_emphasis_alpha").get_to(cfg.pre_emphasis_alpha);
    j.at("num_filters").get_to(cfg.num_filters);
    j.at("num_coeffs").get_to(cfg.num_coeffs);
    j.at("fft_size").get_to(cfg.fft_size);
    j.at("log_floor").get_to(cfg.log_floor);
    const auto mode = j.at("spectrum_mode").get<std::string>();
    if (mode == "power") cfg.spectrum_mode = SpectrumMode::Power;
    else if (mode == "magnitude") cfg.spectrum_mode = SpectrumMode::Magnitude;
    else throw Error(Errc::InvalidConfig, "unknown spectrum_mode '" + mode + "'");
    j.at("first_coeff").get_to(cfg.first_coeff);
    j.at("expected_rate").get_to(cfg.expected_rate);
}

}  // namespace respire::mfcc

namespace respire::learners {

void to_json(nlohmann::json& j, const SvmConfig& cfg) {
    j = nlohmann::json{{"C", cfg.C},
                       {"sigma", cfg.sigma},
                       {"kkt_tolerance", cfg.kkt_tolerance},
                       {"max_iterations", cfg.max_iterations}};
}

void from_json(const nlohmann::json& j, SvmConfig& cfg) {
    j.at("C").get_to(cfg.C);
    j.at("sigma").get_to(cfg.sigma);
    j.at("kkt_tolerance").get_to(cfg.kkt_tolerance);
    j.at("max_iterations").get_to(cfg.max_iterations);
}

void to_json(nlohmann::json& j, const TreeConfig& cfg) {
    j = nlohmann::json{{"max_splits", cfg.max_splits}, {"min_leaf", cfg.min_leaf}};
}

void from_json(const nlohmann::json& j, TreeConfig& cfg) {
    j.at("max_splits").get_to(cfg.max_splits);
    j.at("min_leaf").get_to(cfg.min_leaf);
}

void to_json(nlohmann::json& j, const BaggingConfig& cfg) {
    j = nlohmann::json{{"n_learners", cfg.n_learners}, {"tree", cfg.tree}, {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, BaggingConfig& cfg) {
    j.at("n_learners").get_to(cfg.n_learners);
    j.at("tree").get_to(cfg.tree);
    j.at("seed").get_to(cfg.seed);
}

void to_json(nlohmann::json& j, const AdaBoostConfig& cfg) {
    j = nlohmann::json{{"rounds", cfg.rounds}, {"tree", cfg.tree}};
}

void from_json(const nlohmann::json& j, AdaBoostConfig& cfg) {
    j.at("rounds").get_to(cfg.rounds);
    j.at("tree").get_to(cfg.tree);
}

void to_json(nlohmann::json& j, const LearnerSpec& spec) {
    j = nlohmann::json{{"kind", to_string(spec.kind)}};
    switch (spec.kind) {
        case ModelKind::Svm: j["svm"] = spec.svm; break;
        case ModelKind::Tree: j["tree"] = spec.tree; break;
        case ModelKind::Bagging: j["bagging"] = spec.bagging; break;
        case ModelKind::AdaBoostM1: j["adaboost"] = spec.adaboost; break;
    }
}

void from_json(const nlohmann::json& j, LearnerSpec& spec) {
    spec = LearnerSpec{};
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::CorruptModel, "unknown learner kind " + j.at("kind").dump());
    spec.kind = *kind;
    if (j.contains("svm")) j.at("svm").get_to(spec.svm);
    if (j.contains("tree")) j.at("tree").get_to(spec.tree);
    if (j.contains("bagging")) j.at("bagging").get_to(spec.bagging);
    if (j.contains("adaboost")) j.at("adaboost").get_to(spec.adaboost);
}

}  // namespace respire::learners
