#include "respire/model.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "respire/error.hpp"
#include "respire/json_io.hpp"
#include "respire/text.hpp"

namespace respire::learners {

using nlohmann::json;

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Svm: return "svm";
        case ModelKind::Tree: return "tree";
        case ModelKind::Bagging: return "bagging";
        case ModelKind::AdaBoostM1: return "adaboost_m1";
    }
    return "svm";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "svm") return ModelKind::Svm;
    if (t == "tree") return ModelKind::Tree;
    if (t == "bagging") return ModelKind::Bagging;
    if (t == "adaboost" || t == "adaboost_m1" || t == "adaboost.m1") return ModelKind::AdaBoostM1;
    return std::nullopt;
}

Payload train_payload(const LearnerSpec& spec, const LabeledRows& rows, std::size_t jobs) {
    if (rows.contains(Split::Test))
        throw Error(Errc::SplitLeak, "a trainer was handed rows from the test split");
    if (rows.size() == 0) throw Error(Errc::EmptyData, "no training rows");
    switch (spec.kind) {
        case ModelKind::Svm: return train_svm(rows.x, rows.y, spec.svm).model;
        case ModelKind::Tree: return train_tree(rows.x, rows.y, spec.tree);
        case ModelKind::Bagging: return train_bagging(rows.x, rows.y, spec.bagging, jobs);
        case ModelKind::AdaBoostM1: return train_adaboost_m1(rows.x, rows.y, spec.adaboost);
    }
    throw Error(Errc::InvalidConfig, "unknown learner kind");
}

Prediction predict_payload(const Payload& payload, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) {
                const auto p = predict_svm(m, x);
                return {p.label, p.decision};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                if (x.size() != m.dimension)
                    throw Error(Errc::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                             " features, tree expects " + std::to_string(m.dimension));
                std::size_t i = 0;
                while (!m.nodes[i].is_leaf()) {
                    const auto& node = m.nodes[i];
                    i = static_cast<std::size_t>(
                        x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right);
                }
                return {m.nodes[i].label, m.nodes[i].patient_fraction};
            } else {
                const auto p = predict_ensemble(m, x);
                return {p.label, p.vote_margin};
            }
        },
        payload);
}

TrainedModel train_model(const LearnerSpec& spec, const LabeledRows& train, std::span<const std::size_t> selected,
                         const mfcc::MfccConfig& mel_config, std::size_t jobs) {
    if (train.contains(Split::Test))
        throw Error(Errc::SplitLeak, "a trainer was handed rows from the test split");
    TrainedModel model;
    model.spec = spec;
    model.mel_config = mel_config;
    model.raw_feature_count = train.x.cols();
    if (selected.empty()) {
        model.selected_features.resize(train.x.cols());
        std::iota(model.selected_features.begin(), model.selected_features.end(), std::size_t{0});
    } else {
        model.selected_features.assign(selected.begin(), selected.end());
    }
    const auto projected = train.select_columns(model.selected_features);
    model.standardizer = features::fit_standardizer(projected.x);
    model.payload = train_payload(spec, model.standardizer.apply(projected), jobs);
    return model;
}

Prediction predict(const TrainedModel& model, std::span<const double> raw_features) {
    if (raw_features.size() != model.raw_feature_count)
        throw Error(Errc::DimensionMismatch, "feature vector has " + std::to_string(raw_features.size()) +
                                                 " entries, model expects " + std::to_string(model.raw_feature_count));
    std::vector<double> projected(model.selected_features.size());
    for (std::size_t j = 0; j < projected.size(); ++j) projected[j] = raw_features[model.selected_features[j]];
    return predict_payload(model.payload, model.standardizer.apply(projected));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json tree_to_json(const TreeModel& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) {
            nodes.push_back({{"label", to_string(n.label)}, {"patient_fraction", n.patient_fraction}});
        } else {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"label", to_string(n.label)},
                             {"patient_fraction", n.patient_fraction}});
        }
    }
    return {{"dimension", tree.dimension}, {"nodes", std::move(nodes)}};
}

TreeModel tree_from_json(const json& j) {
    TreeModel tree;
    j.at("dimension").get_to(tree.dimension);
    for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        const auto label = parse_label(jn.at("label").get<std::string>());
        if (!label) throw Error(Errc::CorruptModel, "bad leaf label");
        n.label = *label;
        jn.at("patient_fraction").get_to(n.patient_fraction);
        if (jn.contains("feature")) {
            jn.at("feature").get_to(n.feature);
            jn.at("threshold").get_to(n.threshold);
            jn.at("left").get_to(n.left);
            jn.at("right").get_to(n.right);
        }
        tree.nodes.push_back(n);
    }
    const auto count = static_cast<int>(tree.nodes.size());
    if (count == 0) throw Error(Errc::CorruptModel, "tree has no nodes");
    for (const auto& n : tree.nodes) {
        if (n.is_leaf()) continue;
        if (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count ||
            static_cast<std::size_t>(n.feature) >= tree.dimension)
            throw Error(Errc::CorruptModel, "tree node references out of range");
    }
    return tree;
}

json payload_to_json(const Payload& payload) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) {
                json svs = json::array();
                for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
                    auto r = m.support_vectors.row(i);
                    svs.push_back(std::vector<double>(r.begin(), r.end()));
                }
                return {{"sigma", m.sigma},
                        {"bias", m.bias},
                        {"dimension", m.support_vectors.cols()},
                        {"dual_coef", m.dual_coef},
                        {"support_vectors", std::move(svs)}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_to_json(m);
            } else {
                json members = json::array();
                for (const auto& t : m.members) members.push_back(tree_to_json(t));
                return {{"ensemble", m.kind == EnsembleKind::Bagging ? "bagging" : "adaboost_m1"},
                        {"rng_seed", m.rng_seed},
                        {"patient_prior", m.patient_prior},
                        {"member_weights", m.member_weights},
                        {"members", std::move(members)}};
            }
        },
        payload);
}

Payload payload_from_json(ModelKind kind, const json& j) {
    switch (kind) {
        case ModelKind::Svm: {
            SvmModel m;
            j.at("sigma").get_to(m.sigma);
            j.at("bias").get_to(m.bias);
            j.at("dual_coef").get_to(m.dual_coef);
            m.support_vectors = Matrix(0, j.at("dimension").get<std::size_t>());
            for (const auto& row : j.at("support_vectors")) m.support_vectors.push_row(row.get<std::vector<double>>());
            if (m.support_vectors.rows() != m.dual_coef.size())
                throw Error(Errc::CorruptModel, "support vector and coefficient counts differ");
            return m;
        }
        case ModelKind::Tree: return tree_from_json(j);
        case ModelKind::Bagging:
        case ModelKind::AdaBoostM1: {
            EnsembleModel m;
            m.kind = kind == ModelKind::Bagging ? EnsembleKind::Bagging : EnsembleKind::AdaBoostM1;
            j.at("rng_seed").get_to(m.rng_seed);
            j.at("patient_prior").get_to(m.patient_prior);
            j.at("member_weights").get_to(m.member_weights);
            for (const auto& t : j.at("members")) m.members.push_back(tree_from_json(t));
            if (m.members.empty() || m.members.size() != m.member_weights.size())
                throw Error(Errc::CorruptModel, "ensemble members and weights differ");
            return m;
        }
    }
    throw Error(Errc::CorruptModel, "unknown model kind");
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["schema_version"] = kModelSchemaVersion;
    j["kind"] = to_string(model.kind());
    j["mel_config"] = model.mel_config;
    j["config_digest"] = model.feature_digest();
    j["raw_feature_count"] = model.raw_feature_count;
    j["selected_features"] = model.selected_features;
    j["standardizer"] = {{"means", model.standardizer.means}, {"sds", model.standardizer.sds}};
    j["params"] = model.spec;
    j["payload"] = payload_to_json(model.payload);
    return j.dump(1) + "\n";
}

TrainedModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptModel, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("schema_version"))
            throw Error(Errc::CorruptModel, "model file lacks schema_version");
        const auto version = j.at("schema_version").get<int>();
        if (version != kModelSchemaVersion)
            throw Error(Errc::SchemaVersionMismatch, "model schema_version " + std::to_string(version) +
                                                         ", this build reads " + std::to_string(kModelSchemaVersion));
        TrainedModel model;
        j.at("params").get_to(model.spec);
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        if (!kind || *kind != model.spec.kind) throw Error(Errc::CorruptModel, "kind disagrees with params");
        j.at("mel_config").get_to(model.mel_config);
        if (j.at("config_digest").get<std::string>() != model.feature_digest())
            throw Error(Errc::CorruptModel, "config_digest does not match mel_config");
        j.at("raw_feature_count").get_to(model.raw_feature_count);
        j.at("selected_features").get_to(model.selected_features);
        j.at("standardizer").at("means").get_to(model.standardizer.means);
        j.at("standardizer").at("sds").get_to(model.standardizer.sds);
        model.payload = payload_from_json(model.spec.kind, j.at("payload"));

        if (model.standardizer.means.size() != model.selected_features.size() ||
            model.standardizer.sds.size() != model.selected_features.size())
            throw Error(Errc::CorruptModel, "standardizer width differs from the selection");
        for (auto f : model.selected_features)
            if (f >= model.raw_feature_count) throw Error(Errc::CorruptModel, "selected feature out of range");
        return model;
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptModel, std::string("malformed model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    text::write_file(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return model_from_json(text::read_file(path)); }

}  // namespace respire::learners
