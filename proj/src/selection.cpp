#include "respire/selection.hpp"

#include <algorithm>
#include <cstdio>

#include "respire/error.hpp"
#include "respire/features.hpp"
#include "respire/json_io.hpp"
#include "respire/parallel.hpp"
#include "respire/text.hpp"

namespace respire::selection {

using nlohmann::json;

std::size_t SelectionTrace::best_k() const {
    if (steps.empty()) return 0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i].validation_accuracy > steps[best].validation_accuracy) best = i;
    return steps[best].k;
}

double SelectionTrace::best_accuracy() const {
    double best = 0.0;
    for (const auto& s : steps) best = std::max(best, s.validation_accuracy);
    return best;
}

std::vector<std::size_t> SelectionTrace::selected(std::size_t k) const {
    if (k < 1 || k > steps.size())
        throw Error(Errc::CardinalityOutOfRange,
                    "k=" + std::to_string(k) + " outside 1.." + std::to_string(steps.size()));
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(steps[i].feature);
    return out;
}

double subset_accuracy(const learners::LearnerSpec& spec, const LabeledRows& train, const LabeledRows& validation,
                       std::span<const std::size_t> columns, std::size_t jobs) {
    const auto train_cols = train.select_columns(columns);
    const auto z = features::fit_standardizer(train_cols.x);
    const auto payload = learners::train_payload(spec, z.apply(train_cols), jobs);
    const auto val = z.apply(validation.x.select_columns(columns));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.rows(); ++i)
        correct += learners::predict_payload(payload, val.row(i)).label == validation.y[i];
    return static_cast<double>(correct) / static_cast<double>(val.rows());
}

SelectionTrace sfs(const LabeledRows& train, const LabeledRows& validation, const learners::LearnerSpec& spec,
                   std::size_t max_features, std::size_t jobs) {
    if (train.size() == 0 || validation.size() == 0)
        throw Error(Errc::EmptyData, "selection needs non-empty training and validation rows");
    if (validation.contains(Split::Test) || train.contains(Split::Test))
        throw Error(Errc::SplitLeak, "selection was handed rows from the test split");
    const std::size_t total = train.x.cols();
    if (validation.x.cols() != total) throw Error(Errc::DimensionMismatch, "train and validation widths differ");
    if (max_features == 0 || max_features > total)
        throw Error(Errc::InsufficientFeatures, "max_features=" + std::to_string(max_features) + " with only " +
                                                    std::to_string(total) + " features");

    SelectionTrace trace;
    trace.learner = spec;
    trace.max_features = max_features;

    std::vector<std::size_t> chosen;
    std::vector<char> used(total, 0);
    for (std::size_t k = 1; k <= max_features; ++k) {
        std::vector<std::size_t> candidates;
        for (std::size_t f = 0; f < total; ++f)
            if (!used[f]) candidates.push_back(f);

        std::vector<double> accuracy(candidates.size());
        parallel_for(candidates.size(), jobs, [&](std::size_t c) {
            auto columns = chosen;
            columns.push_back(candidates[c]);
            accuracy[c] = subset_accuracy(spec, train, validation, columns);
        });

        std::size_t best = 0;
        for (std::size_t c = 1; c < candidates.size(); ++c)
            if (accuracy[c] > accuracy[best]) best = c;
        chosen.push_back(candidates[best]);
        used[candidates[best]] = 1;
        trace.steps.push_back({k, candidates[best], accuracy[best]});
    }
    return trace;
}

Matrix apply_selection(const SelectionTrace& trace, std::size_t k, const Matrix& rows) {
    const auto columns = trace.selected(k);
    return rows.select_columns(columns);
}

std::string trace_to_json(const SelectionTrace& trace) {
    json steps = json::array();
    for (const auto& s : trace.steps) {
        char name[24];
        std::snprintf(name, sizeof name, "f%03zu", s.feature + 1);
        steps.push_back({{"k", s.k},
                         {"feature", s.feature},
                         {"name", name},
                         {"accuracy", s.validation_accuracy}});
    }
    json j{{"learner_kind", learners::to_string(trace.learner.kind)},
           {"learner", trace.learner},
           {"config_digest", trace.config_digest},
           {"max_features", trace.max_features},
           {"best_k", trace.best_k()},
           {"best_accuracy", trace.best_accuracy()},
           {"steps", std::move(steps)}};
    return j.dump(1) + "\n";
}

SelectionTrace trace_from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        SelectionTrace trace;
        j.at("learner").get_to(trace.learner);
        j.at("config_digest").get_to(trace.config_digest);
        j.at("max_features").get_to(trace.max_features);
        std::vector<char> seen;
        for (const auto& s : j.at("steps")) {
            SelectionStep step;
            s.at("k").get_to(step.k);
            s.at("feature").get_to(step.feature);
            s.at("accuracy").get_to(step.validation_accuracy);
            if (step.k != trace.steps.size() + 1)
                throw Error(Errc::SchemaMismatch, "trace cardinalities are not consecutive");
            if (step.feature >= seen.size()) seen.resize(step.feature + 1, 0);
            if (seen[step.feature]) throw Error(Errc::SchemaMismatch, "trace repeats a feature");
            seen[step.feature] = 1;
            trace.steps.push_back(step);
        }
        return trace;
    } catch (const json::exception& e) {
        throw Error(Errc::SchemaMismatch, std::string("malformed trace file: ") + e.what());
    }
}

void save_trace(const SelectionTrace& trace, const std::filesystem::path& path) {
    text::write_file(path, trace_to_json(trace));
}

SelectionTrace load_trace(const std::filesystem::path& path) { return trace_from_json(text::read_file(path)); }

}  // namespace respire::selection
