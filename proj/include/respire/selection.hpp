#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "respire/model.hpp"
#include "respire/types.hpp"

namespace respire::selection {

struct SelectionStep {
    std::size_t k = 0;             // cardinality after this step
    std::size_t feature = 0;       // zero-based index into the raw feature vector
    double validation_accuracy = 0.0;

    friend bool operator==(const SelectionStep&, const SelectionStep&) = default;
};

struct SelectionTrace {
    learners::LearnerSpec learner;
    std::string config_digest;  // feature-extraction digest of the table it ran on
    std::size_t max_features = 80;
    std::vector<SelectionStep> steps;

    // Smallest cardinality attaining the best accuracy.
    std::size_t best_k() const;
    double best_accuracy() const;
    std::vector<std::size_t> selected(std::size_t k) const;

    friend bool operator==(const SelectionTrace&, const SelectionTrace&) = default;
};

// Validation accuracy of `spec` trained on the given training columns, with a
// standardizer fitted on those training columns.
double subset_accuracy(const learners::LearnerSpec& spec, const LabeledRows& train, const LabeledRows& validation,
                       std::span<const std::size_t> columns, std::size_t jobs = 1);

// Sequential forward selection from the empty set. Each step trains one model
// per remaining feature and keeps the one with the best validation accuracy
// (ties to the lower feature index). Candidates run on up to `jobs` threads.
SelectionTrace sfs(const LabeledRows& train, const LabeledRows& validation, const learners::LearnerSpec& spec,
                   std::size_t max_features, std::size_t jobs = 1);

// Columns of the first k selected features, in selection order.
Matrix apply_selection(const SelectionTrace& trace, std::size_t k, const Matrix& rows);

std::string trace_to_json(const SelectionTrace& trace);
SelectionTrace trace_from_json(std::string_view text);
void save_trace(const SelectionTrace& trace, const std::filesystem::path& path);
SelectionTrace load_trace(const std::filesystem::path& path);

}  // namespace respire::selection
