#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "respire/types.hpp"

namespace respire::learners {

// 1 - sum (n_i / n)^2 over class weights (counts or sample weights).
double gini_impurity(std::span<const double> class_weights);

struct TreeConfig {
    std::size_t max_splits = 100;  // budget on branch nodes
    std::size_t min_leaf = 1;      // minimum rows in each child

    friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // taken when x[feature] < threshold
    int right = -1;  // taken otherwise
    Label label = Label::Patient;
    double patient_fraction = 0.0;  // weighted share of Patient rows reaching the node

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t dimension = 0;

    std::size_t branch_count() const;
    friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    // Weighted impurity decrease: W*G(node) - W_l*G(left) - W_r*G(right),
    // with weights normalized over the whole training set.
    double gain = 0.0;
};

// Best split of the given rows over every feature and every midpoint between
// consecutive distinct values. Ties go to the lower feature index, then the
// lower threshold. Empty when no split has positive gain.
std::optional<SplitCandidate> best_split(const Matrix& x, std::span<const Label> y, std::span<const double> weights,
                                         std::span<const std::size_t> rows, std::size_t min_leaf);

// Best-first growth: repeatedly splits the frontier leaf with the largest gain
// until the budget is spent or no leaf has a positive-gain split. An empty
// `weights` means uniform.
TreeModel train_tree(const Matrix& x, std::span<const Label> y, const TreeConfig& cfg,
                     std::span<const double> weights = {});

Label predict_tree(const TreeModel& model, std::span<const double> x);

}  // namespace respire::learners
