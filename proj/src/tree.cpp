#include "respire/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "respire/error.hpp"

namespace respire::learners {

namespace {

// Gains below this are rounding noise on weights that sum to one.
constexpr double kMinGain = 1e-13;
constexpr double kRelativeTie = 1e-12;

struct ClassWeights {
    double patient = 0.0;
    double non_patient = 0.0;

    double total() const { return patient + non_patient; }
    // W * (1 - gini) = sum of squared class weights over W.
    double purity_mass() const {
        const double w = total();
        return w > 0.0 ? (patient * patient + non_patient * non_patient) / w : 0.0;
    }
    void add(Label label, double w) { (label == Label::Patient ? patient : non_patient) += w; }
};

double midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

void set_leaf_stats(TreeNode& node, std::span<const Label> y, std::span<const double> w,
                    std::span<const std::size_t> rows) {
    ClassWeights cw;
    for (std::size_t r : rows) cw.add(y[r], w[r]);
    node.patient_fraction = cw.total() > 0.0 ? cw.patient / cw.total() : 0.0;
    node.label = cw.patient >= cw.non_patient ? Label::Patient : Label::NonPatient;
}

}  // namespace

double gini_impurity(std::span<const double> class_weights) {
    double total = 0.0;
    for (double c : class_weights) {
        if (c < 0.0) throw Error(Errc::InvalidConfig, "negative class weight");
        total += c;
    }
    if (!(total > 0.0)) throw Error(Errc::EmptyNode, "impurity of an empty node");
    double sum_sq = 0.0;
    for (double c : class_weights) sum_sq += (c / total) * (c / total);
    return 1.0 - sum_sq;
}

std::size_t TreeModel::branch_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::optional<SplitCandidate> best_split(const Matrix& x, std::span<const Label> y, std::span<const double> weights,
                                         std::span<const std::size_t> rows, std::size_t min_leaf) {
    const std::size_t m = rows.size();
    min_leaf = std::max<std::size_t>(1, min_leaf);
    if (m < 2 * min_leaf) return std::nullopt;

    ClassWeights parent;
    for (std::size_t r : rows) parent.add(y[r], weights[r]);
    if (parent.patient <= 0.0 || parent.non_patient <= 0.0) return std::nullopt;
    const double parent_mass = parent.purity_mass();

    std::optional<SplitCandidate> best;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
        ClassWeights left;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            left.add(y[order[k]], weights[order[k]]);
            const double lo = x(order[k], f);
            const double hi = x(order[k + 1], f);
            if (!(lo < hi)) continue;
            const std::size_t n_left = k + 1;
            if (n_left < min_leaf || m - n_left < min_leaf) continue;
            const ClassWeights right{parent.patient - left.patient, parent.non_patient - left.non_patient};
            const double gain = left.purity_mass() + right.purity_mass() - parent_mass;
            if (!best || gain > best->gain + kRelativeTie * std::abs(best->gain))
                best = SplitCandidate{f, midpoint(lo, hi), gain};
        }
    }
    if (!best || !(best->gain > kMinGain)) return std::nullopt;
    return best;
}

TreeModel train_tree(const Matrix& x, std::span<const Label> y, const TreeConfig& cfg, std::span<const double> weights) {
    const std::size_t n = x.rows();
    if (n == 0) throw Error(Errc::EmptyData, "no training rows for tree");
    if (y.size() != n) throw Error(Errc::DimensionMismatch, "labels and rows differ in count");
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (!weights.empty()) {
        if (weights.size() != n) throw Error(Errc::DimensionMismatch, "sample weights and rows differ in count");
        double total = 0.0;
        for (double v : weights) {
            if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidConfig, "sample weights must be positive");
            total += v;
        }
        for (std::size_t i = 0; i < n; ++i) w[i] = weights[i] / total;
    }

    TreeModel model;
    model.dimension = x.cols();
    model.nodes.emplace_back();

    struct Open {
        int node;
        std::vector<std::size_t> rows;
        std::optional<SplitCandidate> split;
    };
    std::vector<Open> frontier;
    {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        set_leaf_stats(model.nodes[0], y, w, all);
        auto split = cfg.max_splits > 0 ? best_split(x, y, w, all, cfg.min_leaf) : std::nullopt;
        if (split) frontier.push_back({0, std::move(all), split});
    }

    std::size_t splits = 0;
    while (splits < cfg.max_splits && !frontier.empty()) {
        // Largest gain; equal gains go to the earliest-created node.
        std::size_t pick = 0;
        for (std::size_t i = 1; i < frontier.size(); ++i) {
            const auto& a = frontier[i];
            const auto& b = frontier[pick];
            if (a.split->gain > b.split->gain || (a.split->gain == b.split->gain && a.node < b.node)) pick = i;
        }
        Open open = std::move(frontier[pick]);
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : open.rows)
            (x(r, open.split->feature) < open.split->threshold ? left_rows : right_rows).push_back(r);

        const int left_id = static_cast<int>(model.nodes.size());
        const int right_id = left_id + 1;
        model.nodes.emplace_back();
        model.nodes.emplace_back();
        TreeNode& parent = model.nodes[static_cast<std::size_t>(open.node)];
        parent.feature = static_cast<int>(open.split->feature);
        parent.threshold = open.split->threshold;
        parent.left = left_id;
        parent.right = right_id;
        set_leaf_stats(model.nodes[static_cast<std::size_t>(left_id)], y, w, left_rows);
        set_leaf_stats(model.nodes[static_cast<std::size_t>(right_id)], y, w, right_rows);
        ++splits;

        if (splits < cfg.max_splits) {
            for (auto [id, rows] : {std::pair{left_id, &left_rows}, std::pair{right_id, &right_rows}}) {
                auto split = best_split(x, y, w, *rows, cfg.min_leaf);
                if (split) frontier.push_back({id, std::move(*rows), split});
            }
        }
    }
    return model;
}

Label predict_tree(const TreeModel& model, std::span<const double> x) {
    if (x.size() != model.dimension)
        throw Error(Errc::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, tree expects " +
                                                 std::to_string(model.dimension));
    std::size_t i = 0;
    while (!model.nodes[i].is_leaf()) {
        const auto& node = model.nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                                                : node.right);
    }
    return model.nodes[i].label;
}

}  // namespace respire::learners
