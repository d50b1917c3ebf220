#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sqlion/error.hpp"
#include "sqlion/labeler.hpp"
#include "sqlion/ml/labeled_dataset.hpp"

namespace sqlion {

inline constexpr int default_tree_depth = 10;

using ClassHistogram = std::array<std::uint64_t, 4>; // indexed by level - 1

/// Shannon entropy in bits of a class histogram.
inline double entropy(const ClassHistogram& h) {
    std::uint64_t n = std::accumulate(h.begin(), h.end(), std::uint64_t{0});
    if (n == 0) return 0.0;
    double e = 0.0;
    for (auto c : h) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(n);
        e -= p * std::log2(p);
    }
    return e;
}

/// Majority level of a histogram, ties toward the higher level.
inline int majority_level(const ClassHistogram& h) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < h.size(); ++c) {
        if (h[c] >= h[best]) best = c;
    }
    return static_cast<int>(best) + 1;
}

// Nodes are stored in preorder; the left child of an internal node is the
// next node, `right` indexes the right subtree.
struct TreeNode {
    bool leaf = true;
    int feature = 0;              // internal: count_feature <= threshold goes left
    std::uint32_t threshold = 0;
    std::size_t right = 0;
    int prediction = 1;           // leaf
    ClassHistogram histogram{};   // leaf

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTreeModel {
    int max_depth = default_tree_depth;
    std::vector<TreeNode> nodes;

    /// Internal nodes on the longest root-to-leaf path.
    int depth() const {
        int best = 0;
        std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            if (nodes[i].leaf) {
                best = std::max(best, d);
            } else {
                stack.push_back({i + 1, d + 1});
                stack.push_back({nodes[i].right, d + 1});
            }
        }
        return best;
    }

    friend bool operator==(const DecisionTreeModel&, const DecisionTreeModel&) = default;
};

struct SplitCandidate {
    int feature = -1;
    std::uint32_t threshold = 0;
    double gain = 0.0;
};

// Gains at or below this are treated as no gain (floating-point noise).
inline constexpr double min_information_gain = 1e-12;

/// Best (feature, threshold) split of the given rows by information gain.
/// Thresholds are the distinct observed values of a feature except its
/// maximum, with `<= threshold` going left. Earlier features and lower
/// thresholds win ties. feature == -1 when nothing beats min_information_gain.
inline SplitCandidate best_split(const LabeledDataset& data, const std::vector<std::size_t>& rows) {
    ClassHistogram parent{};
    for (auto r : rows) ++parent[static_cast<std::size_t>(data.rows[r].features.label - 1)];
    const double parent_entropy = entropy(parent);
    const auto n = static_cast<double>(rows.size());

    SplitCandidate best;
    std::vector<std::pair<std::uint32_t, int>> column(rows.size());
    for (std::size_t j = 0; j < feature_count; ++j) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& fv = data.rows[rows[k]].features;
            column[k] = {fv.counts[j], fv.label};
        }
        std::sort(column.begin(), column.end());
        if (column.front().first == column.back().first) continue;

        ClassHistogram left{};
        std::size_t k = 0;
        while (k < column.size()) {
            std::uint32_t value = column[k].first;
            while (k < column.size() && column[k].first == value) {
                ++left[static_cast<std::size_t>(column[k].second - 1)];
                ++k;
            }
            if (k == column.size()) break;
            ClassHistogram right{};
            for (std::size_t c = 0; c < 4; ++c) right[c] = parent[c] - left[c];
            const auto nl = static_cast<double>(k);
            double gain = parent_entropy - (nl / n) * entropy(left) - ((n - nl) / n) * entropy(right);
            if (gain > min_information_gain && gain > best.gain + min_information_gain) {
                best = {static_cast<int>(j), value, gain};
            }
        }
    }
    return best;
}

namespace detail {

inline void grow_tree(const LabeledDataset& data, const std::vector<std::size_t>& rows, int depth, int max_depth,
                      std::vector<TreeNode>& nodes) {
    ClassHistogram hist{};
    for (auto r : rows) ++hist[static_cast<std::size_t>(data.rows[r].features.label - 1)];
    const bool pure = std::count_if(hist.begin(), hist.end(), [](auto c) { return c > 0; }) == 1;

    SplitCandidate split;
    if (!pure && depth < max_depth) split = best_split(data, rows);
    if (split.feature < 0) {
        TreeNode leaf;
        leaf.prediction = majority_level(hist);
        leaf.histogram = hist;
        nodes.push_back(leaf);
        return;
    }

    std::vector<std::size_t> left, right;
    for (auto r : rows) {
        (data.rows[r].features.counts[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
            .push_back(r);
    }
    const std::size_t self = nodes.size();
    TreeNode node;
    node.leaf = false;
    node.feature = split.feature;
    node.threshold = split.threshold;
    nodes.push_back(node);
    grow_tree(data, left, depth + 1, max_depth, nodes);
    nodes[self].right = nodes.size();
    grow_tree(data, right, depth + 1, max_depth, nodes);
}

} // namespace detail

/// Greedy entropy tree. Stops at pure nodes, at max_depth, or when no split
/// has positive gain; leaves predict the majority level (ties upward).
inline DecisionTreeModel train_tree(const LabeledDataset& train, int max_depth = default_tree_depth) {
    if (train.empty()) throw InvalidArgument("train_tree: training set is empty");
    if (max_depth < 0 || max_depth > default_tree_depth)
        throw InvalidArgument("train_tree: max depth must be in 0.." + std::to_string(default_tree_depth));
    for (const auto& row : train.rows) RiskLevel{row.features.label};

    DecisionTreeModel model;
    model.max_depth = max_depth;
    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    detail::grow_tree(train, rows, 0, max_depth, model.nodes);
    return model;
}

/// Leaf reached by a feature vector.
inline const TreeNode& tree_leaf(const DecisionTreeModel& model, const FeatureVector& fv) {
    if (model.nodes.empty()) throw InvalidArgument("predict_tree: empty tree");
    std::size_t i = 0;
    while (!model.nodes[i].leaf) {
        const auto& n = model.nodes[i];
        i = fv.counts[static_cast<std::size_t>(n.feature)] <= n.threshold ? i + 1 : n.right;
    }
    return model.nodes[i];
}

inline RiskLevel predict_tree(const DecisionTreeModel& model, const FeatureVector& fv) {
    return RiskLevel(tree_leaf(model, fv).prediction);
}

/// Leaf purity: the majority class's share of the leaf's training rows.
inline double tree_confidence(const DecisionTreeModel& model, const FeatureVector& fv) {
    const auto& leaf = tree_leaf(model, fv);
    std::uint64_t n = std::accumulate(leaf.histogram.begin(), leaf.histogram.end(), std::uint64_t{0});
    if (n == 0) return 0.0;
    return static_cast<double>(leaf.histogram[static_cast<std::size_t>(leaf.prediction - 1)]) / static_cast<double>(n);
}

} // namespace sqlion
