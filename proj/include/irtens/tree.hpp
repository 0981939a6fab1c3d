#pragma once

// Unpruned CART-style classification tree: greedy recursive partitioning
// on the weighted Gini impurity, splits at midpoints of sorted distinct
// feature values, no post-pruning. Everything is deterministic; ties among
// equal-gain splits go to the lowest feature index, then lowest threshold.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "irtens/dataset.hpp"

namespace irtens {

struct TreeConfig {
    int max_depth = -1;        // -1 = unlimited ("unpruned")
    int min_samples_leaf = 1;  // both children must keep at least this many rows
};

struct TreeNode {
    bool is_leaf = true;
    // internal node
    int feature = -1;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    // leaf
    int klass = -1;
    std::vector<int> counts;  // per-class sample counts at this leaf
};

namespace detail {

inline double gini_from_counts(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

inline std::unique_ptr<TreeNode> make_leaf(const std::vector<int>& counts) {
    auto leaf = std::make_unique<TreeNode>();
    leaf->counts = counts;
    int best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = static_cast<int>(c);  // ties keep lowest index
    }
    leaf->klass = best;
    return leaf;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

inline std::unique_ptr<TreeNode> grow(const Dataset& d, std::vector<std::size_t>& rows,
                                      const TreeConfig& config, int depth) {
    const int n_classes = static_cast<int>(d.n_classes());
    std::vector<int> counts(n_classes, 0);
    for (std::size_t r : rows) counts[d.labels[r]]++;
    const int total = static_cast<int>(rows.size());
    const double parent_gini = gini_from_counts(counts, total);

    const bool depth_exhausted = config.max_depth >= 0 && depth >= config.max_depth;
    if (parent_gini == 0.0 || depth_exhausted || total < 2 * config.min_samples_leaf) {
        return make_leaf(counts);
    }

    SplitChoice best;
    bool have_split = false;
    std::vector<std::size_t> order(rows);
    std::vector<int> left_counts(n_classes);
    for (std::size_t f = 0; f < d.n_cols; ++f) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return d.at(a, f) < d.at(b, f);
        });
        std::fill(left_counts.begin(), left_counts.end(), 0);
        int n_left = 0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            left_counts[d.labels[order[k]]]++;
            ++n_left;
            const double v = d.at(order[k], f);
            const double v_next = d.at(order[k + 1], f);
            if (v == v_next) continue;  // split only between distinct values
            const int n_right = total - n_left;
            if (n_left < config.min_samples_leaf || n_right < config.min_samples_leaf) continue;
            double gl = 0.0;
            double gr = 0.0;
            for (int c = 0; c < n_classes; ++c) {
                const double pl = static_cast<double>(left_counts[c]) / n_left;
                const double pr = static_cast<double>(counts[c] - left_counts[c]) / n_right;
                gl += pl * pl;
                gr += pr * pr;
            }
            const double weighted =
                (n_left * (1.0 - gl) + n_right * (1.0 - gr)) / static_cast<double>(total);
            if (!have_split || weighted < best.weighted_gini - 1e-12) {
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (v + v_next);
                best.weighted_gini = weighted;
                have_split = true;
            }
        }
    }
    // Leaf only when no valid candidate exists (identical feature vectors
    // or min_samples_leaf blocks every cut). Equal-impurity splits are
    // taken: zero-gain cuts can still lead to purity deeper down (XOR),
    // and any split keeps the weighted Gini <= the parent's.
    if (!have_split) {
        return make_leaf(counts);
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
        if (d.at(r, static_cast<std::size_t>(best.feature)) <= best.threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    auto node = std::make_unique<TreeNode>();
    node->is_leaf = false;
    node->feature = best.feature;
    node->threshold = best.threshold;
    node->counts = counts;
    node->left = grow(d, left_rows, config, depth + 1);
    node->right = grow(d, right_rows, config, depth + 1);
    return node;
}

}  // namespace detail

// The seed is accepted for interface symmetry with the rest of the
// pipeline; the greedy fit itself is deterministic and never draws.
inline std::unique_ptr<TreeNode> fit_tree(const Dataset& d, const TreeConfig& config = {},
                                          std::uint64_t /*seed*/ = 0) {
    if (d.n_rows == 0) throw std::invalid_argument("fit_tree: empty dataset");
    if (!d.labeled()) throw std::invalid_argument("fit_tree: dataset has no labels");
    if (config.min_samples_leaf < 1) {
        throw std::invalid_argument("fit_tree: min_samples_leaf must be >= 1");
    }
    std::vector<std::size_t> rows(d.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    return detail::grow(d, rows, config, 0);
}

// Deterministic descent: go left iff feature value <= threshold.
inline int predict_tree(const TreeNode& t, std::span<const double> x) {
    const TreeNode* node = &t;
    while (!node->is_leaf) {
        if (static_cast<std::size_t>(node->feature) >= x.size()) {
            throw std::invalid_argument("predict_tree: feature vector arity mismatch");
        }
        node = x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left.get()
                                                                             : node->right.get();
    }
    return node->klass;
}

inline std::size_t count_internal_nodes(const TreeNode& t) {
    if (t.is_leaf) return 0;
    return 1 + count_internal_nodes(*t.left) + count_internal_nodes(*t.right);
}

inline std::size_t tree_arity(const TreeNode& t) {
    if (t.is_leaf) return 0;
    return std::max<std::size_t>({static_cast<std::size_t>(t.feature) + 1, tree_arity(*t.left),
                                  tree_arity(*t.right)});
}

}  // namespace irtens
