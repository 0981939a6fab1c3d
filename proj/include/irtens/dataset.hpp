#pragma once

// Dataset container plus preprocessing: one-hot encoding, z-score
// normalization, deterministic train/test splitting, and the checkerboard
// generator used by the synthetic classification experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "irtens/rng.hpp"

namespace irtens {

enum class ColumnKind { Continuous, Nominal };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::vector<std::string> levels;  // nominal level names in code order
};

// Feature matrix with class labels. Nominal columns hold integer level
// codes (as doubles) until one_hot_encode replaces them.
struct Dataset {
    std::vector<double> features;  // row-major n_rows x n_cols
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<int> labels;                 // 0..n_classes-1; empty if unlabeled
    std::vector<ColumnSchema> schema;        // one entry per feature column
    std::vector<std::string> class_labels;   // label names in code order
    std::string name;

    double at(std::size_t r, std::size_t c) const { return features[r * n_cols + c]; }
    double& at(std::size_t r, std::size_t c) { return features[r * n_cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return {features.data() + r * n_cols, n_cols};
    }
    std::size_t n_classes() const { return class_labels.size(); }
    bool labeled() const { return !labels.empty(); }

    Dataset select_rows(const std::vector<std::size_t>& idx) const {
        Dataset out;
        out.n_rows = idx.size();
        out.n_cols = n_cols;
        out.schema = schema;
        out.class_labels = class_labels;
        out.name = name;
        out.features.reserve(idx.size() * n_cols);
        for (std::size_t r : idx) {
            const auto rv = row(r);
            out.features.insert(out.features.end(), rv.begin(), rv.end());
        }
        if (labeled()) {
            out.labels.reserve(idx.size());
            for (std::size_t r : idx) out.labels.push_back(labels[r]);
        }
        return out;
    }
};

inline void validate(const Dataset& d) {
    if (d.features.size() != d.n_rows * d.n_cols) {
        throw std::invalid_argument("dataset: feature buffer size mismatch");
    }
    if (d.schema.size() != d.n_cols) {
        throw std::invalid_argument("dataset: schema size mismatch");
    }
    if (d.labeled()) {
        if (d.labels.size() != d.n_rows) {
            throw std::invalid_argument("dataset: label count differs from row count");
        }
        const int c = static_cast<int>(d.n_classes());
        if (c < 2) throw std::invalid_argument("dataset: fewer than 2 classes");
        for (int l : d.labels) {
            if (l < 0 || l >= c) throw std::invalid_argument("dataset: label index out of range");
        }
    }
}

// Each nominal column with L levels becomes L indicator columns, in place,
// levels in code order. Continuous columns and labels pass through.
inline Dataset one_hot_encode(const Dataset& d) {
    bool any_nominal = false;
    for (const auto& col : d.schema) {
        if (col.kind == ColumnKind::Nominal) any_nominal = true;
    }
    if (!any_nominal) return d;

    Dataset out;
    out.n_rows = d.n_rows;
    out.labels = d.labels;
    out.class_labels = d.class_labels;
    out.name = d.name;
    for (std::size_t c = 0; c < d.n_cols; ++c) {
        const auto& col = d.schema[c];
        if (col.kind == ColumnKind::Continuous) {
            out.schema.push_back(col);
        } else {
            for (const auto& level : col.levels) {
                out.schema.push_back({col.name + "=" + level, ColumnKind::Continuous, {}});
            }
        }
    }
    out.n_cols = out.schema.size();
    out.features.assign(out.n_rows * out.n_cols, 0.0);
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        std::size_t oc = 0;
        for (std::size_t c = 0; c < d.n_cols; ++c) {
            const auto& col = d.schema[c];
            if (col.kind == ColumnKind::Continuous) {
                out.at(r, oc++) = d.at(r, c);
            } else {
                const auto code = static_cast<std::size_t>(d.at(r, c));
                if (code >= col.levels.size()) {
                    throw std::invalid_argument("one_hot_encode: level code out of range in column " +
                                                col.name);
                }
                out.at(r, oc + code) = 1.0;
                oc += col.levels.size();
            }
        }
    }
    return out;
}

// Per-column mean and standard deviation captured at training time so the
// identical transform can be applied to held-out data. stddev 0 marks a
// zero-variance column whose output is pinned to 0.
struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline double normalize_cell(double x, double mean, double stddev) {
    return stddev > 0.0 ? (x - mean) / stddev : 0.0;
}

inline Dataset apply_normalization(const Dataset& d, const NormalizationStats& stats) {
    if (stats.mean.size() != d.n_cols || stats.stddev.size() != d.n_cols) {
        throw std::invalid_argument("apply_normalization: stats arity mismatch");
    }
    Dataset out = d;
    for (std::size_t c = 0; c < d.n_cols; ++c) {
        if (d.schema[c].kind != ColumnKind::Continuous) continue;
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            out.at(r, c) = normalize_cell(d.at(r, c), stats.mean[c], stats.stddev[c]);
        }
    }
    return out;
}

// Z-score with population standard deviation. Nominal columns keep the
// identity transform (mean 0, stddev 1) so stats arrays stay column-aligned.
inline std::pair<Dataset, NormalizationStats> normalize(const Dataset& d) {
    NormalizationStats stats;
    stats.mean.assign(d.n_cols, 0.0);
    stats.stddev.assign(d.n_cols, 1.0);
    for (std::size_t c = 0; c < d.n_cols; ++c) {
        if (d.schema[c].kind != ColumnKind::Continuous || d.n_rows == 0) continue;
        double sum = 0.0;
        for (std::size_t r = 0; r < d.n_rows; ++r) sum += d.at(r, c);
        const double mean = sum / static_cast<double>(d.n_rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            const double dev = d.at(r, c) - mean;
            ss += dev * dev;
        }
        const double var = ss / static_cast<double>(d.n_rows);
        stats.mean[c] = mean;
        stats.stddev[c] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return {apply_normalization(d, stats), stats};
}

// Disjoint partition with test size round(n_rows * test_fraction); the
// permutation comes from our own Fisher-Yates, so the same seed gives the
// same split on every platform. Row order within each part is preserved.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                                    std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("train_test_split: fraction must lie in (0,1)");
    }
    const auto n = d.n_rows;
    const auto n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (n_test == 0 || n_test >= n) {
        throw std::invalid_argument("train_test_split: both parts need at least one sample");
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + static_cast<long>(n_test));
    std::vector<std::size_t> train_idx(idx.begin() + static_cast<long>(n_test), idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    return {d.select_rows(train_idx), d.select_rows(test_idx)};
}

inline int checkerboard_label(double x, double y, int cells_per_side) {
    const int cx = static_cast<int>(std::floor(x * cells_per_side));
    const int cy = static_cast<int>(std::floor(y * cells_per_side));
    return (cx + cy) % 2;
}

// Uniform points on the unit square, class = parity of the containing cell.
inline Dataset gen_checkerboard(int cells_per_side, std::size_t n_points, std::uint64_t seed) {
    if (cells_per_side < 2) {
        throw std::invalid_argument("gen_checkerboard: cells_per_side must be >= 2");
    }
    if (n_points < static_cast<std::size_t>(cells_per_side) *
                       static_cast<std::size_t>(cells_per_side)) {
        throw std::invalid_argument("gen_checkerboard: need at least cells_per_side^2 points");
    }
    Dataset d;
    d.name = "checkerboard";
    d.n_rows = n_points;
    d.n_cols = 2;
    d.schema = {{"x", ColumnKind::Continuous, {}}, {"y", ColumnKind::Continuous, {}}};
    d.class_labels = {"0", "1"};
    d.features.reserve(2 * n_points);
    d.labels.reserve(n_points);
    Rng rng(seed);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        d.features.push_back(x);
        d.features.push_back(y);
        d.labels.push_back(checkerboard_label(x, y, cells_per_side));
    }
    return d;
}

// Distance from a point to the nearest interior cell boundary of the
// checkerboard grid (outer edges are not class boundaries).
inline double checkerboard_boundary_distance(double x, double y, int cells_per_side) {
    auto axis_dist = [cells_per_side](double v) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 1; k < cells_per_side; ++k) {
            const double line = static_cast<double>(k) / cells_per_side;
            best = std::min(best, std::fabs(v - line));
        }
        return best;
    };
    return std::min(axis_dist(x), axis_dist(y));
}

}  // namespace irtens
