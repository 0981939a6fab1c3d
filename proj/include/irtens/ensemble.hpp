#pragma once

// Ability-weighted majority voting: inferred abilities pass through a
// softmax to become voting weights, and prediction returns the class with
// the largest total weight among the trees voting for it.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "irtens/dataset.hpp"
#include "irtens/pool.hpp"

namespace irtens {

// Softmax with max-subtraction. Weights are strictly positive, sum to 1,
// and preserve the ordering of theta.
inline std::vector<double> compute_weights(const std::vector<double>& theta) {
    if (theta.empty()) throw std::invalid_argument("compute_weights: empty ability vector");
    double max_theta = theta[0];
    for (double t : theta) {
        if (!std::isfinite(t)) throw std::invalid_argument("compute_weights: non-finite ability");
        max_theta = std::max(max_theta, t);
    }
    std::vector<double> w(theta.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        w[i] = std::exp(theta[i] - max_theta);
        sum += w[i];
    }
    for (double& wi : w) wi /= sum;
    return w;
}

struct AbilityVector {
    std::vector<double> theta;
    std::vector<double> weights;
};

struct ItemParams {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
};

struct Preprocessing {
    std::vector<ColumnSchema> raw_schema;  // schema of the file as loaded
    std::vector<std::string> class_labels;
    std::string label_column;
    NormalizationStats normalization;  // over post-one-hot columns
};

struct IrtEnsembleModel {
    BasePool pool;
    AbilityVector abilities;
    ItemParams item_params;  // per training sample, retained for reporting
    std::string engine;      // model1 | model2 | model3
    Preprocessing prep;
};

// Weighted vote over classes; ties break toward the lowest class index.
inline int weighted_vote(const BasePool& pool, const std::vector<double>& weights,
                         std::span<const double> x) {
    if (x.size() != pool.n_features) {
        throw std::invalid_argument("predict: feature vector arity mismatch");
    }
    std::vector<double> score(pool.n_classes, 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        score[static_cast<std::size_t>(predict_tree(*pool.trees[i], x))] += weights[i];
    }
    int best = 0;
    for (std::size_t c = 1; c < score.size(); ++c) {
        if (score[c] > score[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
    }
    return best;
}

inline int predict_weighted(const IrtEnsembleModel& model, std::span<const double> x) {
    return weighted_vote(model.pool, model.abilities.weights, x);
}

// Plain bagging baseline: every tree votes with the same weight.
inline int majority_vote(const BasePool& pool, std::span<const double> x) {
    const std::vector<double> uniform(pool.size(), 1.0 / static_cast<double>(pool.size()));
    return weighted_vote(pool, uniform, x);
}

struct BatchPrediction {
    std::vector<int> labels;
    double accuracy = 0.0;  // meaningful only when the dataset is labeled
};

inline BatchPrediction predict_batch(const IrtEnsembleModel& model, const Dataset& d) {
    if (d.n_rows == 0) throw std::invalid_argument("predict_batch: empty dataset");
    BatchPrediction out;
    out.labels.reserve(d.n_rows);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        const int pred = predict_weighted(model, d.row(r));
        out.labels.push_back(pred);
        if (d.labeled() && pred == d.labels[r]) ++correct;
    }
    if (d.labeled()) out.accuracy = static_cast<double>(correct) / static_cast<double>(d.n_rows);
    return out;
}

}  // namespace irtens
