#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "irtens/ensemble.hpp"
#include "irtens/pool.hpp"

using namespace irtens;

namespace {

std::unique_ptr<TreeNode> constant_leaf(int klass, int n_classes) {
    auto leaf = std::make_unique<TreeNode>();
    leaf->is_leaf = true;
    leaf->klass = klass;
    leaf->counts.assign(static_cast<std::size_t>(n_classes), 0);
    leaf->counts[static_cast<std::size_t>(klass)] = 1;
    return leaf;
}

BasePool pool_of_leaves(const std::vector<int>& classes, int n_classes, std::size_t n_features) {
    BasePool pool;
    pool.n_features = n_features;
    pool.n_classes = static_cast<std::size_t>(n_classes);
    for (int c : classes) {
        pool.trees.push_back(constant_leaf(c, n_classes));
        pool.bootstrap_seeds.push_back(pool.bootstrap_seeds.size());
    }
    return pool;
}

IrtEnsembleModel model_with(BasePool pool, std::vector<double> theta) {
    IrtEnsembleModel m;
    m.abilities.theta = theta;
    m.abilities.weights = compute_weights(theta);
    m.pool = std::move(pool);
    m.engine = "model2";
    return m;
}

}  // namespace

TEST_CASE("performance matrix marks correct predictions") {
    // a pure-fit tree on its own training data gives an all-ones row
    const Dataset d = gen_checkerboard(4, 150, 3);
    BasePool pure;
    pure.n_features = d.n_cols;
    pure.n_classes = d.n_classes();
    pure.trees.push_back(fit_tree(d));
    pure.bootstrap_seeds.push_back(0);
    const PerformanceMatrix y = build_performance_matrix(pure, d);
    CHECK(y.row_mean(0) == 1.0);

    // constant-leaf tree predicting class 0 against labels (0,1,1)
    Dataset tiny;
    tiny.n_rows = 3;
    tiny.n_cols = 1;
    tiny.features = {0.0, 1.0, 2.0};
    tiny.schema = {{"x", ColumnKind::Continuous, {}}};
    tiny.labels = {0, 1, 1};
    tiny.class_labels = {"a", "b"};
    const PerformanceMatrix row = build_performance_matrix(pool_of_leaves({0}, 2, 1), tiny);
    CHECK(row.at(0, 0) == 1);
    CHECK(row.at(0, 1) == 0);
    CHECK(row.at(0, 2) == 0);
}

TEST_CASE("performance matrix row means equal per-tree training accuracy") {
    const Dataset d = gen_checkerboard(4, 200, 5);
    const BasePool pool = fit_base_pool(d, 8, {}, 7);
    const PerformanceMatrix y = build_performance_matrix(pool, d);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::size_t correct = 0;
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            if (predict_tree(*pool.trees[i], d.row(r)) == d.labels[r]) ++correct;
        }
        CHECK(y.row_mean(i) ==
              Catch::Approx(static_cast<double>(correct) / static_cast<double>(d.n_rows)));
    }
}

TEST_CASE("softmax weights: closed forms and invariants") {
    const auto equal = compute_weights({3.0, 3.0, 3.0, 3.0});
    for (double w : equal) CHECK(w == Catch::Approx(0.25).epsilon(1e-12));

    const auto two = compute_weights({0.0, std::log(2.0)});
    CHECK(two[0] == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(two[1] == Catch::Approx(2.0 / 3.0).epsilon(1e-12));

    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> theta(5);
        for (auto& t : theta) t = 4.0 * rng.normal();
        const auto w = compute_weights(theta);
        double sum = 0.0;
        for (double wi : w) {
            CHECK(wi > 0.0);
            sum += wi;
        }
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-12));
        // strictly monotone in theta
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t k = 0; k < 5; ++k) {
                if (theta[i] > theta[k]) CHECK(w[i] > w[k]);
            }
        }
        // shift invariance
        std::vector<double> shifted = theta;
        for (auto& t : shifted) t += 7.3;
        const auto ws = compute_weights(shifted);
        for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(ws[i] - w[i]) < 1e-12);
    }

    CHECK_THROWS_AS(compute_weights({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(compute_weights({1.0, std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

TEST_CASE("weighted vote: unanimity, dominance, tie-breaking") {
    const std::vector<double> x{0.5};

    const auto unanimous = model_with(pool_of_leaves({2, 2, 2}, 3, 1), {0.3, -1.0, 2.0});
    CHECK(predict_weighted(unanimous, x) == 2);

    // weights (0.6, 0.4) via theta = (log .6, log .4); predictions (A, B)
    const auto dominant =
        model_with(pool_of_leaves({0, 1}, 2, 1), {std::log(0.6), std::log(0.4)});
    CHECK(predict_weighted(dominant, x) == 0);

    // exact tie goes to the lowest class index
    const auto tied = model_with(pool_of_leaves({1, 0}, 2, 1), {0.0, 0.0});
    CHECK(predict_weighted(tied, x) == 0);

    const std::vector<double> wrong_arity{0.5, 0.5};
    CHECK_THROWS_AS(predict_weighted(tied, wrong_arity), std::invalid_argument);
}

TEST_CASE("uniform weights reproduce plain majority voting everywhere") {
    const Dataset d = gen_checkerboard(4, 400, 21);
    BasePool pool = fit_base_pool(d, 15, {}, 31);
    const auto uniform = model_with(fit_base_pool(d, 15, {}, 31), std::vector<double>(15, 0.7));
    const Dataset grid = gen_checkerboard(4, 500, 77);
    for (std::size_t r = 0; r < grid.n_rows; ++r) {
        CHECK(predict_weighted(uniform, grid.row(r)) == majority_vote(pool, grid.row(r)));
    }
}

TEST_CASE("single-classifier ensemble equals its tree") {
    const Dataset d = gen_checkerboard(4, 150, 41);
    auto model = model_with(fit_base_pool(d, 1, {}, 43), {0.2});
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        CHECK(predict_weighted(model, d.row(r)) == predict_tree(*model.pool.trees[0], d.row(r)));
    }
}

TEST_CASE("a zero-influence classifier never changes the vote") {
    // an extreme ability gap drives the last weight below 1e-15
    const auto with_ghost = model_with(pool_of_leaves({0, 1, 1}, 2, 1), {20.0, 19.5, -20.0});
    REQUIRE(with_ghost.abilities.weights[2] < 1e-15);
    const auto without = model_with(pool_of_leaves({0, 1}, 2, 1), {20.0, 19.5});
    Rng rng(55);
    for (int k = 0; k < 200; ++k) {
        const std::vector<double> x{rng.uniform()};
        CHECK(predict_weighted(with_ghost, x) == predict_weighted(without, x));
    }
}

TEST_CASE("predict_batch accuracy equals the pointwise mean") {
    const Dataset d = gen_checkerboard(4, 300, 61);
    const auto model = model_with(fit_base_pool(d, 9, {}, 67), std::vector<double>(9, 0.0));

    const auto batch = predict_batch(model, d);
    double correct = 0;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        if (predict_weighted(model, d.row(r)) == d.labels[r]) correct += 1.0;
    }
    CHECK(batch.accuracy == Catch::Approx(correct / static_cast<double>(d.n_rows)));

    // training set of a unanimous pure pool has accuracy 1: a single pure tree
    BasePool pure;
    pure.n_features = d.n_cols;
    pure.n_classes = d.n_classes();
    pure.trees.push_back(fit_tree(d));
    pure.bootstrap_seeds.push_back(0);
    const auto pure_model = model_with(std::move(pure), {0.0});
    CHECK(predict_batch(pure_model, d).accuracy == 1.0);

    CHECK_THROWS_AS(predict_batch(model, Dataset{}), std::invalid_argument);
}
