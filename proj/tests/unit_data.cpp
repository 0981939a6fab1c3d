#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "irtens/csv.hpp"
#include "irtens/dataset.hpp"
#include "irtens/simulate.hpp"
#include "test_util.hpp"

using namespace irtens;
using testutil::TempFile;

TEST_CASE("load_csv parses continuous and nominal columns") {
    TempFile file("x,color,y\n1.5,red,a\n2.5,blue,b\n3.5,red,a\n");
    const Dataset d = load_csv(file.path(), "y");
    REQUIRE(d.n_rows == 3);
    REQUIRE(d.n_cols == 2);
    CHECK(d.schema[0].kind == ColumnKind::Continuous);
    CHECK(d.schema[1].kind == ColumnKind::Nominal);
    CHECK(d.schema[1].levels == std::vector<std::string>{"red", "blue"});
    CHECK(d.at(0, 0) == 1.5);
    CHECK(d.at(1, 1) == 1.0);  // blue is the second level seen
    CHECK(d.labels == std::vector<int>{0, 1, 0});
    CHECK(d.class_labels == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load_csv rejects degenerate and malformed input") {
    TempFile one_class("x,y\n1,a\n2,a\n");
    CHECK_THROWS_WITH(load_csv(one_class.path(), "y"),
                      Catch::Matchers::ContainsSubstring("fewer than 2 classes"));

    TempFile bad_arity("x,y\n1,a\n2\n3,b\n");
    CHECK_THROWS_WITH(load_csv(bad_arity.path(), "y"), Catch::Matchers::ContainsSubstring(":3:"));

    TempFile missing("x,y\n1,a\n,b\n");
    CHECK_THROWS_WITH(load_csv(missing.path(), "y"),
                      Catch::Matchers::ContainsSubstring("missing value"));

    TempFile ok("x,y\n1,a\n2,b\n");
    CHECK_THROWS_WITH(load_csv(ok.path(), "label"),
                      Catch::Matchers::ContainsSubstring("label column"));

    // a hint forces numeric parsing, so text cells become an error
    TempFile text("x,y\nfoo,a\nbar,b\n");
    SchemaHints hints{{"x", ColumnKind::Continuous}};
    CHECK_THROWS_WITH(load_csv(text.path(), "y", hints),
                      Catch::Matchers::ContainsSubstring("cannot parse"));
}

TEST_CASE("bundled iris loads as 150 x 4 with 3 classes") {
    const Dataset d = load_csv(testutil::data_dir() + "/iris.csv", "species");
    CHECK(d.n_rows == 150);
    CHECK(d.n_cols == 4);
    CHECK(d.n_classes() == 3);
    for (const auto& col : d.schema) CHECK(col.kind == ColumnKind::Continuous);
}

TEST_CASE("one_hot_encode expands nominal columns in place") {
    Dataset d;
    d.n_rows = 3;
    d.n_cols = 2;
    d.features = {7.0, 0.0, 8.0, 2.0, 9.0, 1.0};
    d.schema = {{"x", ColumnKind::Continuous, {}},
                {"c", ColumnKind::Nominal, {"r", "g", "b"}}};
    d.labels = {0, 1, 0};
    d.class_labels = {"a", "b"};

    const Dataset e = one_hot_encode(d);
    REQUIRE(e.n_cols == 4);
    CHECK(e.schema[1].name == "c=r");
    // rows coded 0,2,1 -> indicators (1,0,0),(0,0,1),(0,1,0)
    CHECK(e.at(0, 1) == 1.0);
    CHECK(e.at(0, 2) == 0.0);
    CHECK(e.at(0, 3) == 0.0);
    CHECK(e.at(1, 3) == 1.0);
    CHECK(e.at(2, 2) == 1.0);
    CHECK(e.labels == d.labels);
    CHECK(e.n_rows == d.n_rows);

    // no nominal columns: identity
    const Dataset same = one_hot_encode(e);
    CHECK(same.features == e.features);
}

TEST_CASE("normalize is a z-score with stored statistics") {
    Dataset d;
    d.n_rows = 3;
    d.n_cols = 2;
    d.features = {1.0, 5.0, 2.0, 5.0, 3.0, 5.0};
    d.schema = {{"a", ColumnKind::Continuous, {}}, {"b", ColumnKind::Continuous, {}}};
    d.labels = {0, 1, 0};
    d.class_labels = {"x", "y"};

    const auto [norm, stats] = normalize(d);
    CHECK(norm.at(0, 0) == Catch::Approx(-1.224744871).epsilon(1e-6));
    CHECK(norm.at(1, 0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(norm.at(2, 0) == Catch::Approx(1.224744871).epsilon(1e-6));
    // constant column maps to zeros
    for (std::size_t r = 0; r < 3; ++r) CHECK(norm.at(r, 1) == 0.0);

    // re-applying the stored stats reproduces the normalized set exactly
    const Dataset again = apply_normalization(d, stats);
    for (std::size_t k = 0; k < norm.features.size(); ++k) {
        CHECK(std::fabs(again.features[k] - norm.features[k]) < 1e-12);
    }
}

TEST_CASE("train_test_split partitions deterministically") {
    Dataset d;
    d.n_rows = 10;
    d.n_cols = 1;
    for (int i = 0; i < 10; ++i) d.features.push_back(i);
    d.schema = {{"x", ColumnKind::Continuous, {}}};
    d.labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    d.class_labels = {"a", "b"};

    const auto [train, test] = train_test_split(d, 0.3, 99);
    CHECK(train.n_rows == 7);
    CHECK(test.n_rows == 3);
    std::set<double> seen;
    for (double v : train.features) seen.insert(v);
    for (double v : test.features) seen.insert(v);
    CHECK(seen.size() == 10);  // disjoint partition covering every row

    const auto [train2, test2] = train_test_split(d, 0.3, 99);
    CHECK(train2.features == train.features);
    CHECK(test2.features == test.features);

    CHECK_THROWS_AS(train_test_split(d, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(train_test_split(d, 1.0, 1), std::invalid_argument);
}

TEST_CASE("split partition property over random sizes") {
    Rng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 5 + rng.below(200);
        Dataset d;
        d.n_rows = n;
        d.n_cols = 1;
        d.schema = {{"x", ColumnKind::Continuous, {}}};
        d.class_labels = {"a", "b"};
        for (std::size_t i = 0; i < n; ++i) {
            d.features.push_back(static_cast<double>(i));
            d.labels.push_back(static_cast<int>(i % 2));
        }
        const double frac = 0.1 + 0.8 * rng.uniform();
        const auto expected_test =
            static_cast<std::size_t>(std::llround(static_cast<double>(n) * frac));
        if (expected_test == 0 || expected_test >= n) continue;
        const auto [train, test] = train_test_split(d, frac, rng.next_u64());
        CHECK(test.n_rows == expected_test);
        std::set<double> all(train.features.begin(), train.features.end());
        for (double v : test.features) {
            CHECK(all.count(v) == 0);
            all.insert(v);
        }
        CHECK(all.size() == n);
    }
}

TEST_CASE("checkerboard labels follow cell parity") {
    CHECK(checkerboard_label(0.1, 0.1, 4) == 0);
    CHECK(checkerboard_label(0.1, 0.3, 4) == 1);

    const Dataset d = gen_checkerboard(4, 10000, 7);
    CHECK(d.n_rows == 10000);
    CHECK(d.n_cols == 2);
    double ones = 0;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        CHECK(d.labels[r] == checkerboard_label(d.at(r, 0), d.at(r, 1), 4));
        ones += d.labels[r];
    }
    CHECK(ones / 10000.0 == Catch::Approx(0.5).margin(0.02));

    const Dataset d2 = gen_checkerboard(4, 10000, 7);
    CHECK(d2.features == d.features);
    CHECK(d2.labels == d.labels);

    CHECK_THROWS_AS(gen_checkerboard(1, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_checkerboard(4, 15, 1), std::invalid_argument);
}

TEST_CASE("checkerboard boundary distance") {
    CHECK(checkerboard_boundary_distance(0.25, 0.6, 4) == Catch::Approx(0.0).margin(1e-12));
    CHECK(checkerboard_boundary_distance(0.125, 0.125, 4) == Catch::Approx(0.125));
    // outer edges are not class boundaries
    CHECK(checkerboard_boundary_distance(0.01, 0.125, 4) == Catch::Approx(0.125));
}

TEST_CASE("simulate_responses obeys its edge cases") {
    // theta so large that every entry is 1 (failure probability ~ 7.6e-22)
    {
        const auto sim = simulate_responses(std::vector<double>{10.0}, std::vector<double>(100, 1.0),
                                            std::vector<double>(100, 0.0),
                                            std::vector<double>(100, 0.0), Link::Probit, 5);
        for (std::size_t j = 0; j < 100; ++j) CHECK(sim.matrix.at(0, j) == 1);
    }
    // guessing floor ~1 dominates regardless of theta/beta
    {
        const auto sim = simulate_responses(std::vector<double>{-50.0}, std::vector<double>(50, 1.0),
                                            std::vector<double>(50, 25.0),
                                            std::vector<double>(50, 1.0 - 1e-12), Link::Probit, 6);
        for (std::size_t j = 0; j < 50; ++j) CHECK(sim.matrix.at(0, j) == 1);
    }
    // symmetric probit: column mean 0.5 +- 0.05 under theta ~ N(0,1)
    {
        Rng rng(17);
        std::vector<double> theta(1000);
        for (auto& t : theta) t = rng.normal();
        const auto sim = simulate_responses(theta, {1.0}, {0.0}, {0.0}, Link::Probit, 8);
        CHECK(sim.matrix.column_mean(0) == Catch::Approx(0.5).margin(0.05));
    }
    CHECK_THROWS_AS(simulate_responses({0.0}, {1.0, 1.0}, {0.0}, {0.0}, Link::Probit, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_responses({0.0}, {-1.0}, {0.0}, {0.0}, Link::Probit, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_responses({0.0}, {1.0}, {0.0}, {1.0}, Link::Probit, 1),
                    std::invalid_argument);
}

TEST_CASE("simulate_responses column means track the model probability") {
    Rng seeder(29);
    std::vector<double> theta(4000);
    for (auto& t : theta) t = seeder.normal();
    const std::vector<double> alpha{1.0, 2.0, 0.7};
    const std::vector<double> beta{-0.5, 0.3, 1.2};
    const std::vector<double> gamma{0.0, 0.1, 0.25};
    for (Link link : {Link::Probit, Link::Logit}) {
        const auto sim = simulate_responses(theta, alpha, beta, gamma, link, 31);
        for (std::size_t j = 0; j < 3; ++j) {
            double p_mean = 0.0;
            for (double t : theta) {
                p_mean += response_probability(link, t, alpha[j], beta[j], gamma[j]);
            }
            p_mean /= static_cast<double>(theta.size());
            const double se = std::sqrt(p_mean * (1.0 - p_mean) / static_cast<double>(theta.size()));
            CHECK(sim.matrix.column_mean(j) == Catch::Approx(p_mean).margin(3.0 * se + 1e-9));
        }
    }
}
