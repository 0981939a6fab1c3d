#pragma once

// Bootstrap construction of the base-classifier pool. Tree k trains on a
// resample drawn with a seed derived from (root seed, k), so the pool is
// identical no matter how many threads build it.

#include <cstdint>
#include <cstring>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

#include "irtens/dataset.hpp"
#include "irtens/performance.hpp"
#include "irtens/rng.hpp"
#include "irtens/threading.hpp"
#include "irtens/tree.hpp"

namespace irtens {

// Non-cryptographic fingerprint of the dataset contents, recorded in pool
// and bundle artifacts to catch accidental train/predict mismatches.
inline std::uint64_t dataset_fingerprint(const Dataset& d) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    mix(d.n_rows);
    mix(d.n_cols);
    for (double f : d.features) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(f));
        std::memcpy(&bits, &f, sizeof(bits));
        mix(bits);
    }
    for (int l : d.labels) mix(static_cast<std::uint64_t>(l));
    return h;
}

inline Dataset bootstrap_sample(const Dataset& d, std::uint64_t seed) {
    if (d.n_rows == 0) throw std::invalid_argument("bootstrap_sample: empty dataset");
    Rng rng(seed);
    std::vector<std::size_t> idx(d.n_rows);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(d.n_rows));
    return d.select_rows(idx);
}

struct BasePool {
    std::vector<std::unique_ptr<TreeNode>> trees;
    std::vector<std::uint64_t> bootstrap_seeds;
    std::uint64_t training_fingerprint = 0;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;

    std::size_t size() const { return trees.size(); }
};

inline BasePool fit_base_pool(const Dataset& d, std::size_t n_trees, const TreeConfig& config,
                              std::uint64_t seed, int threads = 1) {
    if (n_trees == 0) throw std::invalid_argument("fit_base_pool: n_trees must be >= 1");
    validate(d);
    BasePool pool;
    pool.training_fingerprint = dataset_fingerprint(d);
    pool.n_features = d.n_cols;
    pool.n_classes = d.n_classes();
    pool.bootstrap_seeds.resize(n_trees);
    std::set<std::uint64_t> seen;
    for (std::size_t k = 0; k < n_trees; ++k) {
        std::uint64_t s = derive_seed(seed, "tree", k);
        while (!seen.insert(s).second) ++s;  // keep seeds pairwise distinct
        pool.bootstrap_seeds[k] = s;
    }
    pool.trees.resize(n_trees);
    parallel_for(n_trees, threads, [&](std::size_t k) {
        const Dataset boot = bootstrap_sample(d, pool.bootstrap_seeds[k]);
        pool.trees[k] = fit_tree(boot, config, pool.bootstrap_seeds[k]);
    });
    return pool;
}

// Entry (i,j) = 1 iff tree i predicts sample j's label.
inline PerformanceMatrix build_performance_matrix(const BasePool& pool, const Dataset& d) {
    if (pool.n_features != d.n_cols) {
        throw std::invalid_argument("build_performance_matrix: feature arity mismatch");
    }
    if (!d.labeled()) {
        throw std::invalid_argument("build_performance_matrix: dataset has no labels");
    }
    PerformanceMatrix y(pool.size(), d.n_rows);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = 0; j < d.n_rows; ++j) {
            y.at(i, j) = predict_tree(*pool.trees[i], d.row(j)) == d.labels[j] ? 1 : 0;
        }
    }
    return y;
}

}  // namespace irtens
