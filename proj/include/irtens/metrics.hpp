#pragma once

// Recovery measures (correlation, MSE, MAE, variance ratio), per-component
// error ratios against the cross-model average MSE, and the pairwise win
// table with goal differences.

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irtens {

namespace detail {

inline double population_variance(const std::vector<double>& v, double mean) {
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(v.size());
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace detail

// Pearson correlation; nullopt marks the undefined zero-variance case.
inline std::optional<double> correlation(const std::vector<double>& est,
                                         const std::vector<double>& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("correlation: length mismatch");
    if (est.size() < 2) throw std::invalid_argument("correlation: need at least 2 components");
    const double me = detail::mean_of(est);
    const double mt = detail::mean_of(truth);
    const double ve = detail::population_variance(est, me);
    const double vt = detail::population_variance(truth, mt);
    if (ve == 0.0 || vt == 0.0) return std::nullopt;
    double cov = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) cov += (est[i] - me) * (truth[i] - mt);
    cov /= static_cast<double>(est.size());
    return cov / std::sqrt(ve * vt);
}

inline double mse(const std::vector<double>& est, const std::vector<double>& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("mse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double d = est[i] - truth[i];
        s += d * d;
    }
    return s / static_cast<double>(est.size());
}

inline double mae(const std::vector<double>& est, const std::vector<double>& truth) {
    if (est.size() != truth.size()) throw std::invalid_argument("mae: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) s += std::fabs(est[i] - truth[i]);
    return s / static_cast<double>(est.size());
}

inline std::optional<double> variance_ratio(const std::vector<double>& est,
                                            const std::vector<double>& truth) {
    if (est.size() != truth.size()) {
        throw std::invalid_argument("variance_ratio: length mismatch");
    }
    const double vt = detail::population_variance(truth, detail::mean_of(truth));
    if (vt == 0.0) return std::nullopt;
    const double ve = detail::population_variance(est, detail::mean_of(est));
    return ve / vt;
}

// Componentwise squared error divided by the average MSE across the
// supplied models; nullopt when every model is exact.
inline std::optional<std::vector<std::vector<double>>> error_ratio(
    const std::vector<std::vector<double>>& est_by_model, const std::vector<double>& truth) {
    if (est_by_model.empty()) throw std::invalid_argument("error_ratio: no models supplied");
    double avg_mse = 0.0;
    for (const auto& est : est_by_model) avg_mse += mse(est, truth);
    avg_mse /= static_cast<double>(est_by_model.size());
    if (avg_mse == 0.0) return std::nullopt;
    std::vector<std::vector<double>> ratios(est_by_model.size());
    for (std::size_t k = 0; k < est_by_model.size(); ++k) {
        ratios[k].resize(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const double d = est_by_model[k][i] - truth[i];
            ratios[k][i] = d * d / avg_mse;
        }
    }
    return ratios;
}

// Pairwise comparison counts: a[i][j] = number of datasets on which method
// i's accuracy >= method j's. Ties count in both directions, exactly as the
// ">= convention" implies; self-comparisons are excluded.
struct WinTable {
    std::vector<std::string> methods;
    std::vector<std::vector<int>> counts;  // counts[i][j]
    std::vector<int> wins;                 // row sums
    std::vector<int> losses;               // column sums
    std::vector<int> goal_difference;      // wins - losses
};

inline WinTable build_win_table(
    const std::vector<std::string>& methods,
    const std::vector<std::map<std::string, double>>& accuracy_by_dataset) {
    const std::size_t k = methods.size();
    WinTable table;
    table.methods = methods;
    table.counts.assign(k, std::vector<int>(k, 0));
    for (const auto& row : accuracy_by_dataset) {
        for (const auto& method : methods) {
            if (!row.count(method)) {
                throw std::invalid_argument("build_win_table: missing accuracy for method '" +
                                            method + "'");
            }
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j) continue;
                if (row.at(methods[i]) >= row.at(methods[j])) table.counts[i][j]++;
            }
        }
    }
    table.wins.assign(k, 0);
    table.losses.assign(k, 0);
    table.goal_difference.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            table.wins[i] += table.counts[i][j];
            table.losses[i] += table.counts[j][i];
        }
        table.goal_difference[i] = table.wins[i] - table.losses[i];
    }
    return table;
}

}  // namespace irtens
