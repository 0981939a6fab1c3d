#pragma once

// Bernoulli-Beta latent-probability model fit by generalized EM. Each cell
// carries Beta shapes m_ij = exp((theta_i - beta_j)/2), n_ij = 1/m_ij
// (discrimination fixed at 1); the E-step reduces to digamma expressions
// and the M-step is one safeguarded gradient-ascent update under the
// sum-to-zero constraint on beta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "irtens/fit.hpp"
#include "irtens/performance.hpp"
#include "irtens/rng.hpp"
#include "irtens/special.hpp"

namespace irtens {

struct EmConfig {
    double step_size = 0.05;
    int max_iterations = 2000;
    double tolerance = 1e-8;  // on the observed log-likelihood
    std::uint64_t seed = 0;   // used only when init_jitter > 0
    double init_jitter = 0.0;
    double theta_cap = 10.0;  // clamp for separated rows/columns
    // Optional explicit starting point (tests exercise the translation
    // gauge with these); empty means the data-driven heuristic.
    std::vector<double> init_theta;
    std::vector<double> init_beta;

    void check() const {
        if (!(step_size > 0)) throw std::invalid_argument("em: step_size must be positive");
        if (!(tolerance > 0)) throw std::invalid_argument("em: tolerance must be positive");
        if (max_iterations < 1) throw std::invalid_argument("em: max_iterations must be >= 1");
    }
};

// E(P_ij) = sigmoid(theta_i - beta_j), the mean of Beta(m_ij, n_ij).
inline double expected_success(double theta_i, double beta_j) {
    return sigmoid(theta_i - beta_j);
}

struct ShapeGrid {
    std::size_t n = 0, m = 0;
    std::vector<double> m_grid;  // row-major
    std::vector<double> n_grid;
};

inline ShapeGrid make_shape_grid(const std::vector<double>& theta,
                                 const std::vector<double>& beta) {
    ShapeGrid g;
    g.n = theta.size();
    g.m = beta.size();
    g.m_grid.resize(g.n * g.m);
    g.n_grid.resize(g.n * g.m);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.m; ++j) {
            const double half = 0.5 * (theta[i] - beta[j]);
            g.m_grid[i * g.m + j] = std::exp(half);
            g.n_grid[i * g.m + j] = std::exp(-half);
        }
    }
    return g;
}

struct EStepResult {
    std::vector<double> sm;  // E[ln P_ij] under the cell's Beta posterior
    std::vector<double> sn;  // E[ln (1-P_ij)]
};

// Posterior of P_ij given y is Beta(y + m_ij, n_ij - y + 1), so
//   SM_ij = psi(y + m_ij) - psi(n_ij + m_ij + 1)
//   SN_ij = psi(n_ij - y + 1) - psi(n_ij + m_ij + 1).
inline EStepResult e_step(const PerformanceMatrix& y, const ShapeGrid& g) {
    if (y.n_classifiers() != g.n || y.n_samples() != g.m) {
        throw std::invalid_argument("e_step: grid does not match the performance matrix");
    }
    EStepResult r;
    r.sm.resize(g.n * g.m);
    r.sn.resize(g.n * g.m);
    for (std::size_t i = 0; i < g.n; ++i) {
        for (std::size_t j = 0; j < g.m; ++j) {
            const std::size_t k = i * g.m + j;
            const double yij = y.at(i, j);
            const double denom = digamma(g.n_grid[k] + g.m_grid[k] + 1.0);
            r.sm[k] = digamma(yij + g.m_grid[k]) - denom;
            r.sn[k] = digamma(g.n_grid[k] - yij + 1.0) - denom;
        }
    }
    return r;
}

// The surrogate objective whose gradients drive the M-step, evaluated at
// (theta, beta) with the E-step expectations held fixed.
inline double q_value(const PerformanceMatrix& y, const std::vector<double>& theta,
                      const std::vector<double>& beta, const EStepResult& e) {
    const std::size_t n = theta.size();
    const std::size_t m = beta.size();
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = i * m + j;
            const double half = 0.5 * (theta[i] - beta[j]);
            const double mij = std::exp(half);
            const double nij = std::exp(-half);
            const double yij = y.at(i, j);
            q += (yij + mij - 1.0) * e.sm[k] + (nij - yij) * e.sn[k];
        }
    }
    return q;
}

struct QGradients {
    std::vector<double> d_theta;  // length n
    std::vector<double> d_beta;   // length m; last entry 0 (absorbed by the constraint)
};

// dQ/dtheta_i = sum_j (1/2)(m_ij SM_ij - n_ij SN_ij). For beta the last
// column absorbs the sum-to-zero constraint, so for j < m the entry is the
// free-column gradient minus the last column's.
inline QGradients q_gradients(const std::vector<double>& theta, const std::vector<double>& beta,
                              const ShapeGrid& g, const EStepResult& e) {
    const std::size_t n = theta.size();
    const std::size_t m = beta.size();
    if (g.n != n || g.m != m) throw std::invalid_argument("q_gradients: dimension mismatch");
    QGradients out;
    out.d_theta.assign(n, 0.0);
    std::vector<double> col(m, 0.0);  // unconstrained dQ/dbeta_j
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = i * m + j;
            const double term = 0.5 * (g.m_grid[k] * e.sm[k] - g.n_grid[k] * e.sn[k]);
            out.d_theta[i] += term;
            col[j] -= term;
        }
    }
    out.d_beta.assign(m, 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j) out.d_beta[j] = col[j] - col[m - 1];
    return out;
}

// Observed-data log-likelihood: marginally Y_ij ~ Bernoulli(sigmoid(eta)).
inline double em_observed_loglik(const PerformanceMatrix& y, const std::vector<double>& theta,
                                 const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < y.n_classifiers(); ++i) {
        for (std::size_t j = 0; j < y.n_samples(); ++j) {
            const double eta = theta[i] - beta[j];
            ll += y.at(i, j) ? -softplus(-eta) : -softplus(eta);
        }
    }
    return ll;
}

struct MStepResult {
    std::vector<double> theta;
    std::vector<double> beta;
    bool improved = false;   // false after 20 failed halvings: convergence signal
    double step_used = 0.0;
    double loglik = 0.0;     // observed log-likelihood of the accepted point
};

namespace detail {

// Re-center beta to mean zero over the free columns, shifting theta by the
// same amount so every theta_i - beta_j is preserved.
inline void recenter(std::vector<double>& theta, std::vector<double>& beta,
                     const std::vector<bool>& theta_free, const std::vector<bool>& beta_free) {
    double sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (beta_free[j]) {
            sum += beta[j];
            ++n_free;
        }
    }
    if (n_free == 0) return;
    const double c = sum / static_cast<double>(n_free);
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (beta_free[j]) beta[j] -= c;
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (theta_free[i]) theta[i] -= c;
    }
}

}  // namespace detail

// One generalized-EM update: ascend along the Q gradients, halving the
// step (at most 20 times) whenever the observed log-likelihood would
// decrease, then re-center beta.
inline MStepResult m_step(const PerformanceMatrix& y, const std::vector<double>& theta,
                          const std::vector<double>& beta, const QGradients& grad, double step,
                          const std::vector<bool>& theta_free, const std::vector<bool>& beta_free) {
    if (!(step > 0)) throw std::invalid_argument("m_step: step must be positive");
    const double ll_old = em_observed_loglik(y, theta, beta);
    MStepResult out;
    double s = step;
    for (int attempt = 0; attempt <= 20; ++attempt) {
        std::vector<double> th = theta;
        std::vector<double> be = beta;
        for (std::size_t i = 0; i < th.size(); ++i) {
            if (theta_free[i]) th[i] += s * grad.d_theta[i];
        }
        for (std::size_t j = 0; j < be.size(); ++j) {
            if (beta_free[j]) be[j] += s * grad.d_beta[j];
        }
        const double ll_new = em_observed_loglik(y, th, be);
        if (ll_new >= ll_old - 1e-12) {
            detail::recenter(th, be, theta_free, beta_free);
            out.theta = std::move(th);
            out.beta = std::move(be);
            out.improved = true;
            out.step_used = s;
            out.loglik = ll_new;
            return out;
        }
        s *= 0.5;
    }
    out.theta = theta;
    out.beta = beta;
    out.improved = false;
    out.step_used = 0.0;
    out.loglik = ll_old;
    return out;
}

inline FitResult fit_em(const PerformanceMatrix& y, const EmConfig& config = {}) {
    config.check();
    const std::size_t n = y.n_classifiers();
    const std::size_t m = y.n_samples();

    FitResult fit;
    fit.engine = "model3";

    // Separated rows/columns: the MLE diverges, so clamp at +-theta_cap,
    // freeze, and report the indices.
    std::vector<bool> theta_free(n, true);
    std::vector<bool> beta_free(m, true);
    std::vector<double> theta(n), beta(m);
    for (std::size_t i = 0; i < n; ++i) {
        const double rm = y.row_mean(i);
        if (rm == 0.0 || rm == 1.0) {
            theta_free[i] = false;
            theta[i] = rm == 1.0 ? config.theta_cap : -config.theta_cap;
            fit.separated_rows.push_back(i);
        } else {
            const double lo = 1.0 / (2.0 * static_cast<double>(m));
            theta[i] = logit(std::clamp(rm, lo, 1.0 - lo));
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double cm = y.column_mean(j);
        if (cm == 0.0 || cm == 1.0) {
            beta_free[j] = false;
            beta[j] = cm == 1.0 ? -config.theta_cap : config.theta_cap;
            fit.separated_cols.push_back(j);
        } else {
            const double lo = 1.0 / (2.0 * static_cast<double>(n));
            beta[j] = -logit(std::clamp(cm, lo, 1.0 - lo));
        }
    }
    if (!config.init_theta.empty()) {
        if (config.init_theta.size() != n || config.init_beta.size() != m) {
            throw std::invalid_argument("fit_em: explicit initialization arity mismatch");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (theta_free[i]) theta[i] = config.init_theta[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (beta_free[j]) beta[j] = config.init_beta[j];
        }
    }
    if (config.init_jitter > 0.0) {
        Rng rng(config.seed);
        for (std::size_t i = 0; i < n; ++i) {
            if (theta_free[i]) theta[i] += config.init_jitter * rng.normal();
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (beta_free[j]) beta[j] += config.init_jitter * rng.normal();
        }
    }
    detail::recenter(theta, beta, theta_free, beta_free);

    double ll = em_observed_loglik(y, theta, beta);
    bool converged = false;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        const ShapeGrid grid = make_shape_grid(theta, beta);
        const EStepResult e = e_step(y, grid);
        const QGradients grad = q_gradients(theta, beta, grid, e);
        double grad_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (theta_free[i]) grad_norm += grad.d_theta[i] * grad.d_theta[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (beta_free[j]) grad_norm += grad.d_beta[j] * grad.d_beta[j];
        }
        grad_norm = std::sqrt(grad_norm);

        const MStepResult step =
            m_step(y, theta, beta, grad, config.step_size, theta_free, beta_free);
        if (!step.improved) {
            converged = true;  // no improving step exists along the gradient
            break;
        }
        theta = step.theta;
        beta = step.beta;
        fit.history.push_back({iter, step.loglik, grad_norm, step.step_used});
        const double gain = step.loglik - ll;
        ll = step.loglik;
        if (gain < config.tolerance) {
            converged = true;
            break;
        }
    }

    fit.theta = theta;
    fit.beta = beta;
    fit.alpha.assign(m, 1.0);
    fit.gamma.assign(m, 0.0);
    fit.diagnostics["converged"] = converged ? 1.0 : 0.0;
    fit.diagnostics["iterations"] = static_cast<double>(fit.history.size());
    fit.diagnostics["final_loglik"] = ll;
    return fit;
}

}  // namespace irtens
