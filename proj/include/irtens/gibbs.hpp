#pragma once

// Data-augmented Gibbs sampler. Two latent n x m matrices drive the
// augmentation: W flags whether a success came from the stable region of a
// classifier (rather than a guess), and Z is the latent normal with mean
// eta_ij = alpha_j * theta_i - beta_j whose sign agrees with W. Every full
// conditional is a standard distribution, sampled exactly:
//
//   W_ij | y=1 ~ Bernoulli( Phi(eta) / (gamma + (1-gamma) Phi(eta)) ), else 0
//   Z_ij       ~ N(eta, 1) truncated to [0,inf) if W=1, (-inf,0) if W=0
//   theta_i    ~ N over sum_j (z+beta)alpha and the N(mu, sigma^2) prior
//   (alpha,beta)_j ~ bivariate normal from the regression of Z on (theta, -1)
//   M_j        ~ bivariate normal shrinking (alpha,beta)_j toward T_j
//   gamma_j    ~ Beta(#{W=0,y=1} + s, #{W=0,y=0} + t), per item by default

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irtens/fit.hpp"
#include "irtens/performance.hpp"
#include "irtens/rng.hpp"
#include "irtens/special.hpp"

namespace irtens {

// Dense row-major matrix of doubles, just enough for the latent blocks.
struct Mat {
    std::size_t n = 0, m = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : n(rows), m(cols), v(rows * cols, fill) {}
    double& at(std::size_t i, std::size_t j) { return v[i * m + j]; }
    double at(std::size_t i, std::size_t j) const { return v[i * m + j]; }
};

using BinaryMat = PerformanceMatrix;

// Symmetric positive-definite 2x2 with closed-form inverse and Cholesky.
struct Sym2 {
    double a11 = 1.0, a12 = 0.0, a22 = 1.0;

    void check_pd() const {
        if (!(a11 > 0) || !(a11 * a22 - a12 * a12 > 0)) {
            throw std::invalid_argument("Sym2: matrix is not positive definite");
        }
    }
    Sym2 inverse() const {
        const double det = a11 * a22 - a12 * a12;
        return {a22 / det, -a12 / det, a11 / det};
    }
    // Lower Cholesky factor (l11, l21, l22).
    std::array<double, 3> cholesky() const {
        const double l11 = std::sqrt(a11);
        const double l21 = a12 / l11;
        const double l22 = std::sqrt(a22 - l21 * l21);
        return {l11, l21, l22};
    }
};

inline std::array<double, 2> draw_bivariate_normal(Rng& rng, const std::array<double, 2>& mean,
                                                   const Sym2& cov) {
    const auto l = cov.cholesky();
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {mean[0] + l[0] * z1, mean[1] + l[1] * z1 + l[2] * z2};
}

struct Model2Priors {
    double mu = 0.0;          // theta_i ~ N(mu, sigma2)
    double sigma2 = 1.0;
    double sigma_alpha = 1.0; // Sigma_phi = [[sa^2, rho sa sb], [rho sa sb, sb^2]]
    double sigma_beta = 1.0;
    double rho = 0.0;
    double s = 1.0;           // gamma_j ~ Beta(s, t)
    double t = 4.0;
    double tau_alpha = 1.0;   // hyper-mean for alpha_j
    // Hyper-mean for beta_j; empty = derived from the column means of Y
    // ("a value related to the number of classifiers that solve item j").
    std::vector<double> tau_beta;

    Sym2 sigma_phi() const {
        const double c = rho * sigma_alpha * sigma_beta;
        return {sigma_alpha * sigma_alpha, c, sigma_beta * sigma_beta};
    }
    void check() const {
        if (!(sigma2 > 0 && sigma_alpha > 0 && sigma_beta > 0 && s > 0 && t > 0)) {
            throw std::invalid_argument("model2 priors: scales and Beta parameters must be positive");
        }
        if (!(rho > -1.0 && rho < 1.0)) {
            throw std::invalid_argument("model2 priors: rho must lie in (-1,1)");
        }
        sigma_phi().check_pd();
    }
};

struct Model2Options {
    bool fix_gamma_zero = false;  // 2PNO: guessing pinned at zero
    bool fix_alpha_one = false;   // 1PNO when combined with fix_gamma_zero
    bool pooled_gamma = false;    // one shared Beta draw from pooled counts
    bool truncate_alpha = true;   // rejection to alpha_j > 0 in the item draw
};

inline Mat compute_eta(const std::vector<double>& theta, const std::vector<double>& alpha,
                       const std::vector<double>& beta) {
    Mat eta(theta.size(), beta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        for (std::size_t j = 0; j < beta.size(); ++j) {
            eta.at(i, j) = alpha[j] * theta[i] - beta[j];
        }
    }
    return eta;
}

inline BinaryMat sample_W(const BinaryMat& y, const Mat& eta, const std::vector<double>& gamma,
                          Rng& rng) {
    BinaryMat w(y.n_classifiers(), y.n_samples());
    for (std::size_t i = 0; i < y.n_classifiers(); ++i) {
        for (std::size_t j = 0; j < y.n_samples(); ++j) {
            if (!y.at(i, j)) {
                w.at(i, j) = 0;
                continue;
            }
            const double g = gamma[j];
            double p;
            if (g <= 0.0) {
                p = 1.0;  // success without guessing must come from the stable region
            } else {
                const double phi = normal_cdf(eta.at(i, j));
                p = phi / (g + (1.0 - g) * phi);
            }
            w.at(i, j) = rng.bernoulli(p) ? 1 : 0;
        }
    }
    return w;
}

inline Mat sample_Z(const BinaryMat& w, const Mat& eta, Rng& rng) {
    Mat z(eta.n, eta.m);
    for (std::size_t i = 0; i < eta.n; ++i) {
        for (std::size_t j = 0; j < eta.m; ++j) {
            z.at(i, j) = w.at(i, j) ? truncated_normal_nonneg(rng, eta.at(i, j))
                                    : truncated_normal_neg(rng, eta.at(i, j));
        }
    }
    return z;
}

// theta_i ~ N( (sum_j (z_ij + beta_j) alpha_j + mu/sigma2) / (1/sigma2 + sum_j alpha_j^2),
//              1 / (1/sigma2 + sum_j alpha_j^2) )
inline std::vector<double> sample_theta(const Mat& z, const std::vector<double>& alpha,
                                        const std::vector<double>& beta, double mu, double sigma2,
                                        Rng& rng) {
    if (!(sigma2 > 0)) throw std::invalid_argument("sample_theta: sigma2 must be positive");
    double sum_alpha_sq = 0.0;
    for (double a : alpha) sum_alpha_sq += a * a;
    const double precision = 1.0 / sigma2 + sum_alpha_sq;
    const double sd = std::sqrt(1.0 / precision);
    std::vector<double> theta(z.n);
    for (std::size_t i = 0; i < z.n; ++i) {
        double acc = mu / sigma2;
        for (std::size_t j = 0; j < z.m; ++j) acc += (z.at(i, j) + beta[j]) * alpha[j];
        theta[i] = rng.normal(acc / precision, sd);
    }
    return theta;
}

// Bivariate draw of (alpha_j, beta_j) given column j of Z. The design has
// rows (theta_i, -1), so A = XtX + Sigma_phi^{-1} and the posterior is
// N(A^{-1}(XtZ_j + Sigma_phi^{-1} M_j), A^{-1}). With truncate set, the
// draw is rejected until alpha > 0 (at most 100 attempts, then the alpha
// coordinate is mirrored).
inline std::array<double, 2> sample_item_block(const std::vector<double>& z_col,
                                               const std::vector<double>& theta,
                                               const Sym2& sigma_phi,
                                               const std::array<double, 2>& m_j, Rng& rng,
                                               bool truncate = true) {
    if (z_col.size() != theta.size()) {
        throw std::invalid_argument("sample_item_block: column length mismatch");
    }
    const Sym2 prior_precision = sigma_phi.inverse();
    double sum_t = 0.0, sum_tt = 0.0, sum_tz = 0.0, sum_z = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        sum_t += theta[i];
        sum_tt += theta[i] * theta[i];
        sum_tz += theta[i] * z_col[i];
        sum_z += z_col[i];
    }
    const Sym2 a{sum_tt + prior_precision.a11, -sum_t + prior_precision.a12,
                 static_cast<double>(theta.size()) + prior_precision.a22};
    const Sym2 cov = a.inverse();
    const double b1 = sum_tz + prior_precision.a11 * m_j[0] + prior_precision.a12 * m_j[1];
    const double b2 = -sum_z + prior_precision.a12 * m_j[0] + prior_precision.a22 * m_j[1];
    const std::array<double, 2> mean{cov.a11 * b1 + cov.a12 * b2, cov.a12 * b1 + cov.a22 * b2};
    auto draw = draw_bivariate_normal(rng, mean, cov);
    if (truncate) {
        for (int attempt = 0; attempt < 100 && draw[0] <= 0.0; ++attempt) {
            draw = draw_bivariate_normal(rng, mean, cov);
        }
        if (draw[0] <= 0.0) draw[0] = -draw[0];
    }
    return draw;
}

// M_j ~ N( (Sigma_phi^{-1} + I)^{-1} (Sigma_phi^{-1} phi_j + T_j),
//          (Sigma_phi^{-1} + I)^{-1} )
inline std::array<double, 2> sample_M(const std::array<double, 2>& phi_j, const Sym2& sigma_phi,
                                      const std::array<double, 2>& t_j, Rng& rng) {
    const Sym2 prior_precision = sigma_phi.inverse();
    const Sym2 a{prior_precision.a11 + 1.0, prior_precision.a12, prior_precision.a22 + 1.0};
    const Sym2 cov = a.inverse();
    const double b1 = prior_precision.a11 * phi_j[0] + prior_precision.a12 * phi_j[1] + t_j[0];
    const double b2 = prior_precision.a12 * phi_j[0] + prior_precision.a22 * phi_j[1] + t_j[1];
    const std::array<double, 2> mean{cov.a11 * b1 + cov.a12 * b2, cov.a12 * b1 + cov.a22 * b2};
    return draw_bivariate_normal(rng, mean, cov);
}

// Per-item counts by default; the displayed conditional pools the counts
// over items, which is kept behind `pooled` as a fidelity switch (one
// shared draw for every item).
inline std::vector<double> sample_gamma(const BinaryMat& w, const BinaryMat& y, double s, double t,
                                        Rng& rng, bool pooled = false) {
    if (!(s > 0 && t > 0)) throw std::invalid_argument("sample_gamma: s and t must be positive");
    const std::size_t n = y.n_classifiers();
    const std::size_t m = y.n_samples();
    std::vector<double> gamma(m);
    if (pooled) {
        double a = s, b = t;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (w.at(i, j)) continue;
                (y.at(i, j) ? a : b) += 1.0;
            }
        }
        const double g = rng.beta(a, b);
        std::fill(gamma.begin(), gamma.end(), g);
        return gamma;
    }
    for (std::size_t j = 0; j < m; ++j) {
        double a = s, b = t;
        for (std::size_t i = 0; i < n; ++i) {
            if (w.at(i, j)) continue;
            (y.at(i, j) ? a : b) += 1.0;
        }
        gamma[j] = rng.beta(a, b);
    }
    return gamma;
}

class GibbsSampler {
public:
    GibbsSampler(std::size_t n, std::size_t m, const Model2Priors& priors,
                 const Model2Options& options, std::uint64_t seed)
        : n_(n), m_(m), priors_(priors), options_(options), rng_(seed) {
        priors.check();
        if (!priors.tau_beta.empty() && priors.tau_beta.size() != m) {
            throw std::invalid_argument("model2 priors: tau_beta length mismatch");
        }
        theta_.assign(n, 0.0);
        alpha_.assign(m, 1.0);
        beta_.assign(m, 0.0);
        gamma_.assign(m, options.fix_gamma_zero ? 0.0 : priors.s / (priors.s + priors.t));
        mu_alpha_.assign(m, priors.tau_alpha);
        mu_beta_.assign(m, 0.0);
        tau_beta_.assign(m, 0.0);
        w_ = BinaryMat(n, m);
        z_ = Mat(n, m);
    }

    // Heuristic starting point and data-derived hyper-means.
    void init_from_data(const BinaryMat& y) {
        const double lo_r = 1.0 / (2.0 * static_cast<double>(m_));
        const double lo_c = 1.0 / (2.0 * static_cast<double>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            theta_[i] = inverse_normal_cdf(std::clamp(y.row_mean(i), lo_r, 1.0 - lo_r));
        }
        for (std::size_t j = 0; j < m_; ++j) {
            const double tb =
                priors_.tau_beta.empty()
                    ? -inverse_normal_cdf(std::clamp(y.column_mean(j), lo_c, 1.0 - lo_c))
                    : priors_.tau_beta[j];
            tau_beta_[j] = tb;
            beta_[j] = tb;
            mu_beta_[j] = tb;
        }
    }

    void set_fixed_tau(const std::vector<double>& tau_beta) { tau_beta_ = tau_beta; }

    // Draw (theta, M, phi, gamma) from the prior; used by prior-predictive
    // checks. With truncate_alpha the (M, phi) pair is redrawn jointly
    // until alpha > 0, matching a truncation imposed on the joint density.
    void draw_from_prior() {
        const Sym2 sigma_phi = priors_.sigma_phi();
        for (std::size_t i = 0; i < n_; ++i) {
            theta_[i] = rng_.normal(priors_.mu, std::sqrt(priors_.sigma2));
        }
        for (std::size_t j = 0; j < m_; ++j) {
            for (;;) {
                const std::array<double, 2> t_j{priors_.tau_alpha, tau_beta_[j]};
                const auto m_j = draw_bivariate_normal(rng_, t_j, Sym2{1.0, 0.0, 1.0});
                const auto phi = draw_bivariate_normal(rng_, m_j, sigma_phi);
                if (options_.truncate_alpha && phi[0] <= 0.0) continue;
                mu_alpha_[j] = m_j[0];
                mu_beta_[j] = m_j[1];
                alpha_[j] = options_.fix_alpha_one ? 1.0 : phi[0];
                beta_[j] = phi[1];
                break;
            }
            gamma_[j] = options_.fix_gamma_zero ? 0.0 : rng_.beta(priors_.s, priors_.t);
        }
    }

    // Generative cascade (Z, W, Y) given the current parameters.
    void regenerate_data(BinaryMat& y) {
        const Mat eta = compute_eta(theta_, alpha_, beta_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                const double z = rng_.normal(eta.at(i, j), 1.0);
                z_.at(i, j) = z;
                const bool w = z >= 0.0;
                w_.at(i, j) = w ? 1 : 0;
                y.at(i, j) = w ? 1 : (rng_.bernoulli(gamma_[j]) ? 1 : 0);
            }
        }
    }

    void sweep(const BinaryMat& y) {
        const Mat eta = compute_eta(theta_, alpha_, beta_);
        w_ = sample_W(y, eta, gamma_, rng_);
        z_ = sample_Z(w_, eta, rng_);
        theta_ = sample_theta(z_, alpha_, beta_, priors_.mu, priors_.sigma2, rng_);
        const Sym2 sigma_phi = priors_.sigma_phi();
        if (options_.fix_alpha_one) {
            update_items_beta_only();
        } else {
            std::vector<double> z_col(n_);
            for (std::size_t j = 0; j < m_; ++j) {
                for (std::size_t i = 0; i < n_; ++i) z_col[i] = z_.at(i, j);
                const auto phi = sample_item_block(z_col, theta_, sigma_phi,
                                                   {mu_alpha_[j], mu_beta_[j]}, rng_,
                                                   options_.truncate_alpha);
                alpha_[j] = phi[0];
                beta_[j] = phi[1];
            }
            for (std::size_t j = 0; j < m_; ++j) {
                const auto m_j = sample_M({alpha_[j], beta_[j]}, sigma_phi,
                                          {priors_.tau_alpha, tau_beta_[j]}, rng_);
                mu_alpha_[j] = m_j[0];
                mu_beta_[j] = m_j[1];
            }
        }
        if (!options_.fix_gamma_zero) {
            gamma_ = sample_gamma(w_, y, priors_.s, priors_.t, rng_, options_.pooled_gamma);
        }
    }

    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& alpha() const { return alpha_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& gamma() const { return gamma_; }
    const BinaryMat& w() const { return w_; }
    const Mat& z() const { return z_; }
    Rng& rng() { return rng_; }

private:
    // With alpha pinned at 1 the item block collapses to a scalar normal
    // regression for beta_j and its hyper-mean.
    void update_items_beta_only() {
        const double sb2 = priors_.sigma_beta * priors_.sigma_beta;
        const double precision = static_cast<double>(n_) + 1.0 / sb2;
        const double sd = std::sqrt(1.0 / precision);
        for (std::size_t j = 0; j < m_; ++j) {
            double acc = mu_beta_[j] / sb2;
            for (std::size_t i = 0; i < n_; ++i) acc += theta_[i] - z_.at(i, j);
            beta_[j] = rng_.normal(acc / precision, sd);
            const double hyper_precision = 1.0 / sb2 + 1.0;
            const double hyper_mean = (beta_[j] / sb2 + tau_beta_[j]) / hyper_precision;
            mu_beta_[j] = rng_.normal(hyper_mean, std::sqrt(1.0 / hyper_precision));
            alpha_[j] = 1.0;
        }
    }

    std::size_t n_, m_;
    Model2Priors priors_;
    Model2Options options_;
    Rng rng_;
    std::vector<double> theta_, alpha_, beta_, gamma_;
    std::vector<double> mu_alpha_, mu_beta_, tau_beta_;
    BinaryMat w_;
    Mat z_;
};

inline FitResult fit_gibbs(const PerformanceMatrix& y, const Model2Priors& priors = {},
                           const McmcConfig& config = McmcConfig::gibbs_defaults(),
                           const Model2Options& options = {}) {
    config.check();
    const std::size_t n = y.n_classifiers();
    const std::size_t m = y.n_samples();
    GibbsSampler sampler(n, m, priors, options, config.seed);
    sampler.init_from_data(y);

    FitResult fit;
    fit.engine = "model2";
    Trace& trace = fit.trace;
    if (config.store_trace) {
        for (std::size_t i = 0; i < n; ++i) trace.names.push_back("theta[" + std::to_string(i) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("alpha[" + std::to_string(j) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("beta[" + std::to_string(j) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("gamma[" + std::to_string(j) + "]");
        trace.samples.resize(trace.names.size());
    }

    std::vector<double> sum_theta(n, 0.0), sum_alpha(m, 0.0), sum_beta(m, 0.0), sum_gamma(m, 0.0);
    std::size_t n_draws = 0;
    for (int iter = 0; iter < config.n_iterations; ++iter) {
        sampler.sweep(y);
        if (iter < config.burn_in) continue;
        if ((iter - config.burn_in) % config.thinning != 0) continue;
        ++n_draws;
        for (std::size_t i = 0; i < n; ++i) sum_theta[i] += sampler.theta()[i];
        for (std::size_t j = 0; j < m; ++j) {
            sum_alpha[j] += sampler.alpha()[j];
            sum_beta[j] += sampler.beta()[j];
            sum_gamma[j] += sampler.gamma()[j];
        }
        if (config.store_trace) {
            std::size_t p = 0;
            for (std::size_t i = 0; i < n; ++i) trace.samples[p++].push_back(sampler.theta()[i]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(sampler.alpha()[j]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(sampler.beta()[j]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(sampler.gamma()[j]);
        }
    }

    const double denom = static_cast<double>(n_draws);
    fit.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) fit.theta[i] = sum_theta[i] / denom;
    fit.alpha.resize(m);
    fit.beta.resize(m);
    fit.gamma.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        fit.alpha[j] = sum_alpha[j] / denom;
        fit.beta[j] = sum_beta[j] / denom;
        fit.gamma[j] = sum_gamma[j] / denom;
    }
    fit.diagnostics["retained_draws"] = denom;
    return fit;
}

}  // namespace irtens
