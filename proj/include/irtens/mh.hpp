#pragma once

// Metropolis-Hastings sampler for the guessing-augmented probit model.
// One systematic sweep per iteration updates every theta_i, every
// sigma_i^2 (exact conjugate inverse-gamma draw), and every item's alpha,
// beta and gamma blocks with random-walk proposals. alpha walks on the log
// scale and gamma on the logit scale; the transformed-space targets carry
// the corresponding Jacobians so the proposals stay symmetric.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "irtens/fit.hpp"
#include "irtens/performance.hpp"
#include "irtens/rng.hpp"
#include "irtens/special.hpp"

namespace irtens {

struct Model1Priors {
    double mu_a = 0.0;        // log(alpha_j) ~ N(mu_a, sigma_a^2)
    double sigma_a = 1.0;
    double sigma_beta = 1.0;  // beta_j ~ N(0, sigma_beta^2)
    double alpha_theta = 2.0; // sigma_i^2 ~ InvGamma(alpha_theta, beta_theta)
    double beta_theta = 1.0;
    double s = 1.0;           // gamma_j ~ Beta(s, t)
    double t = 4.0;

    void check() const {
        if (!(sigma_a > 0 && sigma_beta > 0 && alpha_theta > 0 && beta_theta > 0 && s > 0 &&
              t > 0)) {
            throw std::invalid_argument("model1 priors: scale/shape parameters must be positive");
        }
    }
};

// P(Y=1) = gamma + (1-gamma) * Phi(alpha*theta - beta), clipped away from
// {0,1} before the logs.
inline double three_pno_probability(double theta, double alpha, double beta, double gamma) {
    const double p = gamma + (1.0 - gamma) * normal_cdf(alpha * theta - beta);
    return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

inline double loglik_3pno(const PerformanceMatrix& y, const std::vector<double>& theta,
                          const std::vector<double>& alpha, const std::vector<double>& beta,
                          const std::vector<double>& gamma) {
    const std::size_t n = y.n_classifiers();
    const std::size_t m = y.n_samples();
    if (theta.size() != n || alpha.size() != m || beta.size() != m || gamma.size() != m) {
        throw std::invalid_argument("loglik_3pno: dimension mismatch");
    }
    for (double a : alpha) {
        if (!(a > 0)) throw std::invalid_argument("loglik_3pno: alpha must be positive");
    }
    for (double g : gamma) {
        if (!(g >= 0 && g < 1)) throw std::invalid_argument("loglik_3pno: gamma must lie in [0,1)");
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = three_pno_probability(theta[i], alpha[j], beta[j], gamma[j]);
            ll += y.at(i, j) ? std::log(p) : std::log1p(-p);
        }
    }
    return ll;
}

// Accept/reject for a symmetric proposal: accept iff log u < lp' - lp.
// A proposal equal to the current state (lp' == lp) is always accepted; a
// zero-density proposal (lp' == -inf) never is.
inline bool mh_accept(Rng& rng, double lp_current, double lp_proposed) {
    if (!std::isfinite(lp_proposed)) return false;
    if (lp_proposed >= lp_current) return true;
    return std::log(rng.uniform_open()) < lp_proposed - lp_current;
}

class MhSampler {
public:
    MhSampler(const PerformanceMatrix& y, const Model1Priors& priors, const McmcConfig& config)
        : y_(y), priors_(priors), config_(config), rng_(config.seed) {
        priors.check();
        config.check();
        const std::size_t n = y.n_classifiers();
        const std::size_t m = y.n_samples();
        theta_.resize(n);
        sigma2_.assign(n, 1.0);
        log_alpha_.assign(m, 0.0);
        beta_.resize(m);
        logit_gamma_.assign(m, logit(0.1));
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = 1.0 / (2.0 * static_cast<double>(m));
            theta_[i] = inverse_normal_cdf(std::clamp(y.row_mean(i), lo, 1.0 - lo));
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double lo = 1.0 / (2.0 * static_cast<double>(n));
            beta_[j] = -inverse_normal_cdf(std::clamp(y.column_mean(j), lo, 1.0 - lo));
        }
    }

    std::size_t n_classifiers() const { return theta_.size(); }
    std::size_t n_items() const { return beta_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& beta() const { return beta_; }
    const std::vector<double>& sigma2() const { return sigma2_; }
    std::vector<double> alpha() const {
        std::vector<double> a(log_alpha_.size());
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::exp(log_alpha_[j]);
        return a;
    }
    std::vector<double> gamma() const {
        std::vector<double> g(logit_gamma_.size());
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = sigmoid(logit_gamma_[j]);
        return g;
    }
    Rng& rng() { return rng_; }

    void set_theta(std::size_t i, double v) { theta_[i] = v; }
    void set_item(std::size_t j, double alpha, double beta, double gamma) {
        log_alpha_[j] = std::log(alpha);
        beta_[j] = beta;
        logit_gamma_[j] = logit(gamma);
    }
    void set_sigma2(std::size_t i, double v) { sigma2_[i] = v; }

    // Log joint of data and parameters (up to a constant); finite-ness is
    // the precondition every proposal is judged against.
    double log_posterior() const {
        double lp = 0.0;
        for (std::size_t i = 0; i < theta_.size(); ++i) {
            lp += log_normal_density(theta_[i], 0.0, sigma2_[i]);
            lp += log_inv_gamma_density(sigma2_[i]);
        }
        for (std::size_t j = 0; j < beta_.size(); ++j) {
            lp += log_normal_density(log_alpha_[j], priors_.mu_a, priors_.sigma_a * priors_.sigma_a);
            lp += log_normal_density(beta_[j], 0.0, priors_.sigma_beta * priors_.sigma_beta);
            lp += gamma_transformed_log_prior(logit_gamma_[j]);
        }
        for (std::size_t i = 0; i < theta_.size(); ++i) lp += row_loglik(i, theta_[i]);
        return lp;
    }

    void update_theta(std::size_t i) {
        const double cur = theta_[i];
        const double prop = cur + config_.step_theta * rng_.normal();
        const double lp_cur = row_loglik(i, cur) + log_normal_density(cur, 0.0, sigma2_[i]);
        const double lp_prop = row_loglik(i, prop) + log_normal_density(prop, 0.0, sigma2_[i]);
        ++proposed_theta_;
        if (mh_accept(rng_, lp_cur, lp_prop)) {
            theta_[i] = prop;
            ++accepted_theta_;
        }
    }

    // Exact conjugate draw: sigma_i^2 ~ IG(alpha_theta + 1/2, beta_theta + theta_i^2/2).
    void update_sigma2(std::size_t i) {
        const double shape = priors_.alpha_theta + 0.5;
        const double scale = priors_.beta_theta + 0.5 * theta_[i] * theta_[i];
        sigma2_[i] = rng_.inverse_gamma(shape, scale);
    }

    void update_alpha(std::size_t j) {
        const double cur = log_alpha_[j];
        const double prop = cur + config_.step_alpha * rng_.normal();
        const double variance = priors_.sigma_a * priors_.sigma_a;
        const double lp_cur =
            column_loglik(j, std::exp(cur), beta_[j], sigmoid(logit_gamma_[j])) +
            log_normal_density(cur, priors_.mu_a, variance);
        const double lp_prop =
            column_loglik(j, std::exp(prop), beta_[j], sigmoid(logit_gamma_[j])) +
            log_normal_density(prop, priors_.mu_a, variance);
        ++proposed_alpha_;
        if (mh_accept(rng_, lp_cur, lp_prop)) {
            log_alpha_[j] = prop;
            ++accepted_alpha_;
        }
    }

    void update_beta(std::size_t j) {
        const double cur = beta_[j];
        const double prop = cur + config_.step_beta * rng_.normal();
        const double variance = priors_.sigma_beta * priors_.sigma_beta;
        const double alpha = std::exp(log_alpha_[j]);
        const double gamma = sigmoid(logit_gamma_[j]);
        const double lp_cur = column_loglik(j, alpha, cur, gamma) +
                              log_normal_density(cur, 0.0, variance);
        const double lp_prop = column_loglik(j, alpha, prop, gamma) +
                               log_normal_density(prop, 0.0, variance);
        ++proposed_beta_;
        if (mh_accept(rng_, lp_cur, lp_prop)) {
            beta_[j] = prop;
            ++accepted_beta_;
        }
    }

    void update_gamma(std::size_t j) {
        const double cur = logit_gamma_[j];
        const double prop = cur + config_.step_gamma * rng_.normal();
        const double alpha = std::exp(log_alpha_[j]);
        const double lp_cur =
            column_loglik(j, alpha, beta_[j], sigmoid(cur)) + gamma_transformed_log_prior(cur);
        const double lp_prop =
            column_loglik(j, alpha, beta_[j], sigmoid(prop)) + gamma_transformed_log_prior(prop);
        ++proposed_gamma_;
        if (mh_accept(rng_, lp_cur, lp_prop)) {
            logit_gamma_[j] = prop;
            ++accepted_gamma_;
        }
    }

    void sweep() {
        for (std::size_t i = 0; i < theta_.size(); ++i) update_theta(i);
        for (std::size_t i = 0; i < theta_.size(); ++i) update_sigma2(i);
        for (std::size_t j = 0; j < beta_.size(); ++j) update_alpha(j);
        for (std::size_t j = 0; j < beta_.size(); ++j) update_beta(j);
        for (std::size_t j = 0; j < beta_.size(); ++j) update_gamma(j);
    }

    double acceptance_theta() const { return rate(accepted_theta_, proposed_theta_); }
    double acceptance_alpha() const { return rate(accepted_alpha_, proposed_alpha_); }
    double acceptance_beta() const { return rate(accepted_beta_, proposed_beta_); }
    double acceptance_gamma() const { return rate(accepted_gamma_, proposed_gamma_); }

    double row_loglik(std::size_t i, double theta) const {
        double ll = 0.0;
        for (std::size_t j = 0; j < beta_.size(); ++j) {
            const double p = three_pno_probability(theta, std::exp(log_alpha_[j]), beta_[j],
                                                   sigmoid(logit_gamma_[j]));
            ll += y_.at(i, j) ? std::log(p) : std::log1p(-p);
        }
        return ll;
    }

    double column_loglik(std::size_t j, double alpha, double beta, double gamma) const {
        double ll = 0.0;
        for (std::size_t i = 0; i < theta_.size(); ++i) {
            const double p = three_pno_probability(theta_[i], alpha, beta, gamma);
            ll += y_.at(i, j) ? std::log(p) : std::log1p(-p);
        }
        return ll;
    }

private:
    static double rate(std::uint64_t accepted, std::uint64_t proposed) {
        return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
    }

    static double log_normal_density(double x, double mean, double variance) {
        const double dev = x - mean;
        return -0.5 * std::log(variance) - 0.5 * dev * dev / variance;
    }

    double log_inv_gamma_density(double x) const {
        if (!(x > 0)) return -std::numeric_limits<double>::infinity();
        return -(priors_.alpha_theta + 1.0) * std::log(x) - priors_.beta_theta / x;
    }

    // Beta(s,t) prior expressed on the logit scale; the change of variables
    // turns the exponents s-1, t-1 into s, t.
    double gamma_transformed_log_prior(double v) const {
        return priors_.s * (-softplus(-v)) + priors_.t * (-softplus(v));
    }

    const PerformanceMatrix& y_;
    Model1Priors priors_;
    McmcConfig config_;
    Rng rng_;
    std::vector<double> theta_;
    std::vector<double> sigma2_;
    std::vector<double> log_alpha_;
    std::vector<double> beta_;
    std::vector<double> logit_gamma_;
    std::uint64_t proposed_theta_ = 0, accepted_theta_ = 0;
    std::uint64_t proposed_alpha_ = 0, accepted_alpha_ = 0;
    std::uint64_t proposed_beta_ = 0, accepted_beta_ = 0;
    std::uint64_t proposed_gamma_ = 0, accepted_gamma_ = 0;
};

inline FitResult fit_mh(const PerformanceMatrix& y, const Model1Priors& priors = {},
                        const McmcConfig& config = McmcConfig::mh_defaults()) {
    MhSampler sampler(y, priors, config);
    if (!std::isfinite(sampler.log_posterior())) {
        throw std::runtime_error("fit_mh: non-finite log posterior at initialization");
    }
    const std::size_t n = y.n_classifiers();
    const std::size_t m = y.n_samples();

    FitResult fit;
    fit.engine = "model1";
    Trace& trace = fit.trace;
    if (config.store_trace) {
        for (std::size_t i = 0; i < n; ++i) trace.names.push_back("theta[" + std::to_string(i) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("alpha[" + std::to_string(j) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("beta[" + std::to_string(j) + "]");
        for (std::size_t j = 0; j < m; ++j) trace.names.push_back("gamma[" + std::to_string(j) + "]");
        trace.samples.resize(trace.names.size());
    }

    std::vector<double> sum_theta(n, 0.0), sum_sigma2(n, 0.0);
    std::vector<double> sum_alpha(m, 0.0), sum_beta(m, 0.0), sum_gamma(m, 0.0);
    std::size_t n_draws = 0;
    for (int iter = 0; iter < config.n_iterations; ++iter) {
        sampler.sweep();
        if (iter < config.burn_in) continue;
        if ((iter - config.burn_in) % config.thinning != 0) continue;
        ++n_draws;
        const auto alpha = sampler.alpha();
        const auto gamma = sampler.gamma();
        for (std::size_t i = 0; i < n; ++i) {
            sum_theta[i] += sampler.theta()[i];
            sum_sigma2[i] += sampler.sigma2()[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            sum_alpha[j] += alpha[j];
            sum_beta[j] += sampler.beta()[j];
            sum_gamma[j] += gamma[j];
        }
        if (config.store_trace) {
            std::size_t p = 0;
            for (std::size_t i = 0; i < n; ++i) trace.samples[p++].push_back(sampler.theta()[i]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(alpha[j]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(sampler.beta()[j]);
            for (std::size_t j = 0; j < m; ++j) trace.samples[p++].push_back(gamma[j]);
        }
    }

    const double denom = static_cast<double>(n_draws);
    fit.theta.resize(n);
    fit.sigma2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.theta[i] = sum_theta[i] / denom;
        fit.sigma2[i] = sum_sigma2[i] / denom;
    }
    fit.alpha.resize(m);
    fit.beta.resize(m);
    fit.gamma.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        fit.alpha[j] = sum_alpha[j] / denom;
        fit.beta[j] = sum_beta[j] / denom;
        fit.gamma[j] = sum_gamma[j] / denom;
    }
    trace.acceptance["theta"] = sampler.acceptance_theta();
    trace.acceptance["alpha"] = sampler.acceptance_alpha();
    trace.acceptance["beta"] = sampler.acceptance_beta();
    trace.acceptance["gamma"] = sampler.acceptance_gamma();
    fit.diagnostics["retained_draws"] = denom;
    return fit;
}

}  // namespace irtens
