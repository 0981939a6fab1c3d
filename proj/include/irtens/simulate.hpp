#pragma once

// Synthetic response-matrix generator for the parameter-recovery studies:
// binary outcomes drawn from the guessing-augmented latent model under a
// probit or logit link.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "irtens/performance.hpp"
#include "irtens/rng.hpp"
#include "irtens/special.hpp"

namespace irtens {

enum class Link { Probit, Logit };

inline double link_cdf(Link link, double x) {
    return link == Link::Probit ? normal_cdf(x) : sigmoid(x);
}

// Success probability gamma + (1-gamma) * F(alpha*theta - beta).
inline double response_probability(Link link, double theta, double alpha, double beta,
                                   double gamma) {
    return gamma + (1.0 - gamma) * link_cdf(link, alpha * theta - beta);
}

struct SimulatedResponses {
    PerformanceMatrix matrix;
    std::vector<double> true_theta;
    std::vector<double> true_alpha;
    std::vector<double> true_beta;
    std::vector<double> true_gamma;
};

inline SimulatedResponses simulate_responses(const std::vector<double>& theta,
                                             const std::vector<double>& alpha,
                                             const std::vector<double>& beta,
                                             const std::vector<double>& gamma, Link link,
                                             std::uint64_t seed) {
    const std::size_t n = theta.size();
    const std::size_t m = beta.size();
    if (alpha.size() != m || gamma.size() != m) {
        throw std::invalid_argument("simulate_responses: item parameter lengths differ");
    }
    for (double a : alpha) {
        if (!(a > 0.0)) throw std::invalid_argument("simulate_responses: alpha must be positive");
    }
    for (double g : gamma) {
        if (!(g >= 0.0 && g < 1.0)) {
            throw std::invalid_argument("simulate_responses: gamma must lie in [0,1)");
        }
    }
    SimulatedResponses out;
    out.true_theta = theta;
    out.true_alpha = alpha;
    out.true_beta = beta;
    out.true_gamma = gamma;
    out.matrix = PerformanceMatrix(n, m);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = response_probability(link, theta[i], alpha[j], beta[j], gamma[j]);
            out.matrix.at(i, j) = rng.bernoulli(p) ? 1 : 0;
        }
    }
    return out;
}

}  // namespace irtens
