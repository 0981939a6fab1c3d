#pragma once

// Types shared by the three inference engines: chain/EM configuration,
// retained traces, and the combined fit result consumed by the ensemble
// and reporting layers.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace irtens {

struct McmcConfig {
    int n_iterations = 5000;
    int burn_in = 2000;
    int thinning = 1;
    // Random-walk proposal scales per parameter block (Metropolis-Hastings
    // engine only; the Gibbs engine draws every block exactly).
    double step_theta = 0.2;
    double step_alpha = 0.2;
    double step_beta = 0.2;
    double step_gamma = 0.2;
    std::uint64_t seed = 1;
    bool store_trace = true;

    static McmcConfig mh_defaults() { return {}; }
    static McmcConfig gibbs_defaults() {
        McmcConfig c;
        c.n_iterations = 3000;
        c.burn_in = 1000;
        return c;
    }

    void check() const {
        if (n_iterations <= 0) throw std::invalid_argument("mcmc: n_iterations must be positive");
        if (burn_in < 0 || burn_in >= n_iterations) {
            throw std::invalid_argument("mcmc: burn_in must lie in [0, n_iterations)");
        }
        if (thinning < 1) throw std::invalid_argument("mcmc: thinning must be >= 1");
        if (!(step_theta > 0 && step_alpha > 0 && step_beta > 0 && step_gamma > 0)) {
            throw std::invalid_argument("mcmc: proposal step sizes must be positive");
        }
    }
};

// Post burn-in samples, one array per tracked parameter, plus acceptance
// rates per proposal block.
struct Trace {
    std::vector<std::string> names;
    std::vector<std::vector<double>> samples;  // samples[p][draw]
    std::map<std::string, double> acceptance;

    std::size_t n_draws() const { return samples.empty() ? 0 : samples[0].size(); }
};

struct EmIteration {
    int iteration = 0;
    double loglik = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

struct FitResult {
    std::string engine;  // model1 | model2 | model3
    std::vector<double> theta;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> sigma2;  // model1 per-classifier prior variances
    Trace trace;
    std::vector<EmIteration> history;
    std::map<std::string, double> diagnostics;
    std::vector<std::size_t> separated_rows;  // model3: all-constant rows
    std::vector<std::size_t> separated_cols;  // model3: all-constant columns
};

}  // namespace irtens
