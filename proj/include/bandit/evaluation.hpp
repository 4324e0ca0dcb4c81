#pragma once

#include <cstddef>

#include "bandit/environment.hpp"
#include "bandit/policies.hpp"
#include "bandit/rng.hpp"

namespace bandit {

enum class EvalMode { Exact, MonteCarlo };

struct RegretEstimate {
    double value = 0.0;
    bool exact = true;
    std::size_t n_samples = 0;
    double stderr_ = 0.0; // only meaningful in Monte Carlo mode
};

// Expected value gap between the optimal policy and the greedy policy of
// the snapshot. Exact mode iterates the finite context list; Monte Carlo
// averages over sampled rounds and reports the standard error.
RegretEstimate simple_regret(const PolicySnapshot& policy, const ContextualEnv& env,
                             EvalMode mode, Rng& rng, std::size_t n_mc = 10000);

// Expected maximum prediction error, linear and link-level variants.
double d_lin(const Vec& theta_hat, const ContextualEnv& env);
double d_log(const Vec& theta_hat, const ContextualEnv& env);

// 2 d max{1, A^2/lambda} log(1 + n A^2 / (d lambda))
double epl_bound(std::size_t n, std::size_t d, double lambda, double A);

// (4 sqrt(log(2 log T / delta)) + sqrt(sum_x))^2, valid for T >= 2
double reverse_bernstein_bound(double sum_x, double T, double delta);

struct SphereCheck {
    double mean_abs;
    double mean_sq;
    double stderr_abs;
    double stderr_sq;
};

// Monte Carlo estimates of E|<Z, e1>| and E<Z, e1>^2 for Z uniform on the
// unit sphere (normalized Gaussian draws).
SphereCheck sphere_projection_check(std::size_t d, std::size_t n_samples, Rng& rng);

} // namespace bandit
