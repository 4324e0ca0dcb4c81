#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "bandit/linalg.hpp"

namespace bandit {

// Ordered trajectory of (feature, reward) observations. Prefix views feed
// the per-round losses behind the confidence constraints.
class Dataset {
public:
    explicit Dataset(std::size_t dim) : dim_(dim) {}

    void append(Vec feature, double reward);
    std::size_t size() const { return features_.size(); }
    std::size_t dim() const { return dim_; }
    const Vec& feature(std::size_t i) const { return features_[i]; }
    double reward(std::size_t i) const { return rewards_[i]; }

private:
    std::size_t dim_;
    std::vector<Vec> features_;
    std::vector<double> rewards_;
};

struct FitResult {
    Vec theta;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline constexpr std::size_t kWholeDataset = std::numeric_limits<std::size_t>::max();

// Regularized logistic loss over the first `prefix` entries,
//   (lambda/2) ||theta||^2 + sum_i [ x_i softplus(-z_i) + (1-x_i) softplus(z_i) ],
// whose gradient is lambda theta + sum (mu(z_i) - x_i) phi_i and whose
// Hessian is lambda I + sum mu'(z_i) phi_i phi_i^T.
double logistic_loss(const Vec& theta, const Dataset& data, double lambda,
                     std::size_t prefix = kWholeDataset);
Vec logistic_grad(const Vec& theta, const Dataset& data, double lambda,
                  std::size_t prefix = kWholeDataset);
PdMatrix logistic_hessian(const Vec& theta, const Dataset& data, double lambda,
                          std::size_t prefix = kWholeDataset);

// Ridge regression, theta = (lambda I + sum phi phi^T)^{-1} sum x phi.
FitResult fit_rls(const Dataset& data, double lambda);

// Newton with backtracking on the logistic loss.
FitResult fit_mle(const Dataset& data, double lambda, double tol = 1e-8,
                  const Vec* warm_start = nullptr, int max_iter = 100);

// MLE over the ball of radius S: the unconstrained fit when it is inside,
// otherwise projected gradient descent with backtracking.
FitResult fit_constrained_mle(const Dataset& data, double lambda, double S,
                              double tol = 1e-8, const Vec* warm_start = nullptr,
                              int max_iter = 400);

} // namespace bandit
