#include "bandit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandit/mathkit.hpp"

namespace bandit {

void Dataset::append(Vec feature, double reward) {
    if (feature.size() != dim_) throw std::invalid_argument("dataset: feature dimension mismatch");
    if (norm(feature) > 1.0 + 1e-9) throw std::invalid_argument("dataset: feature norm exceeds 1");
    features_.push_back(std::move(feature));
    rewards_.push_back(reward);
}

namespace {

std::size_t clamp_prefix(const Dataset& data, std::size_t prefix) {
    return prefix == kWholeDataset ? data.size() : std::min(prefix, data.size());
}

void require_binary(double x) {
    if (x != 0.0 && x != 1.0)
        throw std::invalid_argument("logistic loss: rewards must be binary");
}

} // namespace

double logistic_loss(const Vec& theta, const Dataset& data, double lambda, std::size_t prefix) {
    const std::size_t n = clamp_prefix(data, prefix);
    double loss = 0.5 * lambda * dot(theta, theta);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = data.reward(i);
        require_binary(x);
        const double z = dot(data.feature(i), theta);
        loss += x * softplus(-z) + (1.0 - x) * softplus(z);
    }
    return loss;
}

Vec logistic_grad(const Vec& theta, const Dataset& data, double lambda, std::size_t prefix) {
    const std::size_t n = clamp_prefix(data, prefix);
    Vec g = scaled(theta, lambda);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = data.reward(i);
        require_binary(x);
        const double z = dot(data.feature(i), theta);
        axpy(sigmoid(z) - x, data.feature(i), g);
    }
    return g;
}

PdMatrix logistic_hessian(const Vec& theta, const Dataset& data, double lambda,
                          std::size_t prefix) {
    const std::size_t n = clamp_prefix(data, prefix);
    PdMatrix h = PdMatrix::scaled_identity(lambda, theta.size());
    for (std::size_t i = 0; i < n; ++i) {
        require_binary(data.reward(i));
        const double z = dot(data.feature(i), theta);
        h.rank_one_update(sigmoid_slope(z), data.feature(i));
    }
    return h;
}

FitResult fit_rls(const Dataset& data, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("fit_rls: lambda must be > 0");
    const std::size_t d = data.dim();
    PdMatrix v = PdMatrix::scaled_identity(lambda, d);
    Vec b(d, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        v.rank_one_update(1.0, data.feature(i));
        axpy(data.reward(i), data.feature(i), b);
    }
    FitResult fit;
    fit.theta = v.solve(b);
    // residual of the normal equations
    Vec r = scaled(fit.theta, -lambda);
    axpy(1.0, b, r);
    for (std::size_t i = 0; i < data.size(); ++i)
        axpy(-dot(data.feature(i), fit.theta), data.feature(i), r);
    fit.grad_norm = norm(r);
    fit.iterations = 0;
    fit.converged = true;
    return fit;
}

FitResult fit_mle(const Dataset& data, double lambda, double tol, const Vec* warm_start,
                  int max_iter) {
    if (!(lambda > 0.0)) throw std::invalid_argument("fit_mle: lambda must be > 0");
    const std::size_t d = data.dim();
    FitResult fit;
    fit.theta = warm_start ? *warm_start : Vec(d, 0.0);
    double loss = logistic_loss(fit.theta, data, lambda);
    for (int it = 0; it < max_iter; ++it) {
        Vec g = logistic_grad(fit.theta, data, lambda);
        fit.grad_norm = norm(g);
        fit.iterations = it;
        if (fit.grad_norm <= tol) {
            fit.converged = true;
            return fit;
        }
        const PdMatrix h = logistic_hessian(fit.theta, data, lambda);
        const Vec dir = h.solve(g);
        const double slope = dot(g, dir);
        // slack keeps the line search moving once the decrease drops below
        // the resolution of the loss value
        const double armijo_eps = 1e-14 * (1.0 + std::abs(loss));
        double step = 1.0;
        for (int bt = 0; bt < 60; ++bt) {
            Vec cand = fit.theta;
            axpy(-step, dir, cand);
            const double cand_loss = logistic_loss(cand, data, lambda);
            if (cand_loss <= loss - 1e-4 * step * slope + armijo_eps) {
                fit.theta = std::move(cand);
                loss = cand_loss;
                break;
            }
            step *= 0.5;
        }
    }
    fit.grad_norm = norm(logistic_grad(fit.theta, data, lambda));
    fit.iterations = max_iter;
    fit.converged = fit.grad_norm <= tol;
    return fit;
}

namespace {

Vec project_to_ball(Vec v, double S) {
    const double n = norm(v);
    if (n > S) for (double& x : v) x *= S / n;
    return v;
}

} // namespace

FitResult fit_constrained_mle(const Dataset& data, double lambda, double S, double tol,
                              const Vec* warm_start, int max_iter) {
    if (!(S > 0.0)) throw std::invalid_argument("fit_constrained_mle: S must be > 0");
    FitResult inner = fit_mle(data, lambda, tol, warm_start);
    if (inner.converged && norm(inner.theta) <= S) return inner;

    // Projected gradient with Barzilai-Borwein step sizes and Armijo
    // backtracking; the ball projection is a rescale.
    FitResult fit;
    fit.theta = project_to_ball(warm_start ? *warm_start : inner.theta, S);
    double loss = logistic_loss(fit.theta, data, lambda);
    Vec g = logistic_grad(fit.theta, data, lambda);
    double step = 1.0 / (lambda + 0.25 * static_cast<double>(data.size()) + 1.0);
    Vec prev_theta, prev_g;
    for (int it = 0; it < max_iter; ++it) {
        // projected-gradient residual at the reference unit step
        Vec probe = fit.theta;
        axpy(-1.0, g, probe);
        probe = project_to_ball(std::move(probe), S);
        axpy(-1.0, fit.theta, probe);
        fit.grad_norm = norm(probe);
        fit.iterations = it;
        if (fit.grad_norm <= tol) {
            fit.converged = true;
            return fit;
        }
        if (!prev_theta.empty()) {
            Vec ds = fit.theta, dg = g;
            axpy(-1.0, prev_theta, ds);
            axpy(-1.0, prev_g, dg);
            const double num = dot(ds, ds), den = dot(ds, dg);
            if (den > 1e-300) step = std::clamp(num / den, 1e-8, 1e8);
        }
        prev_theta = fit.theta;
        prev_g = g;
        double t = step;
        for (int bt = 0; bt < 60; ++bt) {
            Vec cand = fit.theta;
            axpy(-t, g, cand);
            cand = project_to_ball(std::move(cand), S);
            Vec diff = cand;
            axpy(-1.0, fit.theta, diff);
            const double cand_loss = logistic_loss(cand, data, lambda);
            if (cand_loss <= loss + dot(g, diff) + 0.5 / t * dot(diff, diff) + 1e-12) {
                fit.theta = std::move(cand);
                loss = cand_loss;
                break;
            }
            t *= 0.5;
        }
        g = logistic_grad(fit.theta, data, lambda);
    }
    fit.iterations = max_iter;
    Vec probe = fit.theta;
    axpy(-1.0, g, probe);
    probe = project_to_ball(std::move(probe), S);
    axpy(-1.0, fit.theta, probe);
    fit.grad_norm = norm(probe);
    fit.converged = fit.grad_norm <= tol;
    return fit;
}

} // namespace bandit
