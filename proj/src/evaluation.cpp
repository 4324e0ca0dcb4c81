#include "bandit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandit/mathkit.hpp"

namespace bandit {

namespace {

double best_mean(const ContextualEnv& env, const std::vector<Vec>& arms) {
    double best = env.mean_reward(arms[0]);
    for (std::size_t i = 1; i < arms.size(); ++i)
        best = std::max(best, env.mean_reward(arms[i]));
    return best;
}

} // namespace

RegretEstimate simple_regret(const PolicySnapshot& policy, const ContextualEnv& env,
                             EvalMode mode, Rng& rng, std::size_t n_mc) {
    if (policy.theta_out.size() != env.dim())
        throw std::invalid_argument("simple_regret: dimension mismatch");
    RegretEstimate est;
    if (mode == EvalMode::Exact) {
        if (!env.is_finite())
            throw std::invalid_argument("simple_regret: exact mode needs a finite env");
        double regret = 0.0;
        for (const auto& ctx : env.contexts()) {
            const std::size_t a = policy.act(ctx.arms);
            regret += ctx.prob * (best_mean(env, ctx.arms) - env.mean_reward(ctx.arms[a]));
        }
        est.value = regret;
        est.exact = true;
        return est;
    }
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const auto [handle, arms] = env.sample_round(rng, static_cast<long>(i));
        (void)handle;
        const std::size_t a = policy.act(arms);
        const double gap = best_mean(env, arms) - env.mean_reward(arms[a]);
        sum += gap;
        sum_sq += gap * gap;
    }
    const double n = static_cast<double>(n_mc);
    est.value = sum / n;
    est.exact = false;
    est.n_samples = n_mc;
    const double var = std::max(0.0, sum_sq / n - est.value * est.value);
    est.stderr_ = std::sqrt(var / n);
    return est;
}

namespace {

double d_generic(const Vec& theta_hat, const ContextualEnv& env, bool link_level) {
    if (!env.is_finite()) throw std::invalid_argument("prediction error: finite env required");
    if (theta_hat.size() != env.dim())
        throw std::invalid_argument("prediction error: dimension mismatch");
    double total = 0.0;
    for (const auto& ctx : env.contexts()) {
        double worst = 0.0;
        for (const auto& arm : ctx.arms) {
            const double zs = dot(arm, env.theta_star());
            const double zh = dot(arm, theta_hat);
            const double err = link_level ? std::abs(sigmoid(zs) - sigmoid(zh))
                                          : std::abs(zs - zh);
            worst = std::max(worst, err);
        }
        total += ctx.prob * worst;
    }
    return total;
}

} // namespace

double d_lin(const Vec& theta_hat, const ContextualEnv& env) {
    return d_generic(theta_hat, env, false);
}

double d_log(const Vec& theta_hat, const ContextualEnv& env) {
    return d_generic(theta_hat, env, true);
}

double epl_bound(std::size_t n, std::size_t d, double lambda, double A) {
    if (!(lambda > 0.0) || !(A > 0.0) || d < 1)
        throw std::invalid_argument("epl_bound: positive inputs required");
    const double dd = static_cast<double>(d);
    const double nn = static_cast<double>(n);
    return 2.0 * dd * std::max(1.0, A * A / lambda) * std::log(1.0 + nn * A * A / (dd * lambda));
}

double reverse_bernstein_bound(double sum_x, double T, double delta) {
    if (!(T >= 2.0)) throw std::invalid_argument("reverse_bernstein_bound: T must be >= 2");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("reverse_bernstein_bound: delta in (0,1) required");
    if (sum_x < 0.0) throw std::invalid_argument("reverse_bernstein_bound: sum must be >= 0");
    const double root = 4.0 * std::sqrt(std::log(2.0 * std::log(T) / delta)) + std::sqrt(sum_x);
    return root * root;
}

SphereCheck sphere_projection_check(std::size_t d, std::size_t n_samples, Rng& rng) {
    if (d < 1) throw std::invalid_argument("sphere check: d >= 1 required");
    double s_abs = 0.0, s_abs2 = 0.0, s_sq = 0.0, s_sq2 = 0.0;
    Vec z(d);
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (double& x : z) x = rng.normal();
        const double n = norm(z);
        const double proj = z[0] / n;
        const double a = std::abs(proj);
        const double q = proj * proj;
        s_abs += a;
        s_abs2 += a * a;
        s_sq += q;
        s_sq2 += q * q;
    }
    const double n = static_cast<double>(n_samples);
    SphereCheck out;
    out.mean_abs = s_abs / n;
    out.mean_sq = s_sq / n;
    out.stderr_abs = std::sqrt(std::max(0.0, s_abs2 / n - out.mean_abs * out.mean_abs) / n);
    out.stderr_sq = std::sqrt(std::max(0.0, s_sq2 / n - out.mean_sq * out.mean_sq) / n);
    return out;
}

} // namespace bandit
