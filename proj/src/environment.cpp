#include "bandit/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "bandit/mathkit.hpp"

namespace bandit {

ContextualEnv ContextualEnv::finite(Vec theta_star, RewardModel model, double noise_std,
                                    std::vector<ContextArms> contexts, double s_bound) {
    ContextualEnv env;
    env.theta_star_ = std::move(theta_star);
    env.model_ = model;
    env.noise_std_ = noise_std;
    env.contexts_ = std::move(contexts);
    env.s_bound_ = s_bound;
    env.audit();
    return env;
}

ContextualEnv ContextualEnv::generative(Vec theta_star, RewardModel model, double noise_std,
                                        ArmSampler sampler, double s_bound) {
    ContextualEnv env;
    env.theta_star_ = std::move(theta_star);
    env.model_ = model;
    env.noise_std_ = noise_std;
    env.sampler_ = std::move(sampler);
    env.s_bound_ = s_bound;
    env.audit();
    return env;
}

std::pair<long, std::vector<Vec>> ContextualEnv::sample_round(Rng& rng, long round) const {
    if (is_finite()) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < contexts_.size(); ++i) {
            acc += contexts_[i].prob;
            if (u < acc) return {static_cast<long>(i), contexts_[i].arms};
        }
        return {static_cast<long>(contexts_.size() - 1), contexts_.back().arms};
    }
    return {round, sampler_(rng)};
}

double ContextualEnv::mean_reward(const Vec& feature) const {
    const double z = dot(feature, theta_star_);
    return model_ == RewardModel::Linear ? z : sigmoid(z);
}

double ContextualEnv::sample_reward(const Vec& feature, Rng& rng) const {
    if (model_ == RewardModel::Linear)
        return dot(feature, theta_star_) + noise_std_ * rng.normal();
    return rng.bernoulli(sigmoid(dot(feature, theta_star_))) ? 1.0 : 0.0;
}

void ContextualEnv::audit() const {
    if (theta_star_.empty()) throw std::invalid_argument("env: empty parameter");
    if (norm(theta_star_) > s_bound_ + 1e-12)
        throw std::invalid_argument("env: ||theta*|| exceeds declared S");
    if (is_finite()) {
        double total = 0.0;
        for (const auto& ctx : contexts_) {
            if (ctx.arms.empty()) throw std::invalid_argument("env: context with no actions");
            total += ctx.prob;
            for (const auto& arm : ctx.arms) {
                if (arm.size() != theta_star_.size())
                    throw std::invalid_argument("env: arm dimension mismatch");
                if (norm(arm) > 1.0 + 1e-12)
                    throw std::invalid_argument("env: arm norm exceeds 1");
            }
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("env: context probabilities do not sum to 1");
    } else if (!sampler_) {
        throw std::invalid_argument("env: generative mode needs a sampler");
    }
}

Vec sample_orthogonal_unit(std::size_t d, Rng& rng) {
    // Gaussian draw, project out e_1, normalize; resample on the
    // measure-zero degenerate draw.
    for (;;) {
        Vec v(d);
        for (double& x : v) x = rng.normal();
        v[0] = 0.0;
        const double n = norm(v);
        if (n > 1e-12) {
            for (double& x : v) x /= n;
            return v;
        }
    }
}

ContextualEnv build_linear_orthogonal_env(std::size_t d, std::size_t K, double scale) {
    if (d < 2) throw std::invalid_argument("orthogonal env: need d >= 2");
    if (K < 2) throw std::invalid_argument("orthogonal env: need K >= 2");
    Vec theta = unit_vector(d, 0);
    for (double& x : theta) x *= scale;
    const double sigma = std::abs(scale);
    auto sampler = [d, K](Rng& rng) {
        std::vector<Vec> arms;
        arms.reserve(K);
        arms.push_back(unit_vector(d, 0));
        for (std::size_t k = 1; k < K; ++k) arms.push_back(sample_orthogonal_unit(d, rng));
        return arms;
    };
    return ContextualEnv::generative(std::move(theta), RewardModel::Linear, sigma,
                                     std::move(sampler), std::abs(scale) + 1.0);
}

ContextualEnv build_logistic_noisy_env(std::size_t d, double M) {
    if (d < 2) throw std::invalid_argument("logistic noisy env: need d >= 2");
    Vec theta(d, M);
    theta[d - 1] = 1.0;
    std::vector<Vec> arms;
    arms.reserve(d + 1);
    for (std::size_t i = 0; i + 1 < d; ++i) {
        Vec a(d, 0.0);
        a[i] = -1.0;
        arms.push_back(std::move(a));
    }
    Vec plus(d, 0.0), minus(d, 0.0);
    plus[d - 1] = 0.3;
    minus[d - 1] = -0.3;
    arms.push_back(std::move(plus));
    arms.push_back(std::move(minus));
    std::vector<ContextArms> contexts{{1.0, std::move(arms)}};
    const double s = norm(theta) + 1.0;
    return ContextualEnv::finite(std::move(theta), RewardModel::Logistic, 0.0,
                                 std::move(contexts), s);
}

} // namespace bandit
