#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bandit/linalg.hpp"
#include "bandit/rng.hpp"

namespace bandit {

enum class RewardModel { Linear, Logistic };

// One context of a finite-support environment: its probability and the
// feature vectors of the actions available under it.
struct ContextArms {
    double prob;
    std::vector<Vec> arms;
};

struct RoundObservation {
    long context_handle; // context index, or the round counter in generative mode
    std::vector<Vec> features;
    std::size_t chosen;
    double reward;
};

// Contextual bandit environment. Immutable after construction; all
// randomness flows through the Rng passed to sample_round / sample_reward,
// so clones with independent seeds replicate in parallel.
class ContextualEnv {
public:
    using ArmSampler = std::function<std::vector<Vec>(Rng&)>;

    static ContextualEnv finite(Vec theta_star, RewardModel model, double noise_std,
                                std::vector<ContextArms> contexts, double s_bound);
    static ContextualEnv generative(Vec theta_star, RewardModel model, double noise_std,
                                    ArmSampler sampler, double s_bound);

    std::size_t dim() const { return theta_star_.size(); }
    const Vec& theta_star() const { return theta_star_; }
    RewardModel reward_model() const { return model_; }
    double noise_std() const { return noise_std_; }
    double s_bound() const { return s_bound_; }
    bool is_finite() const { return !contexts_.empty(); }
    const std::vector<ContextArms>& contexts() const { return contexts_; }

    // context handle + per-action features for one round
    std::pair<long, std::vector<Vec>> sample_round(Rng& rng, long round = 0) const;

    double mean_reward(const Vec& feature) const;
    double sample_reward(const Vec& feature, Rng& rng) const;

    // norm bounds, probability sums, nonempty action sets; throws on violation
    void audit() const;

private:
    ContextualEnv() = default;

    Vec theta_star_;
    RewardModel model_ = RewardModel::Linear;
    double noise_std_ = 0.0;
    double s_bound_ = 0.0;
    std::vector<ContextArms> contexts_;
    ArmSampler sampler_;
};

// App-style environments. The orthogonal-arm environment always shows the
// optimal arm e_1 plus K-1 fresh uniform directions orthogonal to it;
// rewards are Gaussian with std ||theta*||. The logistic environment has a
// single context with arms {-e_i}_{i<d} followed by +0.3 e_d and -0.3 e_d.
ContextualEnv build_linear_orthogonal_env(std::size_t d, std::size_t K, double scale);
ContextualEnv build_logistic_noisy_env(std::size_t d, double M);

// uniform direction on the unit sphere orthogonal to e_1
Vec sample_orthogonal_unit(std::size_t d, Rng& rng);

} // namespace bandit
