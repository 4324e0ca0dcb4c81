#include "bandit/policies.hpp"

#include <cmath>
#include <stdexcept>

#include "bandit/mathkit.hpp"

namespace bandit {

const char* algo_name(Algo a) {
    switch (a) {
        case Algo::MULin: return "mulin";
        case Algo::SimpleLinTS: return "simplelints";
        case Algo::SimpleLinTSMLE: return "simplelints_mle";
        case Algo::MULog: return "mulog";
        case Algo::THaTS: return "thats";
        case Algo::Uniform: return "uniform";
        case Algo::CumuLinTS: return "cumulints";
    }
    return "?";
}

std::optional<Algo> algo_from_name(const std::string& name) {
    for (Algo a : {Algo::MULin, Algo::SimpleLinTS, Algo::SimpleLinTSMLE, Algo::MULog,
                   Algo::THaTS, Algo::Uniform, Algo::CumuLinTS})
        if (name == algo_name(a)) return a;
    return std::nullopt;
}

namespace {

std::size_t argmax_lowest(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

void require_arms(const std::vector<Vec>& arms) {
    if (arms.empty()) throw std::invalid_argument("step: empty action set");
}

} // namespace

std::size_t PolicySnapshot::act(const std::vector<Vec>& arms) const {
    require_arms(arms);
    std::vector<double> scores(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) scores[i] = dot(arms[i], theta_out);
    return argmax_lowest(scores);
}

double uncertainty(const Vec& phi, const Vec& theta, const PdMatrix& L) {
    return sigmoid_slope(dot(phi, theta)) * std::sqrt(L.quad_form_inv(phi));
}

std::size_t mulin_select(const PdMatrix& V, const std::vector<Vec>& arms) {
    require_arms(arms);
    std::vector<double> scores(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) scores[i] = V.quad_form_inv(arms[i]);
    return argmax_lowest(scores);
}

std::size_t lints_select(const Vec& theta_tilde, const std::vector<Vec>& arms) {
    require_arms(arms);
    std::vector<double> scores(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) scores[i] = std::abs(dot(arms[i], theta_tilde));
    return argmax_lowest(scores);
}

std::size_t greedy_select(const Vec& theta, const std::vector<Vec>& arms) {
    require_arms(arms);
    std::vector<double> scores(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i) scores[i] = dot(arms[i], theta);
    return argmax_lowest(scores);
}

std::size_t thats_select(const Vec& theta_bar, const Vec& theta_tilde,
                         const std::vector<Vec>& arms) {
    require_arms(arms);
    std::vector<double> scores(arms.size());
    for (std::size_t i = 0; i < arms.size(); ++i)
        scores[i] = sigmoid_slope(dot(arms[i], theta_bar)) * std::abs(dot(arms[i], theta_tilde));
    return argmax_lowest(scores);
}

AlgState::AlgState(Algo variant, std::size_t dim, AlgParams params)
    : variant_(variant),
      p_(params),
      data_(dim),
      design_(PdMatrix::scaled_identity(params.lambda, dim)),
      v_diag_(PdMatrix::scaled_identity(params.lambda, dim)),
      region_(&data_, params.lambda, params.s_bound),
      current_e_(&data_, params.lambda, params.s_bound),
      b_(dim, 0.0),
      center_(dim, 0.0) {
    if (variant_ == Algo::THaTS) {
        const double r = constraint_radius(1);
        region_.add_constraint(center_, 0, r);
        current_e_.add_constraint(center_, 0, r);
    }
}

double AlgState::constraint_radius(std::size_t round_index) const {
    const RadiusParams rp{data_.dim(), p_.s_bound, static_cast<double>(p_.horizon), p_.delta};
    const double b = beta_t(static_cast<double>(round_index), rp);
    const double sq = b * b;
    return variant_ == Algo::THaTS ? 2.0 * sq : sq;
}

std::size_t AlgState::step(const std::vector<Vec>& arms, Rng& rng) {
    require_arms(arms);
    switch (variant_) {
        case Algo::MULin:
            return mulin_select(design_, arms);
        case Algo::SimpleLinTS:
        case Algo::SimpleLinTSMLE:
            return lints_select(design_.sample_inverse_gaussian(rng), arms);
        case Algo::Uniform:
            return rng.uniform_index(arms.size());
        case Algo::CumuLinTS: {
            Vec tilde = design_.sample_inverse_gaussian(rng);
            axpy(1.0, design_.solve(b_), tilde); // mean shift by the RLS estimate
            return greedy_select(tilde, arms);
        }
        case Algo::MULog: {
            std::vector<double> scores(arms.size());
            std::vector<Vec> inner(arms.size());
            for (std::size_t i = 0; i < arms.size(); ++i) {
                LinOptResult r = region_.minimize_abs_linear(arms[i]);
                scores[i] = sigmoid_slope(r.value) * std::sqrt(design_.quad_form_inv(arms[i]));
                inner[i] = std::move(r.theta);
            }
            const std::size_t a = argmax_lowest(scores);
            mulog_theta_ = inner[a];
            return a;
        }
        case Algo::THaTS: {
            last_sample_ = design_.sample_inverse_gaussian(rng);
            return thats_select(center_, last_sample_, arms);
        }
    }
    throw std::logic_error("step: unknown variant");
}

void AlgState::record_reward(const Vec& phi, double reward) {
    epl_terms_.push_back(v_diag_.quad_form_inv(phi));
    v_diag_.rank_one_update(1.0, phi);
    data_.append(phi, reward);
    ++round_;

    switch (variant_) {
        case Algo::MULin:
        case Algo::SimpleLinTS:
        case Algo::SimpleLinTSMLE:
        case Algo::Uniform:
            design_.rank_one_update(1.0, phi);
            break;
        case Algo::CumuLinTS:
            design_.rank_one_update(1.0, phi);
            axpy(reward, phi, b_);
            break;
        case Algo::MULog: {
            const LinOptResult far = region_.maximize_abs_linear(phi);
            const double w = sigmoid_slope(far.value);
            weights_.push_back(w);
            design_.rank_one_update(w, phi);
            refresh_logistic_state();
            break;
        }
        case Algo::THaTS: {
            double w;
            if (p_.fast_thats) {
                // shortcut: weight from the ball projection of the sampled
                // direction instead of the level-set minimizer
                Vec proj = last_sample_;
                const double n = norm(proj);
                if (n > p_.s_bound)
                    for (double& x : proj) x *= p_.s_bound / n;
                w = sigmoid_slope(dot(phi, proj));
            } else {
                const LinOptResult far = current_e_.maximize_abs_linear(phi);
                w = sigmoid_slope(far.value);
            }
            weights_.push_back(w);
            design_.rank_one_update(w, phi);
            refresh_logistic_state();
            break;
        }
    }
}

void AlgState::refresh_logistic_state() {
    const std::size_t next_round = round_ + 1;
    if (variant_ == Algo::MULog) {
        const FitResult fit = fit_mle(data_, p_.lambda, 1e-8, &center_);
        center_ = fit.theta;
        region_.add_constraint(center_, data_.size(), constraint_radius(next_round));
        return;
    }
    // THaTS
    const FitResult fit = p_.fast_thats
                              ? fit_mle(data_, p_.lambda, 1e-8, &center_)
                              : fit_constrained_mle(data_, p_.lambda, p_.s_bound, 1e-8, &center_);
    center_ = fit.theta;
    const double r = constraint_radius(next_round);
    region_.add_constraint(center_, data_.size(), r);
    current_e_ = ConfidenceRegion(&data_, p_.lambda, p_.s_bound);
    current_e_.add_constraint(center_, data_.size(), r);
}

PolicySnapshot AlgState::finalize() const {
    switch (variant_) {
        case Algo::MULin:
        case Algo::SimpleLinTS:
        case Algo::Uniform:
        case Algo::CumuLinTS:
            return PolicySnapshot{fit_rls(data_, p_.lambda).theta};
        case Algo::SimpleLinTSMLE:
            return PolicySnapshot{fit_mle(data_, p_.lambda).theta};
        case Algo::MULog:
            return PolicySnapshot{region_.project(center_)};
        case Algo::THaTS: {
            // intersection of the level sets recorded during rounds 1..T;
            // the set built after the last reward is the projection center's
            // own and stays out
            ConfidenceRegion v(&data_, p_.lambda, p_.s_bound);
            const auto& cs = region_.constraints();
            for (std::size_t i = 0; i + 1 < cs.size(); ++i) v.add_constraint_copy(cs[i]);
            return PolicySnapshot{v.project(center_)};
        }
    }
    throw std::logic_error("finalize: unknown variant");
}

} // namespace bandit
