#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bandit/confidence.hpp"
#include "bandit/estimation.hpp"
#include "bandit/linalg.hpp"
#include "bandit/rng.hpp"

namespace bandit {

enum class Algo {
    MULin,
    SimpleLinTS,
    SimpleLinTSMLE, // SimpleLinTS exploration, logistic MLE output
    MULog,
    THaTS,
    Uniform,
    CumuLinTS,
};

const char* algo_name(Algo a);
std::optional<Algo> algo_from_name(const std::string& name);

struct AlgParams {
    double lambda = 1.0;
    double s_bound = 1.0;
    double delta = 0.1;
    std::size_t horizon = 1;
    bool fast_thats = false;
};

// Greedy output policy; ties break to the lowest action index.
struct PolicySnapshot {
    Vec theta_out;
    std::size_t act(const std::vector<Vec>& arms) const;
};

// mu'(phi^T theta) * ||phi||_{L^{-1}}
double uncertainty(const Vec& phi, const Vec& theta, const PdMatrix& L);

// Selection rules, exposed for direct testing with injected samples.
std::size_t mulin_select(const PdMatrix& V, const std::vector<Vec>& arms);
std::size_t lints_select(const Vec& theta_tilde, const std::vector<Vec>& arms);
std::size_t greedy_select(const Vec& theta, const std::vector<Vec>& arms);
std::size_t thats_select(const Vec& theta_bar, const Vec& theta_tilde,
                         const std::vector<Vec>& arms);

// Per-run algorithm state: one instance per simulation run, stepped with
// step() / record_reward() and closed with finalize().
class AlgState {
public:
    AlgState(Algo variant, std::size_t dim, AlgParams params);
    AlgState(const AlgState&) = delete;
    AlgState& operator=(const AlgState&) = delete;

    Algo variant() const { return variant_; }
    std::size_t round() const { return round_; }
    const Dataset& data() const { return data_; }
    const PdMatrix& design() const { return design_; }
    const ConfidenceRegion& region() const { return region_; }
    const Vec& current_center() const { return center_; }
    const Vec& mulog_theta() const { return mulog_theta_; }
    const std::vector<double>& elliptical_terms() const { return epl_terms_; }
    const std::vector<double>& l_update_weights() const { return weights_; }

    std::size_t step(const std::vector<Vec>& arms, Rng& rng);
    void record_reward(const Vec& phi, double reward);
    PolicySnapshot finalize() const;

private:
    double constraint_radius(std::size_t round_index) const;
    void refresh_logistic_state();

    Algo variant_;
    AlgParams p_;
    Dataset data_;
    PdMatrix design_; // V_t for linear variants, L_t for logistic ones
    PdMatrix v_diag_; // unit-weight design backing the elliptical diagnostic
    ConfidenceRegion region_;    // MULog: W_t; THaTS: accumulated intersection
    ConfidenceRegion current_e_; // THaTS: this round's single level set
    Vec b_;                      // running sum of x * phi for CumuLinTS
    Vec center_;                 // theta_hat_t (MLE) or theta_bar_t (constrained)
    Vec last_sample_;            // theta_tilde of the current round (THaTS)
    Vec mulog_theta_;            // theta of the joint argmax in the last MULog step
    std::size_t round_ = 0;
    std::vector<double> epl_terms_;
    std::vector<double> weights_;
};

} // namespace bandit
