#pragma once

#include <cstddef>
#include <vector>

#include "bandit/estimation.hpp"
#include "bandit/linalg.hpp"

namespace bandit {

struct RadiusParams {
    std::size_t d;
    double S;
    double T;
    double delta;
};

// Confidence radii. lambda_T, rho_t and beta_t follow the logistic
// confidence-set constants; tau_t is the linear self-normalized width;
// gamma_t bounds the H_t(theta*) distance of any member of the level set,
// with a doubled variant for the ball-centered sets used by the sampler.
double lambda_T(const RadiusParams& p);
double rho_t(double t, const RadiusParams& p);
double beta_value(double rho, double lam_T); // rho + rho^2 / sqrt(lam_T)
double beta_t(double t, const RadiusParams& p);
double tau_t(double t, double lambda, double theta_norm, const RadiusParams& p);
double gamma_value(double S, double rho, double beta); // (4+4S) rho + sqrt(8S+8) beta
double gamma_t(double t, const RadiusParams& p);
double gamma_t_thats(double t, const RadiusParams& p); // 2 * gamma_t

// One loss level set {theta : L_prefix(theta) - L_prefix(center) <= radius},
// with the prefix loss recomputed on demand from the shared dataset.
struct LossLevelConstraint {
    std::size_t prefix_len;
    Vec center;
    double center_value;
    double radius;
};

struct LinOptResult {
    Vec theta;
    double value;
};

// Intersection of loss level sets with the S-ball. Supports membership,
// linear optimization and Euclidean projection. Optimization solves
// against one active constraint by bisection on its Lagrange multiplier
// (Newton inner solves, the ball handled exactly inside each solve) and
// restores feasibility against the remaining constraints by alternating
// projection sweeps with an explicit certificate at the end.
class ConfidenceRegion {
public:
    ConfidenceRegion(const Dataset* data, double lambda, double s_bound)
        : data_(data), lambda_(lambda), s_(s_bound) {}

    void add_constraint(Vec center, std::size_t prefix_len, double radius);
    void add_constraint_copy(const LossLevelConstraint& c) { constraints_.push_back(c); }
    const std::vector<LossLevelConstraint>& constraints() const { return constraints_; }
    double s_bound() const { return s_; }

    // loss difference minus radius; feasible iff <= 0
    double constraint_slack(std::size_t i, const Vec& theta) const;
    std::vector<double> all_slacks(const Vec& theta) const;
    bool contains(const Vec& theta, double tol) const;

    LinOptResult minimize_linear(const Vec& c, double tol = 1e-7) const;
    // larger of |c^T theta| over the two signed problems; ties prefer +c
    LinOptResult maximize_abs_linear(const Vec& c, double tol = 1e-7) const;
    // smallest |c^T theta|; zero as soon as the signed optima straddle 0
    LinOptResult minimize_abs_linear(const Vec& c, double tol = 1e-7) const;
    Vec project(const Vec& y, double tol = 1e-7) const;
    Vec any_feasible(double tol = 1e-7) const;

private:
    struct Objective; // linear or quadratic, defined in the implementation
    struct Term {     // one multiplier on one constraint's loss
        std::size_t idx;
        double nu;
    };

    Vec newton_min(const Objective& obj, const std::vector<Term>& terms, double omega,
                   Vec init) const;
    Vec solve_over_ball(const Objective& obj, const std::vector<Term>& terms, Vec init) const;
    Vec solve_one_constraint(const Objective& obj, std::size_t idx) const;
    // optimum with both constraints active, via bisection over the
    // multiplier ray between them
    Vec solve_pair(const Objective& obj, std::size_t a, std::size_t b, Vec fallback) const;
    Vec repair(Vec theta, double tol) const;
    Vec optimize(const Objective& obj, double tol) const;

    const Dataset* data_;
    double lambda_;
    double s_;
    std::vector<LossLevelConstraint> constraints_;
};

} // namespace bandit
