#include "bandit/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bandit/mathkit.hpp"

namespace bandit {

namespace {
constexpr std::size_t kNoConstraint = static_cast<std::size_t>(-1);
}

double lambda_T(const RadiusParams& p) {
    if (!(p.delta > 0.0 && p.delta <= 1.0)) throw std::invalid_argument("radius: delta out of range");
    if (!(p.T >= 1.0)) throw std::invalid_argument("radius: T must be >= 1");
    const double d = static_cast<double>(p.d);
    const double inner = std::max(std::exp(1.0) * std::sqrt(1.0 + p.T / (4.0 * d)), 1.0 / p.delta);
    return std::max(1.0, (2.0 * d / p.S) * std::log(inner));
}

double rho_t(double t, const RadiusParams& p) {
    const double d = static_cast<double>(p.d);
    const double lam = lambda_T(p);
    const double inner = std::max(std::exp(1.0) * std::sqrt(1.0 + t / (4.0 * d)), 1.0 / p.delta);
    return (0.5 + p.S) * std::sqrt(lam) + (4.0 * d / std::sqrt(lam)) * std::log(inner);
}

double beta_value(double rho, double lam_T) { return rho + rho * rho / std::sqrt(lam_T); }

double beta_t(double t, const RadiusParams& p) { return beta_value(rho_t(t, p), lambda_T(p)); }

double tau_t(double t, double lambda, double theta_norm, const RadiusParams& p) {
    if (!(lambda > 0.0)) throw std::invalid_argument("tau_t: lambda must be > 0");
    const double d = static_cast<double>(p.d);
    return std::sqrt(lambda) * theta_norm +
           std::sqrt(2.0 * std::log(1.0 / p.delta) + d * std::log(1.0 + t / (d * lambda)));
}

double gamma_value(double S, double rho, double beta) {
    return (4.0 + 4.0 * S) * rho + std::sqrt(8.0 * S + 8.0) * beta;
}

double gamma_t(double t, const RadiusParams& p) {
    return gamma_value(p.S, rho_t(t, p), beta_t(t, p));
}

double gamma_t_thats(double t, const RadiusParams& p) { return 2.0 * gamma_t(t, p); }

void ConfidenceRegion::add_constraint(Vec center, std::size_t prefix_len, double radius) {
    if (radius < 0.0) throw std::invalid_argument("region: negative constraint radius");
    const double cv = logistic_loss(center, *data_, lambda_, prefix_len);
    constraints_.push_back(LossLevelConstraint{prefix_len, std::move(center), cv, radius});
}

double ConfidenceRegion::constraint_slack(std::size_t i, const Vec& theta) const {
    const LossLevelConstraint& c = constraints_[i];
    return logistic_loss(theta, *data_, lambda_, c.prefix_len) - c.center_value - c.radius;
}

// slack of every constraint in one pass over the data; the prefix losses
// share their partial sums
std::vector<double> ConfidenceRegion::all_slacks(const Vec& theta) const {
    const std::size_t m = constraints_.size();
    std::vector<double> slacks(m, 0.0);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return constraints_[a].prefix_len < constraints_[b].prefix_len;
    });
    const double ridge = 0.5 * lambda_ * dot(theta, theta);
    double ce = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const LossLevelConstraint& c = constraints_[order[i]];
        const std::size_t stop = std::min(c.prefix_len, data_->size());
        while (pos < stop) {
            const double x = data_->reward(pos);
            const double z = dot(data_->feature(pos), theta);
            ce += x * softplus(-z) + (1.0 - x) * softplus(z);
            ++pos;
        }
        slacks[order[i]] = ridge + ce - c.center_value - c.radius;
    }
    return slacks;
}

bool ConfidenceRegion::contains(const Vec& theta, double tol) const {
    if (norm(theta) > s_ + tol) return false;
    for (double s : all_slacks(theta))
        if (s > tol) return false;
    return true;
}

// F(theta) = c^T theta (linear) or 0.5 ||theta - y||^2 (quadratic)
struct ConfidenceRegion::Objective {
    const Vec* c = nullptr;
    const Vec* y = nullptr;

    double eval(const Vec& th) const {
        if (c) return dot(*c, th);
        double s = 0.0;
        for (std::size_t i = 0; i < th.size(); ++i) {
            const double diff = th[i] - (*y)[i];
            s += 0.5 * diff * diff;
        }
        return s;
    }
    void add_grad(const Vec& th, Vec& g) const {
        if (c) {
            axpy(1.0, *c, g);
        } else {
            axpy(1.0, th, g);
            axpy(-1.0, *y, g);
        }
    }
    double hess_diag() const { return c ? 0.0 : 1.0; }
};

// min F + sum_k nu_k L_{idx_k} + (omega/2)||theta||^2, unconstrained Newton.
// The whole objective is rescaled by 1/(1+sum nu+omega) so Armijo
// comparisons stay well conditioned for large multipliers.
Vec ConfidenceRegion::newton_min(const Objective& obj, const std::vector<Term>& terms,
                                 double omega, Vec init) const {
    const std::size_t d = init.size();
    double nu_total = 0.0;
    for (const Term& t : terms) nu_total += t.nu;
    const double sc = 1.0 / (1.0 + nu_total + omega);
    auto value = [&](const Vec& th) {
        double v = obj.eval(th) + 0.5 * omega * dot(th, th);
        for (const Term& t : terms)
            if (t.nu > 0.0)
                v += t.nu * logistic_loss(th, *data_, lambda_, constraints_[t.idx].prefix_len);
        return sc * v;
    };
    Vec th = std::move(init);
    double fv = value(th);
    for (int it = 0; it < 80; ++it) {
        Vec g(d, 0.0);
        obj.add_grad(th, g);
        axpy(omega, th, g);
        for (const Term& t : terms)
            if (t.nu > 0.0)
                axpy(t.nu, logistic_grad(th, *data_, lambda_, constraints_[t.idx].prefix_len), g);
        for (double& x : g) x *= sc;
        const double gnorm = norm(g);
        if (gnorm <= 1e-12 * (1.0 + std::abs(fv))) break;

        std::vector<double> dense(d * d, 0.0);
        const double diag = sc * (obj.hess_diag() + omega + nu_total * lambda_);
        for (std::size_t i = 0; i < d; ++i) dense[i * d + i] = diag;
        for (const Term& t : terms) {
            if (t.nu <= 0.0) continue;
            const std::size_t prefix =
                std::min(constraints_[t.idx].prefix_len, data_->size());
            for (std::size_t k = 0; k < prefix; ++k) {
                const Vec& phi = data_->feature(k);
                const double w = sc * t.nu * sigmoid_slope(dot(phi, th));
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) dense[i * d + j] += w * phi[i] * phi[j];
            }
        }
        const PdMatrix hm = PdMatrix::from_dense(d, dense);
        const Vec dir = hm.solve(g);
        const double slope = dot(g, dir);
        const double armijo_eps = 1e-14 * (1.0 + std::abs(fv));
        double step = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vec cand = th;
            axpy(-step, dir, cand);
            const double cv = value(cand);
            if (cv <= fv - 1e-4 * step * slope + armijo_eps) {
                th = std::move(cand);
                fv = cv;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return th;
}

// min F + sum nu_k L_k subject to ||theta|| <= S; the boundary case bisects
// an extra multiplier omega on ||theta||^2.
Vec ConfidenceRegion::solve_over_ball(const Objective& obj, const std::vector<Term>& terms,
                                      Vec init) const {
    double nu_total = 0.0;
    for (const Term& t : terms) nu_total += t.nu;
    if (nu_total == 0.0 && obj.c) {
        // linear over the ball, closed form
        const double cn = norm(*obj.c);
        if (cn == 0.0) return Vec(obj.c->size(), 0.0);
        return scaled(*obj.c, -s_ / cn);
    }
    if (nu_total == 0.0 && obj.y) {
        Vec th = *obj.y;
        const double n = norm(th);
        if (n > s_) for (double& x : th) x *= s_ / n;
        return th;
    }
    Vec th = newton_min(obj, terms, 0.0, std::move(init));
    if (norm(th) <= s_) return th;

    double lo = 0.0, hi = 1.0;
    Vec th_hi = newton_min(obj, terms, hi, th);
    int guard = 0;
    while (norm(th_hi) > s_ && guard++ < 80) {
        lo = hi;
        hi *= 4.0;
        th_hi = newton_min(obj, terms, hi, std::move(th_hi));
    }
    Vec cur = th_hi;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        cur = newton_min(obj, terms, mid, std::move(cur));
        const double n = norm(cur);
        if (std::abs(n - s_) <= 1e-12 * s_) break;
        (n > s_ ? lo : hi) = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    const double n = norm(cur);
    if (n > s_) for (double& x : cur) x *= s_ / n;
    return cur;
}

// min F over (ball intersect constraint idx) by bisection on the
// constraint multiplier; idx == kNoConstraint handles the ball alone.
Vec ConfidenceRegion::solve_one_constraint(const Objective& obj, std::size_t idx) const {
    Vec th0 = solve_over_ball(obj, {}, Vec(data_->dim(), 0.0));
    if (idx == kNoConstraint) return th0;
    const double feas_eps = 1e-11 * (1.0 + std::abs(constraints_[idx].center_value) +
                                     constraints_[idx].radius);
    if (constraint_slack(idx, th0) <= feas_eps) return th0;

    double lo = 0.0, hi = 1.0;
    Vec th = solve_over_ball(obj, {{idx, hi}}, th0);
    Vec feasible;
    int guard = 0;
    while (constraint_slack(idx, th) > feas_eps && guard++ < 60) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e15) throw std::runtime_error("region: constraint infeasible within the ball");
        th = solve_over_ball(obj, {{idx, hi}}, std::move(th));
    }
    feasible = th;
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        th = solve_over_ball(obj, {{idx, mid}}, std::move(th));
        const double slack = constraint_slack(idx, th);
        if (slack <= feas_eps) {
            feasible = th;
            hi = mid;
            if (slack >= -feas_eps) break;
        } else {
            lo = mid;
        }
        if (hi - lo <= 1e-13 * hi) break;
    }
    return feasible;
}

// min F over (ball intersect constraints a and b) with both level sets
// active: on the multiplier ray nu = t (mu, 1-mu), the inner bisection over
// t zeroes the mu-weighted slack, the outer bisection over mu balances the
// two individual slacks.
Vec ConfidenceRegion::solve_pair(const Objective& obj, std::size_t a, std::size_t b,
                                 Vec fallback) const {
    const double eps_a = 1e-11 * (1.0 + std::abs(constraints_[a].center_value) +
                                  constraints_[a].radius);
    const double eps_b = 1e-11 * (1.0 + std::abs(constraints_[b].center_value) +
                                  constraints_[b].radius);
    auto solve_at = [&](double mu, Vec init) {
        double lo = 0.0, hi = 1.0;
        auto combined = [&](const Vec& th) {
            return mu * constraint_slack(a, th) + (1.0 - mu) * constraint_slack(b, th);
        };
        Vec th = solve_over_ball(obj, {{a, hi * mu}, {b, hi * (1.0 - mu)}}, std::move(init));
        int guard = 0;
        while (combined(th) > 0.5 * (eps_a + eps_b) && guard++ < 60) {
            lo = hi;
            hi *= 4.0;
            if (hi > 1e15) return th;
            th = solve_over_ball(obj, {{a, hi * mu}, {b, hi * (1.0 - mu)}}, std::move(th));
        }
        for (int it = 0; it < 70; ++it) {
            const double mid = 0.5 * (lo + hi);
            th = solve_over_ball(obj, {{a, mid * mu}, {b, mid * (1.0 - mu)}}, std::move(th));
            (combined(th) > 0.0 ? lo : hi) = mid;
            if (hi - lo <= 1e-12 * hi) break;
        }
        return th;
    };

    double mu_lo = 0.0, mu_hi = 1.0;
    Vec th = fallback;
    for (int it = 0; it < 60; ++it) {
        const double mu = 0.5 * (mu_lo + mu_hi);
        th = solve_at(mu, std::move(th));
        const double sa = constraint_slack(a, th);
        const double sb = constraint_slack(b, th);
        if (sa <= eps_a && sb <= eps_b) return th;
        // the violated side needs more weight
        if (sa > eps_a) mu_lo = mu;
        else mu_hi = mu;
        if (mu_hi - mu_lo <= 1e-10) break;
    }
    return fallback;
}

Vec ConfidenceRegion::repair(Vec theta, double tol) const {
    for (int sweep = 0; sweep < 50; ++sweep) {
        bool clean = true;
        const double n = norm(theta);
        if (n > s_) {
            for (double& x : theta) x *= s_ / n;
            clean = false;
        }
        const std::vector<double> slacks = all_slacks(theta);
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            if (slacks[i] > 0.25 * tol) {
                const Vec snapshot = theta;
                Objective proj;
                proj.y = &snapshot;
                theta = solve_one_constraint(proj, i);
                clean = false;
            }
        }
        if (clean) return theta;
    }
    if (!contains(theta, tol))
        throw std::runtime_error("region: feasibility not certified within sweep cap");
    return theta;
}

Vec ConfidenceRegion::optimize(const Objective& obj, double tol) const {
    if (constraints_.empty()) return solve_over_ball(obj, {}, Vec(data_->dim(), 0.0));
    // The optimum of a relaxation that keeps only one (or two) level sets
    // is certified optimal as soon as it satisfies all the others. The
    // most recent constraint starts as the active one; on violation the
    // violated set either replaces it or joins it as a pair.
    std::size_t active = constraints_.size() - 1;
    std::vector<bool> tried(constraints_.size(), false);
    for (int pass = 0; pass < 6; ++pass) {
        tried[active] = true;
        Vec theta = solve_one_constraint(obj, active);
        const std::vector<double> slacks = all_slacks(theta);
        std::size_t worst_idx = active;
        double worst = -1e300;
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            if (i == active) continue;
            if (slacks[i] > worst) {
                worst = slacks[i];
                worst_idx = i;
            }
        }
        if (worst_idx == active || worst <= 0.25 * tol) return theta;
        Vec paired = solve_pair(obj, active, worst_idx, theta);
        if (contains(paired, 0.25 * tol)) return paired;
        if (tried[worst_idx]) break;
        active = worst_idx;
    }
    // more than two sets bind at the optimum: fall back to the repair
    // sweeps and accept the certified feasible point
    Vec theta = repair(solve_one_constraint(obj, active), tol);
    if (!contains(theta, tol))
        throw std::runtime_error("region: feasibility not certified");
    return theta;
}

LinOptResult ConfidenceRegion::minimize_linear(const Vec& c, double tol) const {
    if (c.size() != data_->dim()) throw std::invalid_argument("region: dimension mismatch");
    if (norm(c) == 0.0) {
        Vec th = any_feasible(tol);
        return {std::move(th), 0.0};
    }
    Objective obj;
    obj.c = &c;
    Vec th = optimize(obj, tol);
    const double v = dot(c, th);
    return {std::move(th), v};
}

LinOptResult ConfidenceRegion::maximize_abs_linear(const Vec& c, double tol) const {
    const Vec neg = scaled(c, -1.0);
    LinOptResult plus = minimize_linear(neg, tol); // maximizes c^T theta
    LinOptResult minus = minimize_linear(c, tol);
    const double vplus = dot(c, plus.theta);
    const double vminus = dot(c, minus.theta);
    if (std::abs(vplus) >= std::abs(vminus)) return {std::move(plus.theta), std::abs(vplus)};
    return {std::move(minus.theta), std::abs(vminus)};
}

LinOptResult ConfidenceRegion::minimize_abs_linear(const Vec& c, double tol) const {
    LinOptResult lowest = minimize_linear(c, tol);
    if (lowest.value > 0.0) return {std::move(lowest.theta), lowest.value};
    const Vec neg = scaled(c, -1.0);
    LinOptResult highest = minimize_linear(neg, tol); // maximizes c^T theta
    const double hi = dot(c, highest.theta);
    if (hi < 0.0) return {std::move(highest.theta), -hi};
    // optima straddle zero: interpolate to an exact-zero member
    const double lo = lowest.value;
    if (hi - lo <= 0.0) return {std::move(lowest.theta), std::abs(lo)};
    const double t = -lo / (hi - lo);
    Vec th = lowest.theta;
    for (std::size_t i = 0; i < th.size(); ++i)
        th[i] += t * (highest.theta[i] - th[i]);
    return {std::move(th), 0.0};
}

Vec ConfidenceRegion::project(const Vec& y, double tol) const {
    if (y.size() != data_->dim()) throw std::invalid_argument("region: dimension mismatch");
    if (contains(y, 1e-12)) return y;
    Objective obj;
    obj.y = &y;
    return optimize(obj, tol);
}

Vec ConfidenceRegion::any_feasible(double tol) const {
    if (constraints_.empty()) return Vec(data_->dim(), 0.0);
    Vec start = constraints_.back().center;
    const double n = norm(start);
    if (n > s_) for (double& x : start) x *= s_ / n;
    return repair(std::move(start), tol);
}

} // namespace bandit
