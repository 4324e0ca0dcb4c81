#pragma once

#include <cstddef>
#include <vector>

#include "bandit/rng.hpp"

namespace bandit {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
Vec scaled(const Vec& a, double s);
void axpy(double alpha, const Vec& x, Vec& y); // y += alpha * x
Vec unit_vector(std::size_t d, std::size_t i); // e_i

// Symmetric positive definite matrix with an always-consistent lower
// Cholesky factor. Backs the design matrices V_t and L_t and the loss
// Hessians: one rank-one update per round, quadratic forms and sampling
// through triangular solves, never an explicit inverse.
class PdMatrix {
public:
    static PdMatrix scaled_identity(double lambda, std::size_t d);
    static PdMatrix from_dense(std::size_t d, const std::vector<double>& entries);

    std::size_t dim() const { return d_; }
    double entry(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }
    double factor_entry(std::size_t i, std::size_t j) const { return l_[i * d_ + j]; }
    double min_pivot() const;

    // M <- M + weight * x x^T, weight >= 0
    void rank_one_update(double weight, const Vec& x);

    // x^T M^{-1} x
    double quad_form_inv(const Vec& x) const;

    // M^{-1} b
    Vec solve(const Vec& b) const;

    // theta = factor^{-T} g with g ~ N(0, I); Cov(theta) = M^{-1}
    Vec sample_inverse_gaussian(Rng& rng) const;

private:
    PdMatrix(std::size_t d) : d_(d), a_(d * d, 0.0), l_(d * d, 0.0) {}
    void refactorize();
    Vec forward_solve(const Vec& b) const;  // L y = b
    Vec backward_solve(const Vec& b) const; // L^T y = b

    std::size_t d_;
    std::vector<double> a_; // row-major symmetric entries
    std::vector<double> l_; // row-major lower Cholesky factor
};

} // namespace bandit
