#include "bandit/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace bandit {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec scaled(const Vec& a, double s) {
    Vec r(a);
    for (double& x : r) x *= s;
    return r;
}

void axpy(double alpha, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vec unit_vector(std::size_t d, std::size_t i) {
    Vec e(d, 0.0);
    e.at(i) = 1.0;
    return e;
}

PdMatrix PdMatrix::scaled_identity(double lambda, std::size_t d) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaled_identity: lambda must be > 0");
    if (d < 1) throw std::invalid_argument("scaled_identity: dimension must be >= 1");
    PdMatrix m(d);
    const double r = std::sqrt(lambda);
    for (std::size_t i = 0; i < d; ++i) {
        m.a_[i * d + i] = lambda;
        m.l_[i * d + i] = r;
    }
    return m;
}

PdMatrix PdMatrix::from_dense(std::size_t d, const std::vector<double>& entries) {
    if (entries.size() != d * d) throw std::invalid_argument("from_dense: bad entry count");
    PdMatrix m(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            const double sym = 0.5 * (entries[i * d + j] + entries[j * d + i]);
            m.a_[i * d + j] = sym;
        }
    m.refactorize();
    return m;
}

void PdMatrix::refactorize() {
    const std::size_t d = d_;
    std::fill(l_.begin(), l_.end(), 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = a_[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= l_[j * d + k] * l_[j * d + k];
        if (!(diag > 0.0)) throw std::runtime_error("PdMatrix: not positive definite");
        const double pivot = std::sqrt(diag);
        l_[j * d + j] = pivot;
        for (std::size_t i = j + 1; i < d; ++i) {
            double s = a_[i * d + j];
            for (std::size_t k = 0; k < j; ++k) s -= l_[i * d + k] * l_[j * d + k];
            l_[i * d + j] = s / pivot;
        }
    }
}

double PdMatrix::min_pivot() const {
    double p = l_[0];
    for (std::size_t i = 1; i < d_; ++i) p = std::min(p, l_[i * d_ + i]);
    return p;
}

void PdMatrix::rank_one_update(double weight, const Vec& x) {
    if (x.size() != d_) throw std::invalid_argument("rank_one_update: dimension mismatch");
    if (weight < 0.0) throw std::invalid_argument("rank_one_update: weight must be >= 0");
    if (weight == 0.0) return;

    const std::size_t d = d_;
    const double sw = std::sqrt(weight);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a_[i * d + j] += weight * x[i] * x[j];

    // Givens-style positive rank-one Cholesky update (LINPACK dchud).
    Vec work = scaled(x, sw);
    for (std::size_t k = 0; k < d; ++k) {
        const double lkk = l_[k * d + k];
        const double r = std::hypot(lkk, work[k]);
        const double c = r / lkk;
        const double s = work[k] / lkk;
        l_[k * d + k] = r;
        for (std::size_t i = k + 1; i < d; ++i) {
            l_[i * d + k] = (l_[i * d + k] + s * work[i]) / c;
            work[i] = c * work[i] - s * l_[i * d + k];
        }
    }

    // Spot-check L L^T x against A x; a full refactorization bounds drift
    // over long update sequences.
    double err = 0.0, scale = 0.0;
    Vec ltx(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = i; k < d; ++k) s += l_[k * d + i] * x[k];
        ltx[i] = s;
    }
    for (std::size_t i = 0; i < d; ++i) {
        double llt = 0.0;
        for (std::size_t k = 0; k <= i; ++k) llt += l_[i * d + k] * ltx[k];
        double ax = 0.0;
        for (std::size_t j = 0; j < d; ++j) ax += a_[i * d + j] * x[j];
        err = std::max(err, std::abs(llt - ax));
        scale = std::max(scale, std::abs(ax));
    }
    if (err > 1e-8 * (1.0 + scale)) refactorize();
}

Vec PdMatrix::forward_solve(const Vec& b) const {
    const std::size_t d = d_;
    Vec y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_[i * d + k] * y[k];
        y[i] = s / l_[i * d + i];
    }
    return y;
}

Vec PdMatrix::backward_solve(const Vec& b) const {
    const std::size_t d = d_;
    Vec y(d, 0.0);
    for (std::size_t ii = d; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < d; ++k) s -= l_[k * d + ii] * y[k];
        y[ii] = s / l_[ii * d + ii];
    }
    return y;
}

double PdMatrix::quad_form_inv(const Vec& x) const {
    if (x.size() != d_) throw std::invalid_argument("quad_form_inv: dimension mismatch");
    const Vec y = forward_solve(x);
    return dot(y, y);
}

Vec PdMatrix::solve(const Vec& b) const {
    if (b.size() != d_) throw std::invalid_argument("solve: dimension mismatch");
    return backward_solve(forward_solve(b));
}

Vec PdMatrix::sample_inverse_gaussian(Rng& rng) const {
    Vec g(d_);
    for (double& v : g) v = rng.normal();
    return backward_solve(g);
}

} // namespace bandit
