#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "bandit/estimation.hpp"
#include "bandit/mathkit.hpp"
#include "bandit/rng.hpp"

using namespace bandit;

namespace {

Dataset random_logistic_data(std::size_t d, std::size_t n, Rng& rng) {
    Dataset data(d);
    for (std::size_t i = 0; i < n; ++i) {
        Vec phi(d);
        for (double& v : phi) v = rng.normal();
        const double nn = norm(phi);
        if (nn > 1.0)
            for (double& v : phi) v /= nn;
        data.append(phi, rng.bernoulli(0.5) ? 1.0 : 0.0);
    }
    return data;
}

// term-by-term reference evaluator, independent of the softplus path
double slow_loss(const Vec& theta, const Dataset& data, double lambda) {
    double loss = 0.5 * lambda * dot(theta, theta);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const LinkEval e = sigmoid_eval(dot(data.feature(i), theta));
        const double x = data.reward(i);
        loss -= x * std::log(e.value) + (1.0 - x) * std::log(1.0 - e.value);
    }
    return loss;
}

} // namespace

TEST_CASE("logistic loss basics") {
    Dataset empty(3);
    CHECK(logistic_loss(Vec{0, 0, 0}, empty, 1.0) == 0.0);

    // one entry with z = 0 contributes log 2 on top of the ridge term
    Dataset one(2);
    one.append(unit_vector(2, 1), 1.0);
    const Vec theta{0.7, 0.0};
    CHECK(logistic_loss(theta, one, 2.0) ==
          doctest::Approx(0.5 * 2.0 * 0.49 + std::log(2.0)).epsilon(1e-14));

    Dataset bad(2);
    bad.append(unit_vector(2, 0), 0.5);
    CHECK_THROWS_AS(logistic_loss(Vec{0, 0}, bad, 1.0), std::invalid_argument);
}

TEST_CASE("logistic loss matches the slow reference evaluator") {
    Rng rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset data = random_logistic_data(4, 30, rng);
        Vec theta(4);
        for (double& v : theta) v = rng.normal();
        CHECK(logistic_loss(theta, data, 0.7) ==
              doctest::Approx(slow_loss(theta, data, 0.7)).epsilon(1e-12));
    }
}

TEST_CASE("gradient: zero at origin with no data, finite differences otherwise") {
    Dataset empty(3);
    const Vec g0 = logistic_grad(Vec{0, 0, 0}, empty, 1.0);
    CHECK(norm(g0) == 0.0);

    Rng rng(22);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 2 + rng.uniform_index(4);
        const Dataset data = random_logistic_data(d, 5 + rng.uniform_index(46), rng);
        Vec theta(d);
        for (double& v : theta) v = rng.normal();
        const double lambda = 0.3 + rng.uniform();
        const Vec g = logistic_grad(theta, data, lambda);
        for (std::size_t j = 0; j < d; ++j) {
            Vec hi = theta, lo = theta;
            hi[j] += 1e-5;
            lo[j] -= 1e-5;
            const double fd =
                (logistic_loss(hi, data, lambda) - logistic_loss(lo, data, lambda)) / 2e-5;
            CHECK(std::abs(g[j] - fd) <= 1e-5 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("hessian: ridge only on empty data, mu'(0) rank-one otherwise") {
    Dataset empty(3);
    const PdMatrix h0 = logistic_hessian(Vec{0, 0, 0}, empty, 1.5);
    CHECK(h0.entry(0, 0) == doctest::Approx(1.5));
    CHECK(h0.entry(0, 1) == 0.0);

    Dataset one(3);
    one.append(unit_vector(3, 0), 1.0);
    const PdMatrix h = logistic_hessian(Vec{0, 0, 0}, one, 1.0);
    CHECK(h.entry(0, 0) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(h.entry(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h.entry(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hessian matches finite differences of the gradient") {
    Rng rng(23);
    const Dataset data = random_logistic_data(3, 25, rng);
    Vec theta{0.2, -0.4, 0.1};
    const PdMatrix h = logistic_hessian(theta, data, 0.8);
    for (std::size_t j = 0; j < 3; ++j) {
        Vec hi = theta, lo = theta;
        hi[j] += 1e-6;
        lo[j] -= 1e-6;
        const Vec ghi = logistic_grad(hi, data, 0.8);
        const Vec glo = logistic_grad(lo, data, 0.8);
        for (std::size_t i = 0; i < 3; ++i) {
            const double fd = (ghi[i] - glo[i]) / 2e-6;
            CHECK(std::abs(h.entry(i, j) - fd) <= 1e-4 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("ridge regression closed form") {
    Dataset empty(2);
    CHECK(norm(fit_rls(empty, 1.0).theta) == 0.0);

    Dataset one(2);
    one.append(unit_vector(2, 0), 1.0);
    const FitResult a = fit_rls(one, 1.0);
    CHECK(a.theta[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.theta[1] == doctest::Approx(0.0).epsilon(1e-12));

    Dataset two(2);
    two.append(unit_vector(2, 0), 1.0);
    two.append(unit_vector(2, 0), 1.0);
    const FitResult b = fit_rls(two, 1.0);
    CHECK(b.theta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(b.theta[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rls equals a gradient-descent solve of the squared loss") {
    Rng rng(24);
    Dataset data(3);
    for (int i = 0; i < 40; ++i) {
        Vec phi(3);
        for (double& v : phi) v = rng.normal();
        const double nn = norm(phi);
        if (nn > 1.0)
            for (double& v : phi) v /= nn;
        data.append(phi, rng.normal());
    }
    const double lambda = 0.9;
    const FitResult rls = fit_rls(data, lambda);

    // oracle: minimize lambda ||t||^2 + sum (x - phi t)^2 by plain gradient descent
    Vec t(3, 0.0);
    for (int it = 0; it < 20000; ++it) {
        Vec g = scaled(t, 2.0 * lambda);
        for (std::size_t i = 0; i < data.size(); ++i)
            axpy(2.0 * (dot(data.feature(i), t) - data.reward(i)), data.feature(i), g);
        axpy(-0.01, g, t);
    }
    for (int j = 0; j < 3; ++j) CHECK(std::abs(rls.theta[j] - t[j]) <= 1e-8);
}

TEST_CASE("mle: symmetry and optimality") {
    Dataset empty(2);
    CHECK(norm(fit_mle(empty, 1.0).theta) == 0.0);

    // balanced data forces the stationary point to the origin
    Dataset balanced(2);
    balanced.append(unit_vector(2, 0), 1.0);
    balanced.append(unit_vector(2, 0), 0.0);
    const FitResult sym = fit_mle(balanced, 0.3);
    CHECK(norm(sym.theta) <= 1e-9);
    CHECK(sym.converged);

    Rng rng(25);
    const Dataset data = random_logistic_data(3, 30, rng);
    const FitResult fit = fit_mle(data, 1.0);
    CHECK(fit.converged);
    CHECK(fit.grad_norm <= 1e-8);
    const double opt = logistic_loss(fit.theta, data, 1.0);
    for (int probe = 0; probe < 100; ++probe) {
        Vec t(3);
        for (double& v : t) v = 3.0 * rng.normal();
        CHECK(logistic_loss(t, data, 1.0) >= opt - 1e-10);
    }
}

TEST_CASE("constrained mle") {
    Rng rng(26);
    const Dataset data = random_logistic_data(3, 30, rng);

    // inactive constraint reduces to the unconstrained fit
    const FitResult inner = fit_mle(data, 1.0);
    const FitResult same = fit_constrained_mle(data, 1.0, norm(inner.theta) + 1.0);
    for (int j = 0; j < 3; ++j) CHECK(same.theta[j] == doctest::Approx(inner.theta[j]));

    // all-ones data pushes along e1 to the boundary
    Dataset ones(2);
    for (int i = 0; i < 20; ++i) ones.append(unit_vector(2, 0), 1.0);
    const FitResult bounded = fit_constrained_mle(ones, 0.01, 0.5, 1e-10);
    CHECK(norm(bounded.theta) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(bounded.theta[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(bounded.theta[1]) < 1e-8);
    // 1-D line search oracle along e1
    double best = 1e300, best_r = 0.0;
    for (int i = 0; i <= 5000; ++i) {
        const double r = 0.5 * i / 5000.0;
        Vec t{r, 0.0};
        const double v = logistic_loss(t, ones, 0.01);
        if (v < best) {
            best = v;
            best_r = r;
        }
    }
    CHECK(best_r == doctest::Approx(0.5).epsilon(1e-3));

    // constrained optimum beats random feasible probes
    const FitResult c = fit_constrained_mle(data, 1.0, 0.4);
    const double opt = logistic_loss(c.theta, data, 1.0);
    for (int probe = 0; probe < 1000; ++probe) {
        Vec t(3);
        for (double& v : t) v = rng.normal();
        const double n = norm(t);
        const double r = 0.4 * std::pow(rng.uniform(), 1.0 / 3.0);
        for (double& v : t) v *= r / n;
        CHECK(logistic_loss(t, data, 1.0) >= opt - 1e-8);
    }
    CHECK(norm(c.theta) <= 0.4 + 1e-10);
}

TEST_CASE("loss convexity along random segments") {
    Rng rng(27);
    const Dataset data = random_logistic_data(4, 20, rng);
    for (int rep = 0; rep < 200; ++rep) {
        Vec a(4), b(4);
        for (double& v : a) v = 2.0 * rng.normal();
        for (double& v : b) v = 2.0 * rng.normal();
        Vec mid(4);
        for (int j = 0; j < 4; ++j) mid[j] = 0.5 * (a[j] + b[j]);
        const double lm = logistic_loss(mid, data, 0.5);
        const double avg =
            0.5 * (logistic_loss(a, data, 0.5) + logistic_loss(b, data, 0.5));
        CHECK(lm <= avg + 1e-10);
    }
}

TEST_CASE("hessian pivots stay above sqrt(lambda)") {
    Rng rng(28);
    const Dataset data = random_logistic_data(4, 25, rng);
    for (double lambda : {0.1, 1.0, 5.0}) {
        Vec t(4);
        for (double& v : t) v = rng.normal();
        const PdMatrix h = logistic_hessian(t, data, lambda);
        CHECK(h.min_pivot() >= std::sqrt(lambda) * (1.0 - 1e-8));
    }
}

TEST_CASE("unconverged fits are flagged") {
    Rng rng(29);
    const Dataset data = random_logistic_data(3, 40, rng);
    const FitResult f = fit_mle(data, 1.0, 1e-8, nullptr, 1);
    CHECK_FALSE(f.converged);
}
