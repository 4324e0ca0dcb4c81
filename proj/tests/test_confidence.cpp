#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "bandit/confidence.hpp"
#include "bandit/estimation.hpp"
#include "bandit/mathkit.hpp"
#include "bandit/rng.hpp"

using namespace bandit;

TEST_CASE("lambda_T formula") {
    // inner term 0.5 * log(max(e sqrt(1.5), 2)) ~ 0.601 stays below the floor
    const RadiusParams p{2, 8.0, 4.0, 0.5};
    CHECK(lambda_T(p) == doctest::Approx(1.0));
    const double raw = (2.0 * 2.0 / 8.0) *
                       std::log(std::max(std::exp(1.0) * std::sqrt(1.5), 2.0));
    CHECK(raw == doctest::Approx(0.601).epsilon(1e-3));

    // tiny delta pushes the log term above the floor
    const RadiusParams tiny{2, 8.0, 4.0, 1e-9};
    CHECK(lambda_T(tiny) > 1.0);

    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const RadiusParams q{1 + rng.uniform_index(10), 0.5 + 10.0 * rng.uniform(),
                             1.0 + 1000.0 * rng.uniform(), 0.01 + 0.98 * rng.uniform()};
        CHECK(lambda_T(q) >= 1.0);
    }
}

TEST_CASE("rho_t against an independently factored evaluation") {
    const RadiusParams p{1, 1.0, 1.0, 0.5};
    const double lam = lambda_T(p);
    CHECK(lam == doctest::Approx(2.0 * (1.0 + 0.5 * std::log(1.25))).epsilon(1e-14));
    const double inner = std::max(std::exp(1.0) * std::sqrt(1.25), 2.0);
    const double alt = ((0.5 + 1.0) * lam + 4.0 * std::log(inner)) / std::sqrt(lam);
    CHECK(rho_t(1.0, p) == doctest::Approx(alt).epsilon(1e-13));

    // monotone in t
    CHECK(rho_t(10.0, p) >= rho_t(1.0, p));
    CHECK(rho_t(100.0, p) >= rho_t(10.0, p));

    // (1/2 + S) sqrt(lambda_T) term scales with S once the floor binds
    const RadiusParams s1{2, 20.0, 4.0, 0.5}, s2{2, 40.0, 4.0, 0.5};
    CHECK(lambda_T(s1) == 1.0);
    CHECK(lambda_T(s2) == 1.0);
    CHECK(rho_t(1.0, s2) - rho_t(1.0, s1) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("beta plug-in values") {
    CHECK(beta_value(1.0, 1.0) == doctest::Approx(2.0));
    CHECK(beta_value(2.0, 4.0) == doctest::Approx(4.0));
    Rng rng(32);
    for (int rep = 0; rep < 50; ++rep) {
        const RadiusParams p{1 + rng.uniform_index(6), 0.5 + 5.0 * rng.uniform(),
                             1.0 + 100.0 * rng.uniform(), 0.05 + 0.9 * rng.uniform()};
        const double t = 1.0 + 50.0 * rng.uniform();
        CHECK(beta_t(t, p) >= rho_t(t, p));
    }
}

TEST_CASE("tau_t formula") {
    const RadiusParams p{3, 1.0, 1.0, std::exp(-1.0)};
    CHECK(tau_t(0.0, 1.0, 1.0, p) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
    const RadiusParams one{3, 1.0, 1.0, 1.0};
    CHECK(tau_t(0.0, 4.0, 1.0, one) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(tau_t(50.0, 1.0, 1.0, p) > tau_t(5.0, 1.0, 1.0, p));
}

TEST_CASE("gamma coefficients and the doubled variant") {
    CHECK(gamma_value(0.0, 1.0, 1.0) ==
          doctest::Approx(4.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    Rng rng(33);
    for (int rep = 0; rep < 50; ++rep) {
        const RadiusParams p{1 + rng.uniform_index(6), 0.5 + 5.0 * rng.uniform(),
                             1.0 + 100.0 * rng.uniform(), 0.05 + 0.9 * rng.uniform()};
        const double t = 1.0 + 20.0 * rng.uniform();
        CHECK(gamma_t(t, p) >= 4.0 * rho_t(t, p));
        CHECK(gamma_t_thats(t, p) == doctest::Approx(2.0 * gamma_t(t, p)));
    }
}

namespace {

// three-point logistic dataset in d = 2
Dataset toy_dataset() {
    Dataset data(2);
    data.append(Vec{0.9, 0.1}, 1.0);
    data.append(Vec{-0.2, 0.8}, 0.0);
    data.append(Vec{0.5, -0.5}, 1.0);
    return data;
}

struct GridOpt {
    double value;
    double cell;
};

GridOpt grid_minimize(const ConfidenceRegion& region, const Dataset& data, double lambda,
                      const Vec& c, double S) {
    const int N = 400;
    const double cell = 2.0 * S / N;
    double best = 1e300;
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            const Vec th{-S + cell * i, -S + cell * j};
            if (!region.contains(th, 1e-9)) continue;
            best = std::min(best, dot(c, th));
        }
    }
    (void)data;
    (void)lambda;
    return GridOpt{best, cell};
}

} // namespace

TEST_CASE("membership against the stored constraints") {
    const Dataset data = toy_dataset();
    ConfidenceRegion region(&data, 1.0, 1.5);
    const FitResult fit = fit_mle(data, 1.0);
    region.add_constraint(fit.theta, 3, 0.5);

    CHECK(region.contains(fit.theta, 1e-9)); // loss difference is zero at the center
    CHECK_FALSE(region.contains(Vec{2.5, 0.0}, 1e-9)); // outside the ball

    // boundary probe along a ray, bisection oracle
    Vec dir{1.0, 0.3};
    const double dn = norm(dir);
    for (double& v : dir) v /= dn;
    double lo = 0.0, hi = 4.0;
    CHECK(region.contains(scaled(dir, lo), 1e-9));
    CHECK_FALSE(region.contains(scaled(dir, hi), 1e-9));
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (region.contains(scaled(dir, mid), 0.0) ? lo : hi) = mid;
    }
    CHECK(region.contains(scaled(dir, lo), 1e-6));
    CHECK_FALSE(region.contains(scaled(dir, hi), -1e-6));
}

TEST_CASE("minimize_linear over the plain ball") {
    Dataset data(3);
    ConfidenceRegion region(&data, 1.0, 2.0);
    const Vec c{0.3, -0.4, 1.2};
    const LinOptResult r = region.minimize_linear(c);
    CHECK(r.value == doctest::Approx(-2.0 * norm(c)).epsilon(1e-10));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(r.theta[i] == doctest::Approx(-2.0 * c[i] / norm(c)).epsilon(1e-10));

    const LinOptResult zero = region.minimize_linear(Vec{0, 0, 0});
    CHECK(zero.value == 0.0);
    CHECK(region.contains(zero.theta, 1e-12));
}

TEST_CASE("minimize_linear against a 400x400 grid oracle") {
    const Dataset data = toy_dataset();
    const double S = 1.5, lambda = 1.0;
    const FitResult fit = fit_mle(data, lambda);
    ConfidenceRegion region(&data, lambda, S);
    region.add_constraint(fit.theta, 3, 0.35); // small radius so the level set binds

    for (const Vec& c : {Vec{1.0, 0.0}, Vec{-0.6, 1.0}, Vec{0.4, 0.7}}) {
        const LinOptResult r = region.minimize_linear(c, 1e-9);
        CHECK(region.contains(r.theta, 1e-7));
        const GridOpt g = grid_minimize(region, data, lambda, c, S);
        CHECK(std::abs(r.value - g.value) <= 2.0 * g.cell * norm(c));
        CHECK(r.value <= g.value + 1e-7); // never worse than the lattice optimum
    }
}

TEST_CASE("maximize_abs_linear") {
    Dataset data(2);
    ConfidenceRegion ball(&data, 1.0, 2.0);
    const Vec c{0.6, -0.8};
    const LinOptResult r = ball.maximize_abs_linear(c);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10)); // S ||c||
    // symmetric region: tie resolves to the +c side
    CHECK(dot(c, r.theta) > 0.0);

    const Dataset toy = toy_dataset();
    const FitResult fit = fit_mle(toy, 1.0);
    ConfidenceRegion region(&toy, 1.0, 1.5);
    region.add_constraint(fit.theta, 3, 0.35);
    const Vec dir{0.8, 0.4};
    const LinOptResult m = region.maximize_abs_linear(dir, 1e-9);
    CHECK(region.contains(m.theta, 1e-7));
    // grid oracle on |c^T theta|
    const int N = 400;
    const double cell = 3.0 / N;
    double best = 0.0;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) {
            const Vec th{-1.5 + cell * i, -1.5 + cell * j};
            if (!region.contains(th, 1e-9)) continue;
            best = std::max(best, std::abs(dot(dir, th)));
        }
    CHECK(std::abs(m.value - best) <= 2.0 * cell * norm(dir));
}

TEST_CASE("minimize_abs_linear straddles zero") {
    Dataset data(2);
    ConfidenceRegion ball(&data, 1.0, 1.0);
    const LinOptResult r = ball.minimize_abs_linear(Vec{1.0, 0.0});
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(std::abs(r.theta[0]) <= 1e-9);
    CHECK(ball.contains(r.theta, 1e-9));
}

TEST_CASE("optimum lower-bounds random feasible probes") {
    const Dataset data = toy_dataset();
    const double S = 1.5;
    const FitResult fit = fit_mle(data, 1.0);
    ConfidenceRegion region(&data, 1.0, S);
    region.add_constraint(fit.theta, 2, 0.6);
    region.add_constraint(fit.theta, 3, 0.35);

    const Vec c{0.7, -0.3};
    const LinOptResult r = region.minimize_linear(c, 1e-9);
    const double opt_gap = 1e-5 * (1.0 + norm(c) * S);
    Rng rng(34);
    int tested = 0;
    while (tested < 10000) {
        Vec th{S * (2.0 * rng.uniform() - 1.0), S * (2.0 * rng.uniform() - 1.0)};
        if (!region.contains(th, 0.0)) continue;
        ++tested;
        CHECK(dot(c, th) >= r.value - opt_gap);
    }
}

TEST_CASE("nesting: appending a constraint shrinks the region") {
    const Dataset data = toy_dataset();
    const FitResult f2 = fit_mle(data, 1.0, 1e-8);
    ConfidenceRegion small(&data, 1.0, 1.5);
    ConfidenceRegion large(&data, 1.0, 1.5);
    large.add_constraint(f2.theta, 2, 0.8);
    small.add_constraint(f2.theta, 2, 0.8);
    small.add_constraint(f2.theta, 3, 0.5);

    Rng rng(35);
    int members = 0;
    for (int probe = 0; probe < 1000 || members < 50; ++probe) {
        REQUIRE(probe < 200000);
        Vec th{1.5 * (2.0 * rng.uniform() - 1.0), 1.5 * (2.0 * rng.uniform() - 1.0)};
        if (!small.contains(th, 0.0)) continue;
        ++members;
        CHECK(large.contains(th, 1e-12));
    }
}

TEST_CASE("projection returns members and fixes infeasible points") {
    const Dataset data = toy_dataset();
    const FitResult fit = fit_mle(data, 1.0);
    ConfidenceRegion region(&data, 1.0, 1.5);
    region.add_constraint(fit.theta, 3, 0.4);

    // interior point projects to itself
    const Vec inside = region.project(fit.theta);
    for (int j = 0; j < 2; ++j) CHECK(inside[j] == doctest::Approx(fit.theta[j]));

    const Vec far{5.0, -4.0};
    const Vec proj = region.project(far, 1e-9);
    CHECK(region.contains(proj, 1e-7));
    // no feasible grid point is closer
    const int N = 300;
    const double cell = 3.0 / N;
    double best = 1e300;
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) {
            const Vec th{-1.5 + cell * i, -1.5 + cell * j};
            if (!region.contains(th, 1e-9)) continue;
            Vec diff = th;
            axpy(-1.0, far, diff);
            best = std::min(best, norm(diff));
        }
    Vec diff = proj;
    axpy(-1.0, far, diff);
    CHECK(norm(diff) <= best + 2.0 * cell);
}

TEST_CASE("non-nested constraint pairs solve to grid optimality") {
    Rng rng(777);
    for (int rep = 0; rep < 20; ++rep) {
        const double S = 1.2 + rng.uniform();
        Dataset data(2);
        const int n = 3 + int(rng.uniform_index(6));
        for (int i = 0; i < n; ++i) {
            Vec phi{rng.normal(), rng.normal()};
            const double nn = norm(phi);
            for (double& v : phi) v /= std::max(1.0, nn);
            data.append(phi, rng.bernoulli(0.5) ? 1.0 : 0.0);
        }
        ConfidenceRegion region(&data, 1.0, S);
        const int m = 1 + int(rng.uniform_index(3));
        for (int c = 0; c < m; ++c) {
            Vec center{0.8 * rng.normal(), 0.8 * rng.normal()};
            region.add_constraint(center, 1 + rng.uniform_index(data.size()),
                                  0.08 + 0.5 * rng.uniform());
        }
        Vec c{rng.normal(), rng.normal()};
        if (norm(c) < 1e-6) continue;

        const int N = 400;
        const double cell = 2.0 * S / N;
        double best = 1e300;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                const Vec th{-S + cell * i, -S + cell * j};
                if (region.contains(th, 1e-9)) best = std::min(best, dot(c, th));
            }
        try {
            const LinOptResult r = region.minimize_linear(c, 1e-9);
            CHECK(region.contains(r.theta, 1e-6));
            if (best < 1e300) CHECK(r.value <= best + 2.5 * cell * norm(c));
        } catch (const std::runtime_error&) {
            // certified-infeasible is acceptable only when the lattice finds
            // nothing either
            CHECK(best == 1e300);
        }
    }
}

TEST_CASE("infeasible intersection raises") {
    // the level set hugs a far-away minimizer while the ball stays where the
    // loss is large, so their intersection is empty
    Dataset data(2);
    for (int i = 0; i < 20; ++i) data.append(Vec{1.0, 0.0}, 1.0);
    const FitResult fit = fit_mle(data, 0.01);
    REQUIRE(norm(fit.theta) > 1.0);
    ConfidenceRegion region(&data, 0.01, 0.1);
    region.add_constraint(fit.theta, 20, 1e-2);
    CHECK_FALSE(region.contains(Vec{0.1, 0.0}, 1e-9));
    CHECK_THROWS_AS(region.minimize_linear(Vec{1.0, 0.0}), std::runtime_error);
}

TEST_CASE("coverage smoke test: theta_star stays in its level set") {
    // small logistic environment, uniform actions; the radii are conservative
    Rng master(36);
    int covered = 0;
    const int runs = 10, T = 60;
    const Vec theta_star{0.6, -0.4, 0.5};
    const RadiusParams p{3, 1.5, static_cast<double>(T), 0.1};
    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(99, run));
        Dataset data(3);
        bool ok = true;
        Vec warm(3, 0.0);
        for (int t = 1; t <= T; ++t) {
            Vec phi(3);
            for (double& v : phi) v = rng.normal();
            const double n = norm(phi);
            for (double& v : phi) v /= std::max(1.0, n);
            data.append(phi, rng.bernoulli(sigmoid(dot(phi, theta_star))) ? 1.0 : 0.0);
            const FitResult fit = fit_mle(data, 1.0, 1e-8, &warm);
            warm = fit.theta;
            const double diff = logistic_loss(theta_star, data, 1.0) -
                                logistic_loss(fit.theta, data, 1.0);
            const double b = beta_t(t + 1.0, p);
            if (diff > b * b) ok = false;
        }
        if (ok) ++covered;
    }
    (void)master;
    CHECK(covered >= 8);
}
