#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"
#include "gelfand/weight.hpp"

using namespace gelfand;

namespace {

ShootingParams base_params(double s, double lambda = 1.0, double sigma = 0.0) {
    ShootingParams p;
    p.lambda = lambda;
    p.sigma = sigma;
    p.weight = Weight::constant(1.0);
    p.order = make_order(s);
    return p;
}

} // namespace

TEST_CASE("validate_params rejects bad shooting data") {
    ShootingParams p = base_params(0.75);
    p.lambda = 0.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    p.lambda = -2.0;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    p = base_params(0.75);
    p.sigma = -0.1;
    CHECK_THROWS_AS(validate_params(p), InvalidParam);
    CHECK_NOTHROW(validate_params(base_params(0.75)));
}

// s = 1 endpoint: -u'' = e^u with u(0) = 0 has v = sech(x / sqrt 2) and
// mass 2 sqrt 2 (classical closed form).
TEST_CASE("classical endpoint solve matches the sech profile") {
    const auto p = base_params(1.0);
    const HalfGrid g = make_grid(30.0, 512);
    const Solution sol = picard_solve(p, g, {});
    CHECK(sol.residual <= 1e-11);
    CHECK(std::fabs(sol.v.samples[0] - 1.0) <= 1e-10);
    CHECK(sol.mass == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-5));
    double sup = 0.0;
    for (int i = 0; i <= g.n; ++i) {
        const double ref = 1.0 / std::cosh(g.x(i) / std::sqrt(2.0));
        sup = std::max(sup,
                       std::fabs(sol.v.samples[static_cast<std::size_t>(i)] - ref));
    }
    CHECK(sup <= 1e-5);
    // u = 2 log v here (K = 1), and w = u for lambda = 1.
    CHECK(sol.u.samples[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.tail_ratio <= 1e-8);  // sech(30/sqrt 2) ~ 1.2e-9
}

TEST_CASE("solver is deterministic") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 256);
    const Solution a = picard_solve(p, g, {});
    const Solution b = picard_solve(p, g, {});
    REQUIRE(a.v.samples.size() == b.v.samples.size());
    for (std::size_t i = 0; i < a.v.samples.size(); ++i) {
        CHECK(a.v.samples[i] == b.v.samples[i]);  // bitwise
    }
}

TEST_CASE("zero start is rejected at sigma = 0") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 128);
    EvenProfile zero{g, std::vector<double>(129, 0.0)};
    CHECK_THROWS_AS(picard_solve(p, g, {}, zero), InvalidParam);
}

TEST_CASE("iteration cap raises SolveError with history") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 128);
    SolveOptions o;
    o.max_iter = 2;
    o.newton = false;
    o.anderson_depth = 0;
    try {
        picard_solve(p, g, o);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(!e.residual_history.empty());
    }
}

TEST_CASE("tail policy enlarges the box or gives up explicitly") {
    const auto fat = base_params(0.6);  // fat tail: L = 8 is far too small
    const HalfGrid g = make_grid(8.0, 64);
    SolveOptions o;
    o.adapt_tail = true;
    o.tail_tol = 1e-30;  // unreachable on purpose
    o.max_enlarge = 1;
    CHECK_THROWS_AS(picard_solve(fat, g, o), GridPolicyError);

    // s = 0.9 tail ratios: 2.4e-2 at L = 8, 3.2e-4 at L = 18, 1.0e-5 at
    // L = 27, so a 1e-4 target needs three enlargement rounds.
    const auto p = base_params(0.9);
    o.tail_tol = 1e-4;
    o.max_enlarge = 5;
    const Solution sol = picard_solve(p, g, o);
    CHECK(sol.enlargements >= 2);
    CHECK(sol.grid.L > 8.0);
    CHECK(sol.tail_ok);
}

TEST_CASE("recover_u inverts the substitution") {
    const HalfGrid g = make_grid(2.0, 32);
    const Weight k = Weight::polynomial(1.0);
    std::vector<double> v(33);
    for (int i = 0; i <= 32; ++i) v[static_cast<std::size_t>(i)] = 2.0 - g.x(i) / 2.0;
    const EvenProfile u = recover_u({g, v}, k);
    for (int i = 0; i <= 32; ++i) {
        const std::size_t q = static_cast<std::size_t>(i);
        CHECK(u.samples[q] ==
              doctest::Approx(2.0 * std::log(v[q]) - std::log(k.value(g.x(i))))
                  .epsilon(1e-14));
    }
    std::vector<double> bad = v;
    bad[5] = 0.0;
    CHECK_THROWS_AS(recover_u({g, bad}, k), InvalidParam);
}

TEST_CASE("exact scaling covariance of rescale_solution") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 256);
    const Solution sol = picard_solve(p, g, {});
    const double mu = 2.0;
    const Solution r = rescale_solution(sol, mu);
    CHECK(r.params.lambda ==
          doctest::Approx(std::pow(mu, 0.75)).epsilon(1e-15));
    CHECK(r.grid.L == doctest::Approx(g.L / mu).epsilon(1e-15));
    CHECK(r.grid.n == g.n);
    // Nodal samples map exactly: v_mu(x_i / mu) = mu^s v(x_i).
    const double ms = std::pow(mu, 0.75);
    for (std::size_t i = 0; i < r.v.samples.size(); ++i) {
        CHECK(r.v.samples[i] ==
              doctest::Approx(ms * sol.v.samples[i]).epsilon(1e-14));
    }
    // Mass covariance mu^{2s-1} holds to rounding (the trapezoid + bubble
    // sums scale exactly).
    CHECK(r.mass / sol.mass ==
          doctest::Approx(std::pow(mu, 2.0 * 0.75 - 1.0)).epsilon(1e-13));
    // Non-constant weights have no exact scaling family.
    Solution bad = sol;
    bad.params.weight = Weight::polynomial(1.0);
    CHECK_THROWS_AS(rescale_solution(bad, mu), InvalidParam);
}

TEST_CASE("frechet_apply matches central finite differences") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(20.0, 128);
    const KernelMoments mom(g, p.order);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> v(129), h(129);
        for (int i = 0; i <= 128; ++i) {
            const double x = g.x(i);
            v[static_cast<std::size_t>(i)] =
                std::exp(-0.5 * x * x) * (1.0 + 0.3 * U(rng));
            h[static_cast<std::size_t>(i)] = std::exp(-0.4 * x * x) * U(rng);
        }
        const EvenProfile vp{g, v}, hp{g, h};
        const EvenProfile dT = frechet_apply(vp, hp, p, mom);
        const double eps = 1e-5;
        std::vector<double> vp1(129), vm1(129);
        for (std::size_t i = 0; i < 129; ++i) {
            vp1[i] = v[i] + eps * h[i];
            vm1[i] = v[i] - eps * h[i];
        }
        const EvenProfile Tp = apply_T({g, vp1}, p, mom);
        const EvenProfile Tm = apply_T({g, vm1}, p, mom);
        double sup = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < 129; ++i) {
            const double fd = (Tp.samples[i] - Tm.samples[i]) / (2.0 * eps);
            sup = std::max(sup, std::fabs(fd - dT.samples[i]));
            scale = std::max(scale, std::fabs(dT.samples[i]));
        }
        CHECK(sup / scale <= 1e-7);
    }
}

TEST_CASE("solution serialization carries the pinned header") {
    const auto p = base_params(0.9);
    const HalfGrid g = make_grid(30.0, 128);
    const Solution sol = picard_solve(p, g, {});
    CHECK(solution_csv(sol).rfind("x,v,u,w\n", 0) == 0);
    const std::string js = solution_diagnostics_json(sol);
    CHECK(js.find("\"mass\"") != std::string::npos);
    CHECK(js.find("\"residual\"") != std::string::npos);
}

TEST_CASE("gaussian-regularized solves converge too") {
    auto p = base_params(0.75, 0.5, 1.0);
    const HalfGrid g = make_grid(40.0, 256);
    const Solution sol = picard_solve(p, g, {});
    CHECK(sol.residual <= 1e-11);
    CHECK(sol.v.samples[0] ==
          doctest::Approx(0.5).epsilon(1e-9));  // v(0) = lambda sqrt K(0)
    CHECK(sol.mass > 0.0);
}
