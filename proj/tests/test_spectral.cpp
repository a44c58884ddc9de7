#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"
#include "gelfand/spectral.hpp"
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

// Direct singular-integral evaluation of the Toeplitz coefficient, frozen
// from a high-precision quadrature of
//   gamma(k) = C_s int_0^inf z^{-1-2s} [2 Phi(k) - Phi(k-z) - Phi(k+z)] dz
// with Phi the piecewise-cubic hat autocorrelation.  Independent of the
// closed-form fourth-difference route used by the library.
struct GammaOracle {
    double s;
    double vals[5];
};
constexpr GammaOracle kGammaOracle[] = {
    {0.60,
     {0.99948578275554259, -0.28554865873359926, -0.1160568909636204,
      -0.034548603986345776, -0.017093568929990276}},
    {0.75,
     {1.2463732120272484, -0.46939225500798843, -0.098912715822339537,
      -0.023163080698055638, -0.010317360479410035}},
    {0.90,
     {1.6248130287631297, -0.738448695776741, -0.054224249864467908,
      -0.0095869165973572278, -0.0038346842568260303}},
};

} // namespace

TEST_CASE("gagliardo coefficients match the singular-integral oracle") {
    for (const auto& row : kGammaOracle) {
        const FractionalOrder ord = make_order(row.s);
        for (int k = 0; k < 5; ++k) {
            const double got = gagliardo_gamma(k, ord);
            CHECK(std::fabs(got - row.vals[k]) <=
                  1e-10 * std::fabs(row.vals[k]));
        }
    }
}

TEST_CASE("classical endpoint degenerates to second differences") {
    const FractionalOrder ord = make_order(1.0);
    CHECK(gagliardo_gamma(0, ord) == 2.0);
    CHECK(gagliardo_gamma(1, ord) == -1.0);
    CHECK(gagliardo_gamma(2, ord) == 0.0);
    CHECK(gagliardo_gamma(7, ord) == 0.0);
}

TEST_CASE("dirichlet form is positive semidefinite with vanishing interior row sums") {
    const HalfGrid g = make_grid(16.0, 128);
    const GagliardoForm form = build_gagliardo(g, make_order(0.75));
    REQUIRE(form.size == 257);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> f(static_cast<std::size_t>(form.size));
        for (double& v : f) v = U(rng);
        double q = 0.0;
        for (int i = 0; i < form.size; ++i)
            for (int j = 0; j < form.size; ++j)
                q += f[static_cast<std::size_t>(i)] * form.stiffness(i, j) *
                     f[static_cast<std::size_t>(j)];
        CHECK(q >= -1e-10 * static_cast<double>(form.size));
    }
    // Constants are local minimizers of the form: interior row sums vanish
    // up to the truncated tail, while edge rows keep O(1) mass.
    auto row_sum = [&](int i) {
        double r = 0.0;
        for (int j = 0; j < form.size; ++j) r += form.stiffness(i, j);
        return r;
    };
    const double mid = std::fabs(row_sum(form.size / 2));
    const double edge = std::fabs(row_sum(0));
    CHECK(mid <= 0.01 * form.gamma[0]);
    CHECK(edge >= 0.1 * form.gamma[0]);
    CHECK(mid < 0.05 * edge);
}

TEST_CASE("classical morse data: simple index with eigenvalue -1/2") {
    const auto p = base_params(1.0);
    const HalfGrid g = make_grid(30.0, 512);
    const Solution sol = picard_solve(p, g, {});
    const GagliardoForm form = build_gagliardo(g, p.order);
    const MorseResult mr = morse_index(sol.u, p.weight, form, 3);
    CHECK(mr.index == 1);
    REQUIRE(!mr.lowest.empty());
    // -u'' - sech^2(x/sqrt2) has the single bound state -1/2 (Poschl-Teller).
    CHECK(std::fabs(mr.lowest[0] + 0.5) <= 2e-2);
    CHECK(mr.bound_diag > 1.0);
}

TEST_CASE("vanishing potential has empty negative spectrum") {
    const HalfGrid g = make_grid(20.0, 128);
    const GagliardoForm form = build_gagliardo(g, make_order(0.75));
    EvenProfile u{g, std::vector<double>(129, -700.0)};  // V = e^u ~ 0
    const MorseResult mr = morse_index(u, Weight::constant(1.0), form, 2);
    CHECK(mr.index == 0);
    REQUIRE(!mr.lowest.empty());
    CHECK(mr.lowest[0] >= -1e-12);
}

TEST_CASE("morse index is stable under refinement and enlargement") {
    const auto p = base_params(0.75);
    const HalfGrid g1 = make_grid(40.0, 256);
    const HalfGrid g2 = make_grid(40.0, 512);
    const HalfGrid g3 = make_grid(60.0, 384);  // L x 1.5, h kept
    int idx[3];
    const HalfGrid* grids[3] = {&g1, &g2, &g3};
    for (int t = 0; t < 3; ++t) {
        const Solution sol = picard_solve(p, *grids[t], {});
        const GagliardoForm form = build_gagliardo(*grids[t], p.order);
        idx[t] = morse_index(sol.u, p.weight, form, 1).index;
    }
    CHECK(idx[0] >= 1);
    CHECK(idx[1] == idx[0]);
    CHECK(idx[2] == idx[0]);
}

TEST_CASE("even kernel element is annihilated, generic profiles are not") {
    const auto p = base_params(1.0);
    const HalfGrid g = make_grid(30.0, 1024);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    const double res = kernel_residual_even(sol, m);
    CHECK(res <= 1e-3);
    // Negative control: an unrelated even profile of the same size and
    // boundary value must leave a large normalized residual.
    std::vector<double> fake(static_cast<std::size_t>(g.n) + 1);
    for (int i = 0; i <= g.n; ++i)
        fake[static_cast<std::size_t>(i)] =
            2.0 * std::exp(-g.x(i) * g.x(i) / 4.0);
    CHECK(kernel_residual_even(sol, m, &fake) >= 0.1);
}

TEST_CASE("even kernel residual decreases under refinement") {
    const auto p = base_params(0.75);
    double res[2];
    const int ns[2] = {512, 1024};
    for (int t = 0; t < 2; ++t) {
        const HalfGrid g = make_grid(40.0, ns[t]);
        const Solution sol = picard_solve(p, g, {});
        const KernelMoments m(g, p.order);
        res[t] = kernel_residual_even(sol, m);
    }
    CHECK(res[1] <= res[0] / 2.0);
    CHECK(res[0] <= 1e-2);
}

TEST_CASE("odd kernel element is annihilated") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 1024);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    CHECK(kernel_residual_odd(sol, m) <= 5e-2);
}

TEST_CASE("kernel residuals require a constant weight") {
    auto p = base_params(0.75);
    p.weight = Weight::polynomial(1.0);
    const HalfGrid g = make_grid(40.0, 128);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    CHECK_THROWS_AS(kernel_residual_even(sol, m), InvalidParam);
    CHECK_THROWS_AS(kernel_residual_odd(sol, m), InvalidParam);
    CHECK_THROWS_AS(birman_schwinger_odd(sol, m), InvalidParam);
}

TEST_CASE("birman-schwinger top eigenvalue is one, simple and one-signed") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 512);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    const BirmanSchwinger bs = birman_schwinger_odd(sol, m);
    CHECK(std::fabs(bs.top - 1.0) <= 1e-3);
    CHECK(bs.gap_rel > 1e-3);
    CHECK(bs.one_signed);
    CHECK(bs.fn_min_rel >= 0.0);
    CHECK(bs.h_residual <= 1e-3);
    CHECK(bs.eigfun_dev <= 2e-2);
}

TEST_CASE("birman-schwinger vanishes with the profile") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(20.0, 64);
    Solution sol = picard_solve(p, g, {});
    for (double& v : sol.v.samples) v = 0.0;
    const KernelMoments m(g, p.order);
    const BirmanSchwinger bs = birman_schwinger_odd(sol, m);
    CHECK(std::fabs(bs.top) <= 1e-14);
    CHECK(bs.h_residual == 0.0);
}

TEST_CASE("fixed-point linearization stays away from eigenvalue one") {
    const auto p = base_params(0.75);
    const HalfGrid g = make_grid(40.0, 256);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    CHECK(linearized_fixedpoint_spectrum(sol, m) > 1e-2);
}

TEST_CASE("tiny-amplitude linearization is near zero, distance near one") {
    const auto p = base_params(0.75, 1e-4, 0.0);
    const HalfGrid g = make_grid(40.0, 256);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    // D_vT scales like lambda^2; all eigenvalues collapse to ~0.
    CHECK(std::fabs(linearized_fixedpoint_spectrum(sol, m) - 1.0) <= 1e-4);
}

TEST_CASE("spectral report aggregates and serializes") {
    const auto p = base_params(0.9);
    const HalfGrid g = make_grid(30.0, 256);
    const Solution sol = picard_solve(p, g, {});
    const KernelMoments m(g, p.order);
    const SpectralReport rep = spectral_report(sol, m);
    CHECK(rep.morse.index >= 1);
    CHECK(rep.bs.top == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(rep.linearized_distance > 1e-2);
    const std::string js = spectral_report_json(rep);
    CHECK(js.find("\"morse\"") != std::string::npos);
    CHECK(js.find("\"top\"") != std::string::npos);
    CHECK(js.find("\"linearized_distance\"") != std::string::npos);
}
