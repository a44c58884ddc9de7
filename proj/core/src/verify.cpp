#include "gelfand/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <nlohmann/json.hpp>

#include "quad.hpp"

namespace gelfand {

namespace {

// Gauss abscissas/weights mapped to the unit cell (t in (0,1), weights
// summing to 1).
struct UnitRule {
    std::vector<double> t, w;
};

UnitRule unit_rule(const quad::Rule& r) {
    UnitRule u;
    u.t.resize(static_cast<std::size_t>(2 * r.half));
    u.w.resize(u.t.size());
    std::vector<double> xs(u.t.size()), ws(u.t.size());
    quad::nodes(r, 0.0, 1.0, xs.begin(), ws.begin());
    u.t = xs;
    u.w = ws;
    return u;
}

// Potential of a cell-linear (+ optional bubble) density at every Gauss
// point of every cell, via per-abscissa real-offset moment tables:
//   out[i * g + k] = scale * sum_c [ l_c (wd D0 + wr R0) + r_c (wd D1 + wr R1) ]
// with D* the direct-kernel moments at offset (i - c + t_k) and R* the
// reflected-kernel moments at offset -(i + c + t_k).  use_q selects the
// signed kernel moments (Q*), otherwise the absolute-kernel moments (P*).
std::vector<double> potential_at_gauss(const KernelMoments& mom,
                                       const double* left, const double* right,
                                       const std::vector<double>* bubble,
                                       bool use_q, double wd, double wr,
                                       double scale, const UnitRule& rule) {
    const int n = mom.grid().n;
    const int g = static_cast<int>(rule.t.size());
    std::vector<double> out(static_cast<std::size_t>(n) * g, 0.0);
    std::vector<double> D0(static_cast<std::size_t>(2 * n) - 1);
    std::vector<double> D1(D0.size()), DB;
    std::vector<double> R0(static_cast<std::size_t>(2 * n) - 1);
    std::vector<double> R1(R0.size()), RB;
    if (bubble) {
        DB.resize(D0.size());
        RB.resize(R0.size());
    }
    for (int k = 0; k < g; ++k) {
        const double t = rule.t[static_cast<std::size_t>(k)];
        for (int d = -(n - 1); d <= n - 1; ++d) {
            const std::size_t j = static_cast<std::size_t>(d + n - 1);
            const double q = static_cast<double>(d) + t;
            D0[j] = use_q ? mom.Q0(q) : mom.P0(q);
            D1[j] = use_q ? mom.Q1(q) : mom.P1(q);
            if (bubble) DB[j] = use_q ? mom.QB(q) : mom.PB(q);
        }
        for (int d = 0; d <= 2 * n - 2; ++d) {
            const std::size_t j = static_cast<std::size_t>(d);
            const double q = -(static_cast<double>(d) + t);
            R0[j] = use_q ? mom.Q0(q) : mom.P0(q);
            R1[j] = use_q ? mom.Q1(q) : mom.P1(q);
            if (bubble) RB[j] = use_q ? mom.QB(q) : mom.PB(q);
        }
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            const std::size_t base_d = static_cast<std::size_t>(i + n - 1);
            const std::size_t base_r = static_cast<std::size_t>(i);
            for (int c = 0; c < n; ++c) {
                const std::size_t jd = base_d - static_cast<std::size_t>(c);
                const std::size_t jr = base_r + static_cast<std::size_t>(c);
                acc += left[c] * (wd * D0[jd] + wr * R0[jr]) +
                       right[c] * (wd * D1[jd] + wr * R1[jr]);
                if (bubble) {
                    acc += (*bubble)[static_cast<std::size_t>(c)] *
                           (wd * DB[jd] + wr * RB[jr]);
                }
            }
            out[static_cast<std::size_t>(i) * g + static_cast<std::size_t>(k)] =
                acc * scale;
        }
    }
    return out;
}

double quad_density(double l, double r, double b, double t) {
    return (1.0 - t) * l + t * r + b * t * (1.0 - t);
}

constexpr double kPi = 3.141592653589793238462643383279502884;

} // namespace

double pohozaev_residual(const Solution& sol, const KernelMoments& m) {
    check_sizes(m.grid(), sol.v.samples, "pohozaev_residual");
    const int n = m.grid().n;
    const double h = m.grid().h;
    const double L = m.grid().L;

    std::vector<double> rho(sol.v.samples.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = sol.v.samples[i] * sol.v.samples[i];
    }
    const double mass = solution_mass(sol.v, sol.curvature);
    if (!(mass > 0.0)) return 0.0;  // degenerate profile

    std::vector<double> bc;
    const std::vector<double>* bcp = nullptr;
    if (sol.curvature) {
        bc = second_diffs(rho);
        bcp = &bc;
    }
    const UnitRule rule = unit_rule(quad::gl12());
    const int g = static_cast<int>(rule.t.size());
    // H of the converged density at all quadrature points (signed kernel,
    // even extension, physical scale d_alpha h^{2 alpha}).
    const std::vector<double> H =
        potential_at_gauss(m, rho.data(), rho.data() + 1, bcp, true, 1.0, -1.0,
                           m.scale_h(), rule);

    double bilinear = 0.0;  // int_R x rho H(rho)
    double wterm = 0.0;     // int_R x W(x) rho
    double sterm = 0.0;     // int_R x^2 rho
    for (int i = 0; i < n; ++i) {
        const double l = rho[static_cast<std::size_t>(i)];
        const double r = rho[static_cast<std::size_t>(i) + 1];
        const double b = bcp ? bc[static_cast<std::size_t>(i)] : 0.0;
        for (int k = 0; k < g; ++k) {
            const double t = rule.t[static_cast<std::size_t>(k)];
            const double wq = rule.w[static_cast<std::size_t>(k)] * h;
            const double x = (static_cast<double>(i) + t) * h;
            const double rq = quad_density(l, r, b, t);
            const double Hq =
                H[static_cast<std::size_t>(i) * g + static_cast<std::size_t>(k)];
            bilinear += wq * x * rq * Hq;
            wterm += wq * x * sol.params.weight.dlog_half(x) * rq;
            sterm += wq * x * x * rq;
        }
    }
    bilinear *= 2.0;  // even integrands: full line = 2 x half line
    wterm *= 2.0;
    sterm *= 2.0;

    const double boundary = 2.0 * L * rho.back();
    const double sig2 = sol.params.sigma * sol.params.sigma;
    const double lhs =
        mass - boundary + 2.0 * wterm - 2.0 * sig2 * sterm - bilinear;
    return std::fabs(lhs) / mass;
}

double abs_kernel_bilinear(const KernelMoments& m, const EvenProfile& rho) {
    check_sizes(m.grid(), rho.samples, "abs_kernel_bilinear");
    const int n = m.grid().n;
    const double h = m.grid().h;
    const double a = m.order().alpha;
    const UnitRule rule = unit_rule(quad::gl12());
    const int g = static_cast<int>(rule.t.size());
    // Inner integral over the full line folded to (0, L): the even
    // reflection turns |x-y| into the pair |x-y|, x+y, i.e. direct +
    // reflected absolute-kernel moments with weight +1 each.
    const std::vector<double> inner = potential_at_gauss(
        m, rho.samples.data(), rho.samples.data() + 1, nullptr, false, 1.0,
        1.0, std::pow(h, 1.0 + 2.0 * a), rule);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double l = rho.samples[static_cast<std::size_t>(i)];
        const double r = rho.samples[static_cast<std::size_t>(i) + 1];
        for (int k = 0; k < g; ++k) {
            const double t = rule.t[static_cast<std::size_t>(k)];
            acc += rule.w[static_cast<std::size_t>(k)] * h *
                   quad_density(l, r, 0.0, t) *
                   inner[static_cast<std::size_t>(i) * g +
                         static_cast<std::size_t>(k)];
        }
    }
    return 2.0 * acc;  // outer fold: both half lines contribute equally
}

double double_integral_gap(const EvenProfile& rho, const KernelMoments& m) {
    check_sizes(m.grid(), rho.samples, "double_integral_gap");
    const int n = m.grid().n;
    const double h = m.grid().h;
    const UnitRule rule = unit_rule(quad::gl12());
    const int g = static_cast<int>(rule.t.size());
    const std::vector<double> H =
        potential_at_gauss(m, rho.samples.data(), rho.samples.data() + 1,
                           nullptr, true, 1.0, -1.0, m.scale_h(), rule);
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
        const double l = rho.samples[static_cast<std::size_t>(i)];
        const double r = rho.samples[static_cast<std::size_t>(i) + 1];
        for (int k = 0; k < g; ++k) {
            const double t = rule.t[static_cast<std::size_t>(k)];
            const double x = (static_cast<double>(i) + t) * h;
            lhs += rule.w[static_cast<std::size_t>(k)] * h * x *
                   quad_density(l, r, 0.0, t) *
                   H[static_cast<std::size_t>(i) * g + static_cast<std::size_t>(k)];
        }
    }
    lhs *= 2.0;
    const double rhs = 0.5 * m.order().d_alpha * abs_kernel_bilinear(m, rho);
    const double den = std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    return std::fabs(lhs - rhs) / den;
}

double reverse_hls_ratio(const EvenProfile& rho, const KernelMoments& m) {
    check_sizes(m.grid(), rho.samples, "reverse_hls_ratio");
    double sup = 0.0;
    for (double s : rho.samples) {
        if (s < 0.0) throw InvalidParam("reverse_hls_ratio: density must be >= 0");
        sup = std::max(sup, s);
    }
    if (sup == 0.0) throw InvalidParam("reverse_hls_ratio: zero density");
    const double q = 1.0 / (1.0 + m.order().alpha);
    std::vector<double> pq(rho.samples.size());
    for (std::size_t i = 0; i < pq.size(); ++i) {
        pq[i] = std::pow(rho.samples[i], q);
    }
    const double iq = 2.0 * half_integral(pq, m.grid());
    const double num = abs_kernel_bilinear(m, rho);
    return num / std::pow(iq, 2.0 / q);
}

namespace {

// Exact Laplace transform of the cell-linear half-line density:
//   Lw(t) = h sum_c e^{-t x_c} [ l_c (E0 - E1) + r_c E1 ],  tau = t h,
// with E0 = (1 - e^-tau)/tau, E1 = (1 - (1+tau) e^-tau)/tau^2 (series for
// small tau).
double laplace_of_cells(const CellDensity& w, double t) {
    const double h = w.grid.h;
    const double tau = t * h;
    double E0, E1;
    if (std::fabs(tau) < 1e-4) {
        E0 = 1.0 - tau / 2.0 + tau * tau / 6.0 - tau * tau * tau / 24.0;
        E1 = 0.5 - tau / 3.0 + tau * tau / 8.0 - tau * tau * tau / 30.0;
    } else {
        const double em = std::exp(-tau);
        E0 = (1.0 - em) / tau;
        E1 = (1.0 - (1.0 + tau) * em) / (tau * tau);
    }
    const std::size_t n = w.left.size();
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const double ph = std::exp(-t * h * static_cast<double>(c));
        acc += ph * (w.left[c] * (E0 - E1) + w.right[c] * E1);
    }
    return acc * h;
}

} // namespace

std::pair<double, double> laplace_positivity(const CellDensity& w,
                                             const FractionalOrder& ord) {
    const std::size_t n = w.left.size();
    if (w.right.size() != n || static_cast<int>(n) != w.grid.n) {
        throw InvalidParam("laplace_positivity: malformed cell density");
    }
    const double a = ord.alpha;
    const double h = w.grid.h;
    const KernelMoments mom(w.grid, ord);
    const UnitRule rule = unit_rule(quad::gl12());
    const int g = static_cast<int>(rule.t.size());

    // Route 1: I = 2 d_alpha iint_{(0,L)^2} w(x) w(y) (x+y)^{2 alpha - 1};
    // inner integral via reflected signed-kernel moments (the offset is
    // always negative there, so the moment carries a global minus sign).
    const std::vector<double> inner = potential_at_gauss(
        mom, w.left.data(), w.right.data(), nullptr, true, 0.0, -1.0,
        std::pow(h, 2.0 * a), rule);
    double i1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < g; ++k) {
            const double t = rule.t[static_cast<std::size_t>(k)];
            i1 += rule.w[static_cast<std::size_t>(k)] * h *
                  quad_density(w.left[i], w.right[i], 0.0, t) *
                  inner[i * static_cast<std::size_t>(g) +
                        static_cast<std::size_t>(k)];
        }
    }
    i1 *= 2.0 * ord.d_alpha;

    // Route 2: completely monotone factorization of the kernel.  For
    // 2 alpha < 1:  (x+y)^{2a-1} = (1/Gamma(1-2a)) int_0^inf t^{-2a}
    // e^{-t(x+y)} dt, so I = (2 d_a / Gamma(1-2a)) int t^{-2a} Lw(t)^2 dt,
    // manifestly >= 0.  The substitution t = u^beta, beta = 1/(1-2a),
    // flattens the measure exactly; a three-term Watson expansion covers
    // t > T.  The endpoint a = 1/2 degenerates to I = 2 d_a (int w)^2.
    double i2;
    if (ord.oracle_endpoint) {
        double total = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            total += 0.5 * (w.left[c] + w.right[c]) * h;
        }
        i2 = 2.0 * ord.d_alpha * total * total;
    } else {
        const double beta = 1.0 / (1.0 - 2.0 * a);
        const double T = 4000.0;
        const double U = std::pow(T, 1.0 - 2.0 * a);
        const int panels = 40;
        std::vector<double> edges;
        edges.push_back(0.0);
        edges.push_back(0.25);
        const double ratio = std::pow(U / 0.25, 1.0 / (panels - 1));
        for (int j = 1; j < panels; ++j) {
            edges.push_back(0.25 * std::pow(ratio, j));
        }
        const quad::Rule gr = quad::gl12();
        double main = 0.0;
        for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
            main += quad::integrate(gr, edges[j], edges[j + 1], [&](double u) {
                const double lw = laplace_of_cells(w, std::pow(u, beta));
                return lw * lw;
            });
        }
        main *= beta;
        const double w0 = w.left[0];
        const double mu = (w.right[0] - w.left[0]) / h;
        const double tail =
            w0 * w0 * std::pow(T, -2.0 * a - 1.0) / (2.0 * a + 1.0) +
            2.0 * w0 * mu * std::pow(T, -2.0 * a - 2.0) / (2.0 * a + 2.0) +
            mu * mu * std::pow(T, -2.0 * a - 3.0) / (2.0 * a + 3.0);
        i2 = 2.0 * ord.d_alpha / gamma_fn(1.0 - 2.0 * a) * (main + tail);
    }
    return {i1, i2};
}

std::pair<double, double> laplace_positivity(const EvenProfile& w,
                                             const FractionalOrder& ord) {
    return laplace_positivity(to_cells(w), ord);
}

DecayFit decay_exponent_fit(const EvenProfile& v, const FractionalOrder& ord,
                            bool with_offset) {
    check_sizes(v.grid, v.samples, "decay_exponent_fit");
    const double L = v.grid.L;
    DecayFit fit;
    std::vector<double> rho(v.samples.size()), wrho(v.samples.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = v.samples[i] * v.samples[i];
        wrho[i] = std::pow(v.grid.x(static_cast<int>(i)), 2.0 * ord.alpha) * rho[i];
    }
    fit.b = 2.0 * ord.c_alpha * half_integral(wrho, v.grid);
    const double v0 = std::max(v.samples[0], 1e-300);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (int i = 1; i <= v.grid.n; ++i) {
        const double x = v.grid.x(i);
        if (x < L / 4.0 || x > 3.0 * L / 4.0) continue;
        double y = -std::log(std::max(v.samples[static_cast<std::size_t>(i)],
                                      1e-300) / v0);
        if (with_offset) y += 0.5 * fit.b;
        if (!(y > 0.0)) continue;
        const double lx = std::log(x);
        const double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 8) {
        throw InvalidParam("decay_exponent_fit: insufficient decay window");
    }
    const double det = count * sxx - sx * sx;
    fit.p = (count * sxy - sx * sy) / det;
    fit.d = std::exp((sy * sxx - sx * sxy) / det);
    fit.ok = true;
    return fit;
}

SymmetryFlags symmetry_monotonicity_check(const EvenProfile& u) {
    check_sizes(u.grid, u.samples, "symmetry_monotonicity_check");
    SymmetryFlags flags;
    flags.even_ok = true;  // half-grid storage renders evenness structural
    double sup = 0.0;
    for (double s : u.samples) sup = std::max(sup, std::fabs(s));
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         (1.0 + sup);
    bool strict = u.samples.back() < u.samples.front();
    for (std::size_t i = 0; i + 1 < u.samples.size() && strict; ++i) {
        if (u.samples[i + 1] - u.samples[i] >= slack) strict = false;
    }
    flags.strictly_decreasing = strict;
    return flags;
}

double scaling_mass_check(const Solution& sol, double mu) {
    const Solution scaled = rescale_solution(sol, mu);
    const double expected = std::pow(mu, 2.0 * sol.params.order.s - 1.0);
    return std::fabs(scaled.mass / sol.mass - expected);
}

VerificationReport verification_report(const Solution& sol,
                                       const KernelMoments& m) {
    VerificationReport rep;
    EvenProfile rho{sol.grid, {}};
    rho.samples.resize(sol.v.samples.size());
    for (std::size_t i = 0; i < rho.samples.size(); ++i) {
        rho.samples[i] = sol.v.samples[i] * sol.v.samples[i];
    }
    auto poho = std::async(std::launch::async,
                           [&] { return pohozaev_residual(sol, m); });
    auto gap = std::async(std::launch::async,
                          [&] { return double_integral_gap(rho, m); });
    auto hls = std::async(std::launch::async,
                          [&] { return reverse_hls_ratio(rho, m); });
    auto lap = std::async(std::launch::async, [&] {
        return laplace_positivity(sol.v, sol.params.order);
    });
    auto sym = std::async(std::launch::async,
                          [&] { return symmetry_monotonicity_check(sol.u); });
    rep.pohozaev_residual_rel = poho.get();
    rep.double_integral_gap_rel = gap.get();
    rep.hls_ratio = hls.get();
    const std::pair<double, double> lp = lap.get();
    rep.laplace_min = std::min(lp.first, lp.second);
    rep.laplace_route_gap =
        std::fabs(lp.first - lp.second) /
        std::max({std::fabs(lp.first), std::fabs(lp.second), 1e-300});
    const SymmetryFlags flags = sym.get();
    rep.monotone_ok = flags.strictly_decreasing;
    rep.even_ok = flags.even_ok;
    try {
        rep.decay_exponent =
            decay_exponent_fit(sol.v, sol.params.order, true).p;
    } catch (const InvalidParam&) {
        rep.skipped["decay_exponent"] = "insufficient decay window";
    }
    if (sol.params.weight.kind() == Weight::Kind::constant) {
        rep.scaling_mass_gap = scaling_mass_check(sol, 2.0);
    } else {
        rep.skipped["scaling_mass"] =
            "scaling family requires a constant weight";
    }
    return rep;
}

std::string verification_report_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["pohozaev_residual_rel"] = rep.pohozaev_residual_rel;
    j["double_integral_gap_rel"] = rep.double_integral_gap_rel;
    j["hls_ratio"] = rep.hls_ratio;
    j["laplace_min"] = rep.laplace_min;
    j["laplace_route_gap"] = rep.laplace_route_gap;
    j["decay_exponent"] = rep.decay_exponent;
    j["monotone_ok"] = rep.monotone_ok;
    j["even_ok"] = rep.even_ok;
    j["scaling_mass_gap"] = rep.scaling_mass_gap;
    j["skipped"] = rep.skipped;
    return j.dump(2);
}

} // namespace gelfand
