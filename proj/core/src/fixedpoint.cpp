#include "gelfand/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gelfand/verify.hpp"
#include "gelfand/version.hpp"

namespace gelfand {

void validate_params(const ShootingParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) {
        throw InvalidParam("shooting value lambda must be positive");
    }
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
        throw InvalidParam("sigma must be nonnegative");
    }
    if (!(p.order.s > 0.5) || !(p.order.s <= 1.0)) {
        throw InvalidParam("ShootingParams carries an invalid order");
    }
}

namespace {

std::vector<double> squared(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * v[i];
    return r;
}

// Log-space evaluation of the map given the precomputed exponent w.
std::vector<double> map_from_w(const std::vector<double>& w,
                               const ShootingParams& p, const HalfGrid& g) {
    const double loglam = std::log(p.lambda);
    const double s2 = 0.5 * p.sigma * p.sigma;
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = g.x(static_cast<int>(i));
        out[i] = std::exp(loglam + 0.5 * std::log(p.weight.value(x)) -
                          s2 * x * x + 0.5 * w[i]);
    }
    return out;
}

std::vector<double> exponent_of(const KernelMoments& m,
                                const std::vector<double>& rho,
                                bool curvature) {
    EvenProfile pr{m.grid(), rho};
    if (curvature) {
        const std::vector<double> bc = second_diffs(rho);
        return exponent_integral(m, pr, &bc);
    }
    return exponent_integral(m, pr, nullptr);
}

double rel_sup_residual(const std::vector<double>& tv,
                        const std::vector<double>& v) {
    double num = 0.0, den = 1e-300;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num = std::max(num, std::fabs(tv[i] - v[i]));
        den = std::max(den, std::fabs(tv[i]));
    }
    return num / den;
}

void check_invariants(const Solution& sol, const SolveOptions& o) {
    const std::vector<double>& v = sol.v.samples;
    const HalfGrid& g = sol.grid;
    const double anchor0 =
        sol.params.lambda * sol.params.weight.sqrt_value(0.0);
    const double half_s2 = 0.5 * sol.params.sigma * sol.params.sigma;
    const double loglam = std::log(sol.params.lambda);
    for (std::size_t i = 0; i < v.size(); ++i) {
        // Positivity is required wherever the sample's own log magnitude
        // log(lambda sqrt K(x)) - sigma^2 x^2 / 2 + w / 2 is representable;
        // beyond that the map output legitimately underflows to zero.
        const double x = g.x(static_cast<int>(i));
        const double lv = loglam +
                          0.5 * std::log(sol.params.weight.value(x)) -
                          half_s2 * x * x + 0.5 * sol.w.samples[i];
        if (!(v[i] > 0.0) && lv > -700.0) {
            throw SolveError("solution lost positivity at node " +
                                 std::to_string(i),
                             sol.residual_history);
        }
    }
    const double anchor = anchor0;
    if (std::fabs(v[0] - anchor) > 10.0 * o.tol * anchor + 1e-14 * anchor) {
        throw SolveError("shooting anchor v(0) drifted from lambda sqrt(K(0))",
                         sol.residual_history);
    }
    // Monotone-decreasing up to discrete wiggle: an upstep is tolerated only
    // below the largest downstep scale (h * sup |dv/dx|) plus rounding noise.
    double max_down = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        max_down = std::max(max_down, v[i] - v[i + 1]);
    }
    const double wiggle = max_down + 1e-13 * v[0];
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] - v[i] > wiggle) {
            throw SolveError("solution is not monotone-decreasing (node " +
                                 std::to_string(i) + ")",
                             sol.residual_history);
        }
    }
    // A-priori Gaussian envelope from the shooting bound.
    const double s2 = 0.5 * sol.params.sigma * sol.params.sigma;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = g.x(static_cast<int>(i));
        const double env = anchor * std::exp(-s2 * x * x);
        if (v[i] > env * (1.0 + 1e-10) + 1e-300) {
            throw SolveError("solution exceeds the a-priori envelope",
                             sol.residual_history);
        }
    }
}

Solution finalize(const ShootingParams& p, const HalfGrid& g,
                  std::vector<double> v, const KernelMoments& m,
                  const SolveOptions& o, std::vector<double> history,
                  int picard_its, int newton_its, int enlargements) {
    Solution sol;
    sol.params = p;
    sol.grid = g;
    sol.curvature = o.curvature;
    const std::vector<double> rho = squared(v);
    const std::vector<double> w = exponent_of(m, rho, o.curvature);
    const std::vector<double> tv = map_from_w(w, p, g);
    sol.residual = rel_sup_residual(tv, v);
    sol.v = EvenProfile{g, std::move(v)};
    sol.w = EvenProfile{g, w};
    // u = log(v^2 / K) assembled in log space: v^2 = lambda^2 K e^{-sigma^2
    // x^2} e^w, so u = 2 log lambda - sigma^2 x^2 + w stays finite even where
    // the Gaussian envelope underflows the samples themselves.
    {
        const double loglam = 2.0 * std::log(p.lambda);
        const double s2 = p.sigma * p.sigma;
        std::vector<double> u(sol.v.samples.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = g.x(static_cast<int>(i));
            u[i] = loglam - s2 * x * x + w[i];
        }
        sol.u = EvenProfile{g, std::move(u)};
    }
    sol.mass = solution_mass(sol.v, o.curvature);
    sol.residual_history = std::move(history);
    sol.picard_iterations = picard_its;
    sol.newton_iterations = newton_its;
    sol.enlargements = enlargements;
    sol.tail_ratio = sol.v.samples.back() / sol.v.samples.front();
    sol.tail_ok = sol.tail_ratio <= o.tail_tol;
    try {
        const DecayFit fit = decay_exponent_fit(sol.v, p.order, true);
        sol.decay_d = fit.d;
        sol.decay_p = fit.p;
    } catch (const InvalidParam&) {
        // Grid too small for a meaningful fit window; leave zeros.
    }
    check_invariants(sol, o);
    return sol;
}

std::vector<double> default_start(const ShootingParams& p, const HalfGrid& g) {
    std::vector<double> v(static_cast<std::size_t>(g.n) + 1);
    for (int i = 0; i <= g.n; ++i) {
        const double x = g.x(i);
        v[static_cast<std::size_t>(i)] =
            p.lambda * p.weight.sqrt_value(x) * std::exp(-0.5 * x * x);
    }
    return v;
}

// One full Picard/Anderson + Newton pass on a fixed grid.  Returns the
// iterate, residual history and iteration counts via out-params.
std::vector<double> solve_on_grid(const ShootingParams& p, const HalfGrid& g,
                                  const SolveOptions& o,
                                  std::vector<double> v,
                                  std::vector<double>& history,
                                  int& picard_its, int& newton_its) {
    const KernelMoments mom(g, p.order);
    const std::size_t nn = static_cast<std::size_t>(g.n) + 1;
    const double picard_target = o.newton ? std::max(o.tol, 1e-8) : o.tol;

    auto apply_map = [&](const std::vector<double>& it) {
        return map_from_w(exponent_of(mom, squared(it), o.curvature), p, g);
    };

    std::deque<Eigen::VectorXd> mk, fk;  // Anderson histories
    double theta = o.damping;
    double prev_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < o.max_iter; ++it) {
        const std::vector<double> tv = apply_map(v);
        const double res = rel_sup_residual(tv, v);
        history.push_back(res);
        ++picard_its;
        if (res < picard_target) {
            converged = true;
            break;
        }
        Eigen::VectorXd r(static_cast<long>(nn));
        for (std::size_t i = 0; i < nn; ++i) r[static_cast<long>(i)] = tv[i] - v[i];
        if (o.anderson_depth > 0) {
            Eigen::VectorXd vk(static_cast<long>(nn));
            for (std::size_t i = 0; i < nn; ++i) vk[static_cast<long>(i)] = v[i];
            mk.push_back(vk);
            fk.push_back(r);
            if (static_cast<int>(mk.size()) > o.anderson_depth + 1) {
                mk.pop_front();
                fk.pop_front();
            }
            const int m = static_cast<int>(mk.size());
            if (m > 1) {
                Eigen::MatrixXd F(static_cast<long>(nn), m - 1);
                for (int j = 0; j + 1 < m; ++j) F.col(j) = fk[j + 1] - fk[j];
                const Eigen::VectorXd gam =
                    F.colPivHouseholderQr().solve(r);
                Eigen::VectorXd vn(static_cast<long>(nn));
                for (std::size_t i = 0; i < nn; ++i) vn[static_cast<long>(i)] = tv[i];
                for (int j = 0; j + 1 < m; ++j) {
                    vn -= gam[j] * ((mk[j + 1] + fk[j + 1]) - (mk[j] + fk[j]));
                }
                for (std::size_t i = 0; i < nn; ++i) {
                    v[i] = std::max(vn[static_cast<long>(i)], 0.0);
                }
                prev_res = res;
                continue;
            }
        }
        if (res > prev_res) theta = std::max(0.5 * theta, 1.0 / 64.0);
        prev_res = res;
        for (std::size_t i = 0; i < nn; ++i) {
            v[i] = (1.0 - theta) * v[i] + theta * tv[i];
        }
    }
    if (!converged) {
        throw SolveError(
            "Picard iteration did not reach the target residual in " +
                std::to_string(o.max_iter) +
                " steps (try stronger damping or a larger grid)",
            history);
    }
    if (!o.newton) return v;

    // Newton endgame: the linearization matrix is built from the (constant)
    // dense exponent operator, rescaled by the current iterate.
    const std::vector<double> W = weight_matrix(mom, o.curvature);
    for (int it = 0; it < 40; ++it) {
        const std::vector<double> tv = apply_map(v);
        const double res = rel_sup_residual(tv, v);
        if (res < o.tol) return v;
        Eigen::MatrixXd A(static_cast<long>(nn), static_cast<long>(nn));
        for (std::size_t i = 0; i < nn; ++i) {
            for (std::size_t j = 0; j < nn; ++j) {
                A(static_cast<long>(i), static_cast<long>(j)) =
                    -tv[i] * W[i * nn + j] * v[j];
            }
            A(static_cast<long>(i), static_cast<long>(i)) += 1.0;
        }
        Eigen::VectorXd r(static_cast<long>(nn));
        for (std::size_t i = 0; i < nn; ++i) r[static_cast<long>(i)] = tv[i] - v[i];
        const Eigen::VectorXd delta = A.partialPivLu().solve(r);
        if (!delta.allFinite()) {
            throw SolveError(
                "Newton linear system is singular (grid too coarse or "
                "iterate outside the basin)",
                history);
        }
        for (std::size_t i = 0; i < nn; ++i) v[i] += delta[static_cast<long>(i)];
        ++newton_its;
        history.push_back(rel_sup_residual(apply_map(v), v));
    }
    const double final_res = rel_sup_residual(apply_map(v), v);
    if (final_res >= o.tol) {
        throw SolveError("Newton refinement stalled at residual " +
                             std::to_string(final_res),
                         history);
    }
    return v;
}

} // namespace

EvenProfile apply_T(const EvenProfile& v, const ShootingParams& p,
                    const KernelMoments& m, bool curvature) {
    validate_params(p);
    check_sizes(m.grid(), v.samples, "apply_T");
    const std::vector<double> w = exponent_of(m, squared(v.samples), curvature);
    return EvenProfile{m.grid(), map_from_w(w, p, m.grid())};
}

EvenProfile frechet_apply(const EvenProfile& v, const EvenProfile& h,
                          const ShootingParams& p, const KernelMoments& m,
                          bool curvature) {
    validate_params(p);
    check_sizes(m.grid(), v.samples, "frechet_apply");
    check_sizes(m.grid(), h.samples, "frechet_apply");
    std::vector<double> vh(v.samples.size());
    for (std::size_t i = 0; i < vh.size(); ++i) vh[i] = v.samples[i] * h.samples[i];
    const std::vector<double> wlin = exponent_of(m, vh, curvature);
    const EvenProfile tv = apply_T(v, p, m, curvature);
    std::vector<double> out(vh.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = tv.samples[i] * wlin[i];
    return EvenProfile{m.grid(), std::move(out)};
}

Solution picard_solve(const ShootingParams& p, const HalfGrid& grid,
                      const SolveOptions& o,
                      const std::optional<EvenProfile>& v0) {
    validate_params(p);
    if (!(o.tol > 0.0)) throw InvalidParam("tol must be positive");
    if (!(o.damping > 0.0) || o.damping > 1.0) {
        throw InvalidParam("damping must lie in (0, 1]");
    }
    HalfGrid g = grid;
    std::vector<double> v;
    if (v0.has_value()) {
        check_sizes(g, v0->samples, "picard_solve initial iterate");
        double nrm = 0.0;
        for (double x : v0->samples) nrm += x * x;
        if (nrm == 0.0 && p.sigma == 0.0) {
            throw InvalidParam(
                "zero initial iterate is outside the map's domain at sigma = 0");
        }
        v = v0->samples;
    } else {
        v = default_start(p, g);
    }

    std::vector<double> history;
    int picard_its = 0, newton_its = 0;
    int rounds = 0;
    for (;;) {
        v = solve_on_grid(p, g, o, std::move(v), history, picard_its,
                          newton_its);
        const double ratio = v.back() / v.front();
        if (!o.adapt_tail || ratio <= o.tail_tol) {
            return finalize(p, g, std::move(v), KernelMoments(g, p.order), o,
                            std::move(history), picard_its, newton_its, rounds);
        }
        if (rounds >= o.max_enlarge) {
            throw GridPolicyError(
                "tail ratio " + std::to_string(ratio) +
                " still above tolerance after " + std::to_string(rounds) +
                " grid enlargements");
        }
        ++rounds;
        const EvenProfile old{g, v};
        const int new_n =
            static_cast<int>(std::lround(static_cast<double>(g.n) * 1.5));
        g = make_grid(g.L * 1.5, new_n);
        std::vector<double> vi(static_cast<std::size_t>(g.n) + 1);
        for (int i = 0; i <= g.n; ++i) {
            vi[static_cast<std::size_t>(i)] = interp(old, g.x(i));
        }
        v = std::move(vi);
    }
}

Solution newton_refine(const ShootingParams& p, const EvenProfile& v,
                       const SolveOptions& o, const KernelMoments& m) {
    validate_params(p);
    check_sizes(m.grid(), v.samples, "newton_refine");
    // The driver's Picard stage acts as the basin guard: an iterate already
    // below the handover residual goes straight to Newton; a coarser one
    // gets a few contraction steps first.
    SolveOptions opts = o;
    opts.newton = true;
    std::vector<double> history;
    int picard_its = 0, newton_its = 0;
    std::vector<double> out = solve_on_grid(p, m.grid(), opts, v.samples,
                                            history, picard_its, newton_its);
    return finalize(p, m.grid(), std::move(out), m, opts, std::move(history),
                    picard_its, newton_its, 0);
}

EvenProfile recover_u(const EvenProfile& v, const Weight& k) {
    check_sizes(v.grid, v.samples, "recover_u");
    std::vector<double> u(v.samples.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(v.samples[i] > 0.0)) {
            throw InvalidParam("recover_u requires strictly positive samples");
        }
        const double x = v.grid.x(static_cast<int>(i));
        u[i] = 2.0 * std::log(v.samples[i]) - std::log(k.value(x));
    }
    return EvenProfile{v.grid, std::move(u)};
}

Solution rescale_solution(const Solution& sol, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw InvalidParam("rescale factor mu must be positive");
    }
    if (sol.params.weight.kind() != Weight::Kind::constant) {
        throw InvalidParam(
            "rescale_solution requires a constant weight (the scaling family "
            "only exists there)");
    }
    const double s = sol.params.order.s;
    const double fac = std::pow(mu, s);
    ShootingParams p2 = sol.params;
    p2.lambda = fac * sol.params.lambda;
    p2.sigma = mu * sol.params.sigma;
    const HalfGrid g2 = make_grid(sol.grid.L / mu, sol.grid.n);
    std::vector<double> v2(sol.v.samples.size());
    for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = fac * sol.v.samples[i];

    SolveOptions o;
    o.curvature = sol.curvature;
    o.tail_tol = 1.0;  // finalize() only records the ratio; keep policy out
    Solution out = finalize(p2, g2, std::move(v2), KernelMoments(g2, p2.order),
                            o, {}, 0, 0, 0);
    out.residual_history = {out.residual};
    out.tail_ratio = sol.tail_ratio;
    out.tail_ok = sol.tail_ok;
    return out;
}

double solution_mass(const EvenProfile& v, bool curvature) {
    check_sizes(v.grid, v.samples, "solution_mass");
    const std::vector<double> rho = squared(v.samples);
    double mass = 2.0 * half_integral(rho, v.grid);
    if (curvature) {
        const std::vector<double> bc = second_diffs(rho);
        double b = 0.0;
        for (double c : bc) b += c;
        mass += 2.0 * b * v.grid.h / 6.0;  // cell bubble integrates to h/6
    }
    return mass;
}

std::string solution_csv(const Solution& sol) {
    std::string out = "x,v,u,w\n";
    for (int i = 0; i <= sol.grid.n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        out += format_double(sol.grid.x(i));
        out += ',';
        out += format_double(sol.v.samples[k]);
        out += ',';
        out += format_double(sol.u.samples[k]);
        out += ',';
        out += format_double(sol.w.samples[k]);
        out += '\n';
    }
    return out;
}

std::string solution_diagnostics_json(const Solution& sol) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["params"] = {{"s", sol.params.order.s},
                   {"alpha", sol.params.order.alpha},
                   {"lambda", sol.params.lambda},
                   {"sigma", sol.params.sigma},
                   {"weight", sol.params.weight.describe()}};
    j["grid"] = {{"L", sol.grid.L}, {"n", sol.grid.n}, {"h", sol.grid.h}};
    j["mass"] = sol.mass;
    j["residual"] = sol.residual;
    j["iterations"] = {{"picard", sol.picard_iterations},
                       {"newton", sol.newton_iterations}};
    j["enlargements"] = sol.enlargements;
    j["residual_history"] = sol.residual_history;
    j["tail"] = {{"ratio", sol.tail_ratio}, {"ok", sol.tail_ok}};
    j["decay_fit"] = {{"d", sol.decay_d}, {"p", sol.decay_p}};
    j["curvature"] = sol.curvature;
    return j.dump(2);
}

} // namespace gelfand
