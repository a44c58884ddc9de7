#include "gelfand/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>

namespace gelfand {

namespace {

constexpr double kSigmaMin = 1e-4;

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::fabs(a[i] - b[i]));
    }
    return d;
}

BranchPoint to_point(const Solution& sol) {
    BranchPoint pt;
    pt.lambda = sol.params.lambda;
    pt.sigma = sol.params.sigma;
    pt.mass = sol.mass;
    pt.v = sol.v;
    pt.xalpha = xalpha_norm(sol.v, sol.params.order);
    return pt;
}

void record_modulus(BranchPath& path, double prev_param, double param) {
    if (path.points.size() < 2) return;
    const double step = std::fabs(param - prev_param);
    if (step == 0.0) return;
    const double dist =
        sup_distance(path.points[path.points.size() - 2].v.samples,
                     path.points.back().v.samples);
    path.stats.max_step_modulus =
        std::max(path.stats.max_step_modulus, dist / step);
}

} // namespace

BranchPath continue_sigma(const ShootingParams& start, bool to_zero,
                          const HalfGrid& grid, const SolveOptions& o) {
    validate_params(start);
    if (!(start.sigma > 0.0)) {
        throw InvalidParam("continue_sigma requires a positive starting sigma");
    }
    std::deque<double> schedule;
    if (start.sigma <= kSigmaMin) {
        schedule.push_back(to_zero ? 0.0 : start.sigma);
    } else {
        for (double s = start.sigma; s > kSigmaMin; s *= 0.5) {
            schedule.push_back(s);
        }
        if (to_zero) schedule.push_back(0.0);
    }

    BranchPath path;
    std::optional<EvenProfile> warm;
    double prev_sigma = schedule.front();
    int refinements = 0;
    while (!schedule.empty()) {
        const double sigma = schedule.front();
        schedule.pop_front();
        ShootingParams p = start;
        p.sigma = sigma;
        try {
            Solution sol = picard_solve(p, grid, o, warm);
            warm = sol.v;
            path.points.push_back(to_point(sol));
            ++path.stats.solves;
            record_modulus(path, prev_sigma, sigma);
            prev_sigma = sigma;
        } catch (const SolveError&) {
            if (++refinements > 20) throw;
            ++path.stats.refinements;
            // Refine the schedule: re-approach this sigma through a
            // geometric midpoint from the last converged one.
            const double mid =
                sigma > 0.0 ? std::sqrt(prev_sigma * sigma) : 0.5 * prev_sigma;
            schedule.push_front(sigma);
            schedule.push_front(mid);
        }
    }
    return path;
}

BranchPath continue_lambda(const ShootingParams& base, double lambda_from,
                           double lambda_to, const HalfGrid& grid,
                           const SolveOptions& o) {
    if (!(lambda_from > 0.0) || !(lambda_to > 0.0)) {
        throw InvalidParam("continue_lambda requires positive endpoints");
    }
    ShootingParams p = base;
    p.lambda = lambda_from;
    validate_params(p);

    BranchPath path;
    std::optional<EvenProfile> warm;
    Solution sol = picard_solve(p, grid, o, warm);
    warm = sol.v;
    path.points.push_back(to_point(sol));
    ++path.stats.solves;
    if (lambda_from == lambda_to) return path;

    const double total = std::log(lambda_to / lambda_from);
    const double floor_step = std::fabs(total) / 1024.0;
    double step = total / 8.0;
    double loglam = std::log(lambda_from);
    const double logto = std::log(lambda_to);
    int easy = 0;
    while (std::fabs(logto - loglam) > 1e-14) {
        double next = loglam + step;
        if ((total > 0.0 && next > logto) || (total < 0.0 && next < logto)) {
            next = logto;
        }
        ShootingParams pj = base;
        pj.lambda = std::exp(next);
        try {
            Solution sj = picard_solve(pj, grid, o, warm);
            warm = sj.v;
            const double prev_lam = std::exp(loglam);
            path.points.push_back(to_point(sj));
            ++path.stats.solves;
            record_modulus(path, prev_lam, pj.lambda);
            loglam = next;
            if (++easy >= 3) {
                easy = 0;
                if (std::fabs(step) < std::fabs(total) / 2.0) step *= 2.0;
            }
        } catch (const SolveError&) {
            easy = 0;
            ++path.stats.refinements;
            step *= 0.5;
            if (std::fabs(step) < floor_step) throw;
        }
    }
    return path;
}

EvenProfile random_positive_start(const ShootingParams& p, const HalfGrid& g,
                                  std::mt19937& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> width(0.5, 3.0);
    const int bumps = 3;
    std::vector<double> a(bumps), w(bumps);
    for (int j = 0; j < bumps; ++j) {
        a[j] = amp(rng);
        w[j] = width(rng);
    }
    std::vector<double> v(static_cast<std::size_t>(g.n) + 1, 0.0);
    for (int i = 0; i <= g.n; ++i) {
        const double x = g.x(i);
        double s = 0.0;
        for (int j = 0; j < bumps; ++j) {
            s += a[j] * std::exp(-(x / w[j]) * (x / w[j]));
        }
        v[static_cast<std::size_t>(i)] =
            p.lambda * p.weight.sqrt_value(x) * s;
    }
    // Enforce the domain margin ||v0||_{L2} >= 0.1 lambda.
    EvenProfile prof{g, std::move(v)};
    const double l2 = xalpha_norm(prof, p.order).l2;
    const double target = 0.1 * p.lambda;
    if (l2 < target) {
        const double fac = target / std::max(l2, 1e-300);
        for (double& s : prof.samples) s *= fac;
    }
    return prof;
}

double uniqueness_probe(const ShootingParams& p, int k, unsigned seed,
                        const HalfGrid& grid, const SolveOptions& o) {
    validate_params(p);
    if (k < 2) throw InvalidParam("uniqueness_probe requires k >= 2 starts");
    std::mt19937 rng(seed);
    std::vector<EvenProfile> starts;
    starts.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        starts.push_back(random_positive_start(p, grid, rng));
    }
    std::vector<std::future<Solution>> jobs;
    jobs.reserve(starts.size());
    for (int j = 0; j < k; ++j) {
        jobs.push_back(std::async(std::launch::async, [&, j] {
            return picard_solve(p, grid, o, starts[static_cast<std::size_t>(j)]);
        }));
    }
    std::vector<std::vector<double>> profiles;
    profiles.reserve(starts.size());
    for (int j = 0; j < k; ++j) {
        try {
            profiles.push_back(jobs[static_cast<std::size_t>(j)].get().v.samples);
        } catch (const SolveError& e) {
            throw ProbeInconclusive("start " + std::to_string(j) +
                                    " failed to converge: " + e.what());
        } catch (const GridPolicyError& e) {
            throw ProbeInconclusive("start " + std::to_string(j) +
                                    " exhausted the grid policy: " + e.what());
        }
    }
    double dist = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            dist = std::max(dist,
                            sup_distance(profiles[static_cast<std::size_t>(i)],
                                         profiles[static_cast<std::size_t>(j)]));
        }
    }
    return dist;
}

std::string branch_csv(const BranchPath& path) {
    std::string out = "lambda,sigma,mass,v0,xalpha_total\n";
    for (const BranchPoint& pt : path.points) {
        out += format_double(pt.lambda);
        out += ',';
        out += format_double(pt.sigma);
        out += ',';
        out += format_double(pt.mass);
        out += ',';
        out += format_double(pt.v.samples.front());
        out += ',';
        out += format_double(pt.xalpha.total);
        out += '\n';
    }
    return out;
}

} // namespace gelfand
