#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"

namespace gelfand {

/// One verified fixed point along a parameter branch.
struct BranchPoint {
    double lambda = 0.0;
    double sigma = 0.0;
    double mass = 0.0;
    EvenProfile v;
    XAlphaNorm xalpha;
};

struct BranchStats {
    int solves = 0;
    int refinements = 0;          ///< schedule points inserted after failures
    double max_step_modulus = 0.0; ///< sup ||v_{j+1}-v_j|| / |param step|
};

/// Ordered branch along a monotone parameter schedule; every point satisfies
/// the Solution invariants (the corrector re-verifies each one).
struct BranchPath {
    std::vector<BranchPoint> points;
    BranchStats stats;
};

/// A randomized multi-start probe could not complete (some start failed to
/// converge); distinct from SolveError so callers can report "inconclusive"
/// rather than "no solution".
class ProbeInconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Homotopy in the Gaussian parameter: geometric schedule sigma_j =
/// sigma_0 / 2^j down to sigma_min = 1e-4, then sigma = 0 directly (when
/// to_zero is set), each corrector warm-started from the previous profile.
/// Failed correctors trigger geometric midpoint insertion.  start.sigma is
/// the initial sigma_0 > 0; a start at or below sigma_min degenerates to a
/// single solve.
BranchPath continue_sigma(const ShootingParams& start, bool to_zero,
                          const HalfGrid& grid, const SolveOptions& o);

/// Geometric continuation in lambda at fixed sigma, warm-started, with step
/// halving on corrector failure and doubling after three consecutive easy
/// successes (log-space steps, floored at 1/1024 of the total distance).
BranchPath continue_lambda(const ShootingParams& base, double lambda_from,
                           double lambda_to, const HalfGrid& grid,
                           const SolveOptions& o);

/// Strictly positive even start built from random Gaussian bumps, scaled so
/// its L2 norm is at least 0.1 lambda (the map's domain excludes 0).
EvenProfile random_positive_start(const ShootingParams& p, const HalfGrid& g,
                                  std::mt19937& rng);

/// Multi-start uniqueness probe: k >= 2 solves from randomized positive
/// initial iterates (deterministic given seed: all starts are drawn before
/// any solve runs; solves execute concurrently and join in index order).
/// Returns the maximum pairwise sup-distance of the converged profiles.
/// Throws ProbeInconclusive if any start fails to converge.
double uniqueness_probe(const ShootingParams& p, int k, unsigned seed,
                        const HalfGrid& grid, const SolveOptions& o);

/// CSV serialization with header "lambda,sigma,mass,v0,xalpha_total".
std::string branch_csv(const BranchPath& path);

} // namespace gelfand
