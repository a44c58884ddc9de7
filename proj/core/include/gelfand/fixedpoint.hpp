#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"
#include "gelfand/weight.hpp"

namespace gelfand {

/// Parameters of the shooting map
///   T[v](x) = lambda sqrt(K(x)) exp(-sigma^2 x^2 / 2) exp(w(x) / 2),
/// where w is the cumulative exponent integral of v^2.  lambda is the
/// shooting value (v(0) = lambda sqrt(K(0))); sigma >= 0 is the Gaussian
/// homotopy parameter (only sigma^2 enters).
struct ShootingParams {
    double lambda = 1.0;
    double sigma = 0.0;
    Weight weight = Weight::constant(1.0);
    FractionalOrder order;
};

void validate_params(const ShootingParams& p);

/// Solver knobs.  tol is the relative sup-norm fixed-point residual target;
/// damping applies to plain Picard (theta halves on residual increase);
/// anderson_depth = 0 disables mixing.  When adapt_tail is set, a converged
/// solution whose boundary ratio v(L)/v(0) exceeds tail_tol triggers a grid
/// enlargement L -> 1.5 L (h kept fixed) and a re-solve, up to max_enlarge
/// rounds; explicit user grids should leave it off.
struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 600;
    double damping = 1.0;
    int anderson_depth = 5;
    double tail_tol = 1e-10;
    bool adapt_tail = false;
    int max_enlarge = 3;
    bool newton = true;       ///< finish with Newton once Picard reaches 1e-8
    bool curvature = true;    ///< cell-bubble curvature correction of the map
};

/// Converged fixed point and derived fields.  v is the profile itself,
/// u = log(K^{-1} v^2) the solution of the original equation, w the full
/// cumulative exponent integral of v^2 (so v = lambda sqrt(K) e^{-sigma^2
/// x^2/2} e^{w/2} and, for K = 1, sigma = 0, lambda = 1: u = w).
struct Solution {
    ShootingParams params;
    HalfGrid grid;
    EvenProfile v, u, w;
    double mass = 0.0;          ///< integral of v^2 over the line
    double residual = 0.0;      ///< final relative sup residual
    std::vector<double> residual_history;
    int picard_iterations = 0;
    int newton_iterations = 0;
    int enlargements = 0;
    double tail_ratio = 0.0;    ///< v(L) / v(0)
    bool tail_ok = false;       ///< tail_ratio <= tail_tol
    double decay_d = 0.0;       ///< fitted prefactor of -log(v/v(0)) ~ d x^p
    double decay_p = 0.0;       ///< fitted growth exponent p
    bool curvature = true;      ///< map variant the residual refers to
};

/// Non-convergence, carrying the residual history for diagnosis.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, std::vector<double> history)
        : std::runtime_error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

/// Tail-tolerance policy exhausted (profile still touches the boundary
/// after the allowed number of enlargements).
class GridPolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One application of the shooting map (log-space evaluation, a single
/// exponentiation per node; output(0) = lambda sqrt(K(0)) exactly).
EvenProfile apply_T(const EvenProfile& v, const ShootingParams& p,
                    const KernelMoments& m, bool curvature = true);

/// Directional derivative of the map at v:
///   (D_v T h)(x) = T[v](x) * w_lin(x),  w_lin = exponent integral of v h,
/// exactly linear in h (the curvature correction is itself linear).
EvenProfile frechet_apply(const EvenProfile& v, const EvenProfile& h,
                          const ShootingParams& p, const KernelMoments& m,
                          bool curvature = true);

/// Damped Picard / Anderson iteration with optional Newton endgame, on the
/// given initial grid (enlarged per options when the tail is too fat).
/// v0 defaults to lambda sqrt(K(x)) e^{-x^2/2}; a zero v0 is rejected when
/// sigma = 0 (the map is undefined at 0 there).  Throws SolveError on
/// non-convergence, GridPolicyError when enlargement rounds run out.
Solution picard_solve(const ShootingParams& p, const HalfGrid& grid,
                      const SolveOptions& o,
                      const std::optional<EvenProfile>& v0 = std::nullopt);

/// Newton iteration on (Id - D_vT[v]) delta = T[v] - v from a starting
/// profile inside the basin; dense LU per step, quadratic decrease until
/// the quadrature floor.
Solution newton_refine(const ShootingParams& p, const EvenProfile& v,
                       const SolveOptions& o, const KernelMoments& m);

/// u = log(K^{-1} v^2) = 2 log v - log K; rejects non-positive samples.
EvenProfile recover_u(const EvenProfile& v, const Weight& k);

/// Exact scaling family at constant K: v_mu(x) = mu^s v(mu x) on the grid
/// [0, L/mu] (same node count, samples map exactly), with lambda' = mu^s
/// lambda, sigma' = mu sigma, mass' = mu^{2s-1} mass.  Non-constant weights
/// are rejected (the symmetry only holds for constant K).
Solution rescale_solution(const Solution& sol, double mu);

/// Mass functional of the (hat + optional bubble) density v^2.
double solution_mass(const EvenProfile& v, bool curvature);

/// CSV rows "x,v,u,w" for a solution (no preamble; callers may prepend
/// comment lines).
std::string solution_csv(const Solution& sol);

/// JSON diagnostics block (params, mass, iterations, residuals, decay fit).
std::string solution_diagnostics_json(const Solution& sol);

} // namespace gelfand
