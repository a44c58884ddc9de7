#pragma once

#include <map>
#include <string>
#include <utility>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"

namespace gelfand {

/// Virial (Pohozaev) balance of a converged solution.  The profile equation
/// pairs with x rho' to give the exact identity
///   mass - 2 L rho(L) + 2 I[x W rho] - 2 sigma^2 I[x^2 rho] - I[x rho H(rho)] = 0,
/// (W = (1/2) d/dx log K; the 2 L rho(L) term is the truncation boundary
/// flux, negligible only when the tail has fully decayed).  All integrals
/// use per-cell Gauss quadrature against the same hat + curvature density
/// the solver converged with, and H is evaluated at the quadrature points
/// via exact real-offset kernel moments.  Returns the relative residual
/// |lhs| / mass; a zero profile reports 0.
double pohozaev_residual(const Solution& sol, const KernelMoments& m);

/// Relative gap between two independently quadratured sides of
///   int x rho H(rho) dx = (d_alpha / 2) iint rho(x) |x-y|^{2 alpha} rho(y).
/// Left: outer per-cell Gauss x exact signed-kernel moments.  Right: outer
/// per-cell Gauss x exact absolute-kernel moments (half-line folding).
/// Pure hat densities (standalone density identity, no solver correction).
double double_integral_gap(const EvenProfile& rho, const KernelMoments& m);

/// Bilinear form iint_{R^2} rho(x) |x-y|^{2 alpha} rho(y) dx dy of an even
/// density (exact inner moments, Gauss outer).
double abs_kernel_bilinear(const KernelMoments& m, const EvenProfile& rho);

/// Reverse Hardy-Littlewood-Sobolev ratio at the conformal exponent
/// q = 1 / (1 + alpha):
///   [iint rho |x-y|^{2 alpha} rho] / [int rho^q]^{2/q}.
/// Invariant under amplitude scaling and dilation; must stay strictly
/// positive over symmetric-decreasing densities.  Rejects a zero density.
double reverse_hls_ratio(const EvenProfile& rho, const KernelMoments& m);

/// Quadratic form I[w] = 2 d_alpha iint_{(0,inf)^2} w(x) w(y) (x+y)^{2alpha-1}
/// computed two independent ways: directly (Gauss outer x exact inner
/// moments) and through the Laplace representation of the kernel
/// (the completely monotone factorization makes I a weighted L^2 norm of
/// the Laplace transform of w, hence nonnegative for any sign of w).
/// Returns {direct, laplace}.
std::pair<double, double> laplace_positivity(const CellDensity& w,
                                             const FractionalOrder& ord);
std::pair<double, double> laplace_positivity(const EvenProfile& w,
                                             const FractionalOrder& ord);

/// Least-squares fit of log(-log(v/v(0))) against log x on the window
/// [L/4, 3L/4]: v is modelled as v(0) exp(-d x^p), p expected near 2 alpha.
/// with_offset first removes the constant tail shift b/2,
/// b = c_alpha int |y|^{2 alpha} v^2 dy, which the cumulative exponent
/// integral leaves behind (the raw fit is biased by it).
struct DecayFit {
    double p = 0.0;  ///< fitted exponent
    double d = 0.0;  ///< fitted prefactor
    double b = 0.0;  ///< tail shift used when with_offset is set
    bool ok = false; ///< enough valid points in the window
};
DecayFit decay_exponent_fit(const EvenProfile& v, const FractionalOrder& ord,
                            bool with_offset = false);

/// Structural evenness (true by construction for half-grid storage,
/// recorded) and strict decrease of the samples up to rounding slack.
struct SymmetryFlags {
    bool even_ok = true;
    bool strictly_decreasing = false;
};
SymmetryFlags symmetry_monotonicity_check(const EvenProfile& u);

/// |mass(rescale(sol, mu)) / mass(sol) - mu^{2s-1}|; constant weight only.
double scaling_mass_check(const Solution& sol, double mu);

/// Aggregated certificate for one solution.  Checks run concurrently and
/// join deterministically; inapplicable checks are listed in `skipped`
/// with a reason.
struct VerificationReport {
    double pohozaev_residual_rel = 0.0;
    double double_integral_gap_rel = 0.0;
    double hls_ratio = 0.0;
    double laplace_min = 0.0;
    double laplace_route_gap = 0.0;
    double decay_exponent = 0.0;
    bool monotone_ok = false;
    bool even_ok = false;
    double scaling_mass_gap = 0.0;
    std::map<std::string, std::string> skipped;
};

VerificationReport verification_report(const Solution& sol,
                                       const KernelMoments& m);

std::string verification_report_json(const VerificationReport& rep);

} // namespace gelfand
