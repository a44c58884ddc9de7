#pragma once

#include <string>
#include <vector>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"
#include "gelfand/weight.hpp"

namespace gelfand {

/// Galerkin P1 discretization of the fractional Dirichlet form on the full
/// symmetric grid [-L, L] with zero exterior extension:
///   S_ij = (C_s/2) iint (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) / |x-y|^{1+2s}.
/// For a uniform hat basis the entries are Toeplitz, S_ij = h^{1-2s}
/// gamma(|i-j|), with gamma given by a closed-form fourth difference of
/// |m|^{3-2s} (the double integral has an analytic antiderivative; the
/// difference structure cancels the hypersingularity).  At s = 1 the form
/// degenerates to the classical second-difference stiffness (oracle mode).
/// M is the standard P1 mass matrix.
struct GagliardoForm {
    HalfGrid half;               ///< generating half grid; full grid is its reflection
    FractionalOrder order;
    int size = 0;                ///< N = 2 n + 1 full-line nodes
    std::vector<double> gamma;   ///< Toeplitz stiffness band, entries k = 0..N-1
    double h = 0.0;

    double stiffness(int i, int j) const {
        return gamma[static_cast<std::size_t>(i > j ? i - j : j - i)];
    }
    /// Full-line node coordinate, j = 0..N-1.
    double x(int j) const { return -half.L + h * static_cast<double>(j); }
};

GagliardoForm build_gagliardo(const HalfGrid& grid, const FractionalOrder& ord);

/// Closed-form Toeplitz coefficient gamma(k) (already includes the
/// normalization C_s; multiply by h^{1-2s} for physical scale).  Exposed for
/// oracle cross-checks against direct singular integration.
double gagliardo_gamma(int k, const FractionalOrder& ord);

/// Morse data of L = (-Delta)^s - V with V = K e^u (= v^2 at a solution):
/// negative-eigenvalue count of the Dirichlet pencil (S - B_V, M), the
/// lowest generalized eigenvalues, and the paper-style counting diagnostic
/// || |x|^{2 alpha} V ||_{L1} + 1 (a sanity ceiling, not a bound used for
/// assertions).
struct MorseResult {
    int index = 0;
    std::vector<double> lowest;   ///< smallest generalized eigenvalues
    double bound_diag = 0.0;
};

MorseResult morse_index(const EvenProfile& u, const Weight& k,
                        const GagliardoForm& g, int n_lowest = 6);

/// Residual of the even-sector kernel equation for psi = x du/dx + 2s:
///   psi(x) + int_0^x H(v^2 psi) - psi(0) = 0,  psi(0) = 2s,
/// evaluated on the nodes and normalized by sup |psi| over |x| <= L/2 (the
/// window avoids truncation pollution).  psi_override substitutes a generic
/// profile (negative controls); pass nullptr for the kernel element itself.
double kernel_residual_even(const Solution& sol, const KernelMoments& m,
                            const std::vector<double>* psi_override = nullptr);

/// Same residual for the odd-sector element phi = du/dx (phi(0) = 0), using
/// the odd-fold cumulative operator.
double kernel_residual_odd(const Solution& sol, const KernelMoments& m);

/// Birman-Schwinger operator in the odd sector,
///   (A f)(x) = c_alpha v(x) int_0^inf (|x+y|^{2a} - |x-y|^{2a}) v(y) f(y) dy,
/// discretized by cell-exact product integration and symmetrized with
/// trapezoid weights.  At a solution the top eigenvalue is 1 (simple), the
/// eigenfunction is one-signed (Perron-Frobenius) and proportional to
/// h = v H(v^2).
struct BirmanSchwinger {
    double top = 0.0;            ///< largest eigenvalue
    double second = 0.0;
    double gap_rel = 0.0;        ///< (top - second) / top
    bool one_signed = false;     ///< eigenfunction sign pattern on interior nodes
    double fn_min_rel = 0.0;     ///< min/max of the sign-fixed interior eigenfunction
    double h_residual = 0.0;     ///< sup |A h - h| / sup |h| for h = v H(v^2)
    double eigfun_dev = 0.0;     ///< sup deviation of eigenfunction from normalized h
};

BirmanSchwinger birman_schwinger_odd(const Solution& sol,
                                     const KernelMoments& m);

/// Nondegeneracy of the fixed point: eigenvalues of the dense linearization
/// D_vT (even sector, same map variant the solution converged with) must
/// stay away from 1.  Returns min |eig - 1|.
double linearized_fixedpoint_spectrum(const Solution& sol,
                                      const KernelMoments& m);

/// Aggregate spectral certificate.
struct SpectralReport {
    MorseResult morse;
    double kernel_residual_even = 0.0;
    double kernel_residual_odd = 0.0;
    BirmanSchwinger bs;
    double linearized_distance = 0.0;
};

SpectralReport spectral_report(const Solution& sol, const KernelMoments& m);

std::string spectral_report_json(const SpectralReport& rep);

} // namespace gelfand
