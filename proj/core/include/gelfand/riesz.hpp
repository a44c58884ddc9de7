#pragma once

#include <string>
#include <vector>

#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"

namespace gelfand {

/// Cell-wise linear density on the half grid: independent values at the left
/// and right edge of each of the n cells.  This representation admits jump
/// discontinuities (needed for the exact box oracles); a continuous nodal
/// profile is the special case right[c] == left[c+1].
struct CellDensity {
    HalfGrid grid;
    std::vector<double> left;   ///< size n
    std::vector<double> right;  ///< size n
};

/// View a nodal even profile as a continuous cell density.
CellDensity to_cells(const EvenProfile& p);

/// Exact moments of the two kernels against the linear shape functions of a
/// unit cell.  For a cell [0,1] in local coordinates and a target point at
/// offset q (in cell units, measured from the cell's left edge):
///
///   P0(q) = int_0^1 (1-t) |q-t|^{2 alpha}          dt
///   P1(q) = int_0^1   t   |q-t|^{2 alpha}          dt
///   Q0(q) = int_0^1 (1-t) sgn(q-t) |q-t|^{2 alpha - 1} dt
///   Q1(q) = int_0^1   t   sgn(q-t) |q-t|^{2 alpha - 1} dt
///
/// PB / QB are the same moments against the cell bubble t (1-t), used by the
/// curvature correction.  All six are closed-form power integrals, exact up
/// to rounding, including cells containing or touching the singularity.
///
/// The integer-offset tables cache the values needed by the nodal operators
/// (offsets q in [-2n, n]); real-offset evaluation is available for
/// off-node targets.  scale_h and scale_w are the physical prefactors
/// d_alpha h^{2 alpha} and c_alpha h^{1 + 2 alpha}.
class KernelMoments {
public:
    KernelMoments(const HalfGrid& grid, const FractionalOrder& order);

    const HalfGrid& grid() const { return grid_; }
    const FractionalOrder& order() const { return order_; }
    double scale_h() const { return scale_h_; }
    double scale_w() const { return scale_w_; }

    // Real-offset closed forms.
    double P0(double q) const;
    double P1(double q) const;
    double Q0(double q) const;
    double Q1(double q) const;
    double PB(double q) const;
    double QB(double q) const;

    // Cached integer-offset lookups, valid for q in [-2n, n].
    double p0i(int q) const { return tp0_[idx(q)]; }
    double p1i(int q) const { return tp1_[idx(q)]; }
    double q0i(int q) const { return tq0_[idx(q)]; }
    double q1i(int q) const { return tq1_[idx(q)]; }
    double pbi(int q) const { return tpb_[idx(q)]; }
    double qbi(int q) const { return tqb_[idx(q)]; }

private:
    std::size_t idx(int q) const {
        return static_cast<std::size_t>(q + 2 * grid_.n);
    }

    HalfGrid grid_;
    FractionalOrder order_;
    double scale_h_ = 0.0;
    double scale_w_ = 0.0;
    std::vector<double> tp0_, tp1_, tq0_, tq1_, tpb_, tqb_;
};

/// Signed-kernel potential of the even extension of f:
///   (H f)(x_i) = d_alpha int_R sgn(x_i - y) |x_i - y|^{2 alpha - 1} f(y) dy,
/// exact for the cell-linear density.  Output is odd (vanishes at node 0).
std::vector<double> conj_riesz(const KernelMoments& mom, const CellDensity& f);
std::vector<double> conj_riesz(const KernelMoments& mom, const EvenProfile& f);

/// Same potential for the odd extension of f (samples give f on x >= 0).
std::vector<double> conj_riesz_odd(const KernelMoments& mom,
                                   const CellDensity& f);

/// Cumulative exponent integral of an even density rho:
///   w(x_i) = -c_alpha int_R (|x_i - y|^{2 alpha} - |y|^{2 alpha}) rho(y) dy
///          = -int_0^{x_i} (H rho)(t) dt,
/// exact for the cell-linear density.  When bubble coefficients are supplied
/// (one per cell, from second_diffs), the density is enriched by the cell
/// bubbles b_c t (1 - t) and the moments stay exact.
std::vector<double> exponent_integral(const KernelMoments& mom,
                                      const CellDensity& rho,
                                      const std::vector<double>* bubble = nullptr);
std::vector<double> exponent_integral(const KernelMoments& mom,
                                      const EvenProfile& rho,
                                      const std::vector<double>* bubble = nullptr);

/// Cumulative exponent integral of an odd density g (samples on x >= 0):
///   w(x_i) = -c_alpha int_R |x_i - y|^{2 alpha} g(y) dy
///          = -int_0^{x_i} (H g)(t) dt,
/// using the odd fold (the |y|^{2 alpha} counter-term integrates to zero
/// against an odd density).  Output is even.
std::vector<double> exponent_integral_odd(const KernelMoments& mom,
                                          const CellDensity& g);

/// Per-cell bubble coefficients b_c = -(second difference)/2 reproducing the
/// local curvature of nodal samples (even reflection across x = 0; the last
/// cell copies its neighbour).  Linear in rho; length n.
std::vector<double> second_diffs(const std::vector<double>& rho);

/// Signed-kernel potential of the (hat + optional bubble) even density at an
/// arbitrary point xq >= 0, via real-offset closed-form moments.
double h_at(const KernelMoments& mom, const std::vector<double>& rho,
            const std::vector<double>* bubble, double xq);

/// Dense matrix W (row-major, (n+1) x (n+1)) with W rho = exponent_integral;
/// with_bubble folds the curvature correction (composed with second_diffs)
/// into the matrix, keeping the map exactly linear.
std::vector<double> weight_matrix(const KernelMoments& mom, bool with_bubble);

/// Largest discrepancy over the nodes between the cumulative exponent
/// integral and the directly integrated signed-kernel potential,
///   max_i | w(x_i) + int_0^{x_i} (H rho)(t) dt |,
/// with the cumulative evaluated by per-cell 16-point Gauss quadrature of
/// the exact in-cell potential.  Pure consistency diagnostic of the two
/// kernel routes (no curvature correction on either side).
double consistency_gap(const KernelMoments& mom, const CellDensity& rho);
double consistency_gap(const KernelMoments& mom, const EvenProfile& rho);

/// Diagnostic dump: potentials of the all-ones density at every node, CSV
/// with header "i,h_row_sum,w_row_sum".
std::string row_sums_csv(const KernelMoments& mom);

} // namespace gelfand
