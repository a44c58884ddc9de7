#pragma once

#include <string>

#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"

namespace gelfand {

/// Even, positive, nonincreasing-in-|x| weight K in front of the
/// exponential nonlinearity.  Three parametric families are supported:
///   constant(c)            K = c
///   polynomial(a)          K = (1 + x^2)^{-a}
///   stretched_exp(beta,m)  K = exp(-beta |x|^{2m})
/// The Gaussian confinement factor exp(-sigma^2 x^2 / 2) is a separate
/// solver parameter, not a Weight, so it can be continued independently.
class Weight {
public:
    enum class Kind { constant, polynomial, stretched_exp };

    static Weight constant(double c);
    static Weight polynomial(double a);
    static Weight stretched_exp(double beta, double m);

    Kind kind() const { return kind_; }
    double param_c() const { return c_; }
    double param_a() const { return a_; }
    double param_beta() const { return beta_; }
    double param_m() const { return m_; }

    double value(double x) const;
    double sqrt_value(double x) const;
    /// (1/2) d/dx log K; the sign-carrying factor of the virial identity.
    double dlog_half(double x) const;

    std::string describe() const;

private:
    Weight() = default;
    Kind kind_ = Kind::constant;
    double c_ = 1.0, a_ = 0.0, beta_ = 0.0, m_ = 0.0;
};

/// Per-hypothesis admissibility report, sampled on a grid.  All shipped
/// kinds satisfy the hypotheses analytically except stretched_exp with
/// m <= 1/2, whose sqrt has an unbounded derivative at the origin; that case
/// is caught by the parameter gate rather than by sampling.
struct AssumptionReport {
    bool positive_ok = false;
    bool even_ok = false;          ///< structural (families are even by construction)
    bool monotone_ok = false;      ///< nonincreasing in |x| over the nodes
    bool dsqrt_bounded_ok = false; ///< derivative of sqrt(K) bounded
    bool sign_ok = false;          ///< x * dlog_half(x) <= 0 at the nodes
    bool admissible = false;       ///< conjunction of the above
    int first_violation = -1;      ///< node index of the first failure, or -1
    double sup_dsqrt = 0.0;        ///< sampled sup of |d/dx sqrt(K)|
    double argmax_dsqrt = 0.0;     ///< node where the sup is attained
};

AssumptionReport validate_assumption_a(const Weight& k, const HalfGrid& grid);

/// True when K decays slowly enough that exp(mu |x|) K is non-integrable for
/// every mu > 0 (the regime where symmetry of solutions is unconditional):
/// constant and polynomial always, stretched_exp only for m < 1/2.
bool slow_decay_class(const Weight& k);

} // namespace gelfand
