#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

/// Error raised for invalid parameters (bad fractional order, malformed
/// weights, inconsistent grids).  Distinct from SolveError so callers can
/// map the two onto different process exit codes.
class InvalidParam : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Gamma function on the real line (Lanczos approximation, g = 7, 9 terms,
/// reflection for arguments below 1/2).  Accurate to ~1e-14 relative error
/// away from the poles at 0, -1, -2, ...
double gamma_fn(double x);

/// Derived constants for a fractional order s in (1/2, 1].
///
/// alpha = s - 1/2 is the half-line kernel exponent.  c_alpha scales the
/// absolute-value kernel |x - y|^{2 alpha}, d_alpha = 2 alpha c_alpha scales
/// the signed kernel sgn(x - y) |x - y|^{2 alpha - 1}, and big_C_s is the
/// singular-integral normalization of the fractional Laplacian (it vanishes
/// in the local limit s = 1, where the classical second derivative takes
/// over; oracle_endpoint marks that case so downstream code can switch to
/// closed-form references).
struct FractionalOrder {
    double s = 0.0;
    double alpha = 0.0;        ///< s - 1/2, exact in binary arithmetic
    double c_alpha = 0.0;      ///< |x-y|^{2 alpha} kernel constant
    double d_alpha = 0.0;      ///< signed-kernel constant, = 2 alpha c_alpha
    double big_C_s = 0.0;      ///< fractional-Laplacian normalization
    double gamma_s = 0.0;      ///< diagnostic scale sqrt(pi) 2^s
    bool oracle_endpoint = false;  ///< true exactly at s = 1
};

/// Build the constant pack for order s.  Throws InvalidParam unless
/// 1/2 < s <= 1.
FractionalOrder make_order(double s);

} // namespace gelfand
