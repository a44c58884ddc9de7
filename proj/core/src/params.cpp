#include "gelfand/params.hpp"

#include <cmath>

namespace gelfand {

namespace {

// Lanczos coefficients, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

constexpr double kPi = 3.141592653589793238462643383279502884;

double gamma_positive(double x) {
    // Valid for x >= 1/2.
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) {
        acc += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

} // namespace

double gamma_fn(double x) {
    if (x < 0.5) {
        // Reflection; the sine factor supplies the sign and the poles at
        // non-positive integers.
        const double s = std::sin(kPi * x);
        return kPi / (s * gamma_positive(1.0 - x));
    }
    return gamma_positive(x);
}

FractionalOrder make_order(double s) {
    if (!(s > 0.5) || !(s <= 1.0)) {
        throw InvalidParam("fractional order s must satisfy 1/2 < s <= 1, got " +
                           std::to_string(s));
    }
    FractionalOrder ord;
    ord.s = s;
    ord.alpha = s - 0.5;  // exact: s and 1/2 share a binary exponent range
    const double a = ord.alpha;
    // c_alpha = -pi^{-1/2} 2^{-2 alpha - 1} Gamma(-alpha) / Gamma(alpha + 1/2);
    // Gamma(-alpha) < 0 on (0, 1), so c_alpha > 0.
    ord.c_alpha = -std::pow(kPi, -0.5) * std::pow(2.0, -2.0 * a - 1.0) *
                  gamma_fn(-a) / gamma_fn(a + 0.5);
    ord.d_alpha = 2.0 * a * ord.c_alpha;
    ord.oracle_endpoint = (s == 1.0);
    if (ord.oracle_endpoint) {
        // Gamma(-s) has a pole at s = 1; the singular-integral constant
        // degenerates to 0 as the operator becomes the classical -d^2/dx^2.
        ord.big_C_s = 0.0;
    } else {
        ord.big_C_s = std::pow(4.0, s) * gamma_fn(0.5 + s) /
                      (std::sqrt(kPi) * std::fabs(gamma_fn(-s)));
    }
    ord.gamma_s = std::sqrt(kPi) * std::pow(2.0, s);
    return ord;
}

} // namespace gelfand
