#pragma once

// Internal Gauss-Legendre rules on [-1, 1] shared by the kernel and
// verification quadratures.  Standard abscissas/weights, full double
// precision; only the nonnegative half is stored (rules are symmetric).

#include <array>
#include <cstddef>

namespace gelfand::quad {

struct Rule {
    const double* x;  // nonnegative abscissas, ascending
    const double* w;  // matching weights
    int half;         // number of stored pairs; full rule has 2*half points
};

inline constexpr std::array<double, 6> kGL12X = {
    0.12523340851146891, 0.36783149899818019, 0.58731795428661745,
    0.76990267419430469, 0.90411725637047486, 0.98156063424671925,
};
inline constexpr std::array<double, 6> kGL12W = {
    0.24914704581340277, 0.23349253653835481, 0.20316742672306592,
    0.16007832854334622, 0.10693932599531843, 0.047175336386511827,
};

inline constexpr std::array<double, 8> kGL16X = {
    0.095012509837637440185, 0.28160355077925891323, 0.45801677765722738634,
    0.61787624440264374845,  0.75540440835500303390, 0.86563120238783174388,
    0.94457502307323257608,  0.98940093499164993260,
};
inline constexpr std::array<double, 8> kGL16W = {
    0.18945061045506849629,  0.18260341504492358887, 0.16915651939500253819,
    0.14959598881657673208,  0.12462897125553387205, 0.095158511682492784810,
    0.062253523938647892863, 0.027152459411754094852,
};

inline Rule gl12() { return {kGL12X.data(), kGL12W.data(), 6}; }
inline Rule gl16() { return {kGL16X.data(), kGL16W.data(), 8}; }

/// Integrate f over [a, b] with the given rule.
template <typename F>
double integrate(const Rule& r, double a, double b, F&& f) {
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < r.half; ++k) {
        acc += r.w[k] * (f(mid + rad * r.x[k]) + f(mid - rad * r.x[k]));
    }
    return acc * rad;
}

/// Fill node/weight arrays for [a, b] (2 * half entries each).
template <typename OutIt>
void nodes(const Rule& r, double a, double b, OutIt xs, OutIt ws) {
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    for (int k = 0; k < r.half; ++k) {
        *xs++ = mid - rad * r.x[r.half - 1 - k];
        *ws++ = rad * r.w[r.half - 1 - k];
    }
    for (int k = 0; k < r.half; ++k) {
        *xs++ = mid + rad * r.x[k];
        *ws++ = rad * r.w[k];
    }
}

} // namespace gelfand::quad
