#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gelfand/params.hpp"

namespace gelfand {

/// Uniform half-line grid on [0, L]: n cells, n + 1 nodes, spacing h = L / n.
/// Profiles on the full line are stored on this half grid and extended by
/// parity, so node 0 always sits at the symmetry point x = 0.
struct HalfGrid {
    double L = 0.0;
    int n = 0;
    double h = 0.0;

    double x(int i) const { return h * static_cast<double>(i); }
    std::vector<double> nodes() const;
};

/// Build a half grid; requires L > 0 and n >= 16 (coarser grids cannot
/// resolve the kernel cusp at the origin and are rejected outright).
HalfGrid make_grid(double L, int n);

/// Samples of an even function at the n + 1 grid nodes (samples[0] is the
/// value at the symmetry point).
struct EvenProfile {
    HalfGrid grid;
    std::vector<double> samples;
};

/// Samples of an odd function at the n + 1 grid nodes; samples[0] must be 0.
struct OddProfile {
    HalfGrid grid;
    std::vector<double> samples;
};

/// Discrete norm pack for a profile v:
///   l2          = (integral of v^2)^{1/2}      (full line)
///   weighted_l2 = (integral of |x|^{2 alpha} v^2)^{1/2}
///   sup         = max |v|
///   total       = l2 + weighted_l2 + sup
/// Integrals are full-line trapezoid sums of the transformed samples
/// (exact for piecewise-linear integrands).
struct XAlphaNorm {
    double l2 = 0.0;
    double weighted_l2 = 0.0;
    double sup = 0.0;
    double total = 0.0;
};

/// Trapezoid integral over [0, L] of the raw samples.
double half_integral(const std::vector<double>& samples, const HalfGrid& g);

/// Full-line integral of an even profile (= 2 x half-line trapezoid).
double integrate(const EvenProfile& p);

XAlphaNorm xalpha_norm(const EvenProfile& p, const FractionalOrder& ord);
XAlphaNorm xalpha_norm(const OddProfile& p, const FractionalOrder& ord);

/// Piecewise-linear evaluation at an arbitrary real x using the parity
/// extension; returns 0 outside [-L, L].
double interp(const EvenProfile& p, double x);
double interp(const OddProfile& p, double x);

/// CSV serialization with header "x,value" (one row per node, doubles
/// printed with round-trip precision).
std::string profile_csv(const EvenProfile& p);
std::string profile_csv(const OddProfile& p);

/// JSON wrapper carrying grid metadata (L, n, h, parity) plus the samples.
std::string profile_json(const EvenProfile& p);
std::string profile_json(const OddProfile& p);

/// Round-trip decimal formatting used by every serializer ("%.17g").
std::string format_double(double v);

/// Throws InvalidParam unless samples.size() == n + 1.
void check_sizes(const HalfGrid& g, const std::vector<double>& samples,
                 const char* what);

} // namespace gelfand
