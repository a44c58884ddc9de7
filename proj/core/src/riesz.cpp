#include "gelfand/riesz.hpp"

#include <cmath>
#include <cstddef>

#include "quad.hpp"

namespace gelfand {

namespace {

inline double sgn(double u) { return (u > 0.0) - (u < 0.0); }

// Primitive power integrals over [a, b] (all exponents strictly > 0 here,
// so pow(0, e) = 0 and no 0^0 arises):
//   A0 = int |u|^p du        A1 = int u |u|^p du       A2 = int u^2 |u|^p du
//   S0 = int sgn(u)|u|^p du  S1 = int |u|^{p+1} du     S2 = int u^2 sgn(u)|u|^p du
inline double A0(double a, double b, double p) {
    return (sgn(b) * std::pow(std::fabs(b), p + 1.0) -
            sgn(a) * std::pow(std::fabs(a), p + 1.0)) / (p + 1.0);
}
inline double A1(double a, double b, double p) {
    return (std::pow(std::fabs(b), p + 2.0) -
            std::pow(std::fabs(a), p + 2.0)) / (p + 2.0);
}
inline double A2(double a, double b, double p) {
    return (sgn(b) * std::pow(std::fabs(b), p + 3.0) -
            sgn(a) * std::pow(std::fabs(a), p + 3.0)) / (p + 3.0);
}
inline double S0(double a, double b, double p) {
    return (std::pow(std::fabs(b), p + 1.0) -
            std::pow(std::fabs(a), p + 1.0)) / (p + 1.0);
}
inline double S1(double a, double b, double p) {
    return (sgn(b) * std::pow(std::fabs(b), p + 2.0) -
            sgn(a) * std::pow(std::fabs(a), p + 2.0)) / (p + 2.0);
}
inline double S2(double a, double b, double p) {
    return (std::pow(std::fabs(b), p + 3.0) -
            std::pow(std::fabs(a), p + 3.0)) / (p + 3.0);
}

} // namespace

KernelMoments::KernelMoments(const HalfGrid& grid, const FractionalOrder& order)
    : grid_(grid), order_(order) {
    const double a = order_.alpha;
    scale_h_ = order_.d_alpha * std::pow(grid_.h, 2.0 * a);
    scale_w_ = order_.c_alpha * std::pow(grid_.h, 1.0 + 2.0 * a);
    const int n = grid_.n;
    const std::size_t count = static_cast<std::size_t>(3 * n) + 1;  // q in [-2n, n]
    tp0_.resize(count);
    tp1_.resize(count);
    tq0_.resize(count);
    tq1_.resize(count);
    tpb_.resize(count);
    tqb_.resize(count);
    for (int q = -2 * n; q <= n; ++q) {
        const double qd = static_cast<double>(q);
        const std::size_t k = idx(q);
        tp0_[k] = P0(qd);
        tp1_[k] = P1(qd);
        tq0_[k] = Q0(qd);
        tq1_[k] = Q1(qd);
        tpb_[k] = PB(qd);
        tqb_[k] = QB(qd);
    }
}

double KernelMoments::P0(double q) const {
    const double p = 2.0 * order_.alpha;
    const double a = q - 1.0, b = q;
    return (1.0 - q) * A0(a, b, p) + A1(a, b, p);
}
double KernelMoments::P1(double q) const {
    const double p = 2.0 * order_.alpha;
    const double a = q - 1.0, b = q;
    return q * A0(a, b, p) - A1(a, b, p);
}
double KernelMoments::Q0(double q) const {
    const double p = 2.0 * order_.alpha - 1.0;
    const double a = q - 1.0, b = q;
    return (1.0 - q) * S0(a, b, p) + S1(a, b, p);
}
double KernelMoments::Q1(double q) const {
    const double p = 2.0 * order_.alpha - 1.0;
    const double a = q - 1.0, b = q;
    return q * S0(a, b, p) - S1(a, b, p);
}
double KernelMoments::PB(double q) const {
    const double p = 2.0 * order_.alpha;
    const double a = q - 1.0, b = q;
    return (q - q * q) * A0(a, b, p) + (2.0 * q - 1.0) * A1(a, b, p) -
           A2(a, b, p);
}
double KernelMoments::QB(double q) const {
    const double p = 2.0 * order_.alpha - 1.0;
    const double a = q - 1.0, b = q;
    return (q - q * q) * S0(a, b, p) + (2.0 * q - 1.0) * S1(a, b, p) -
           S2(a, b, p);
}

CellDensity to_cells(const EvenProfile& p) {
    check_sizes(p.grid, p.samples, "to_cells");
    CellDensity cells;
    cells.grid = p.grid;
    const std::size_t n = static_cast<std::size_t>(p.grid.n);
    cells.left.assign(p.samples.begin(), p.samples.begin() + static_cast<long>(n));
    cells.right.assign(p.samples.begin() + 1, p.samples.end());
    return cells;
}

namespace {

void check_cells(const KernelMoments& mom, const CellDensity& f,
                 const char* what) {
    const std::size_t n = static_cast<std::size_t>(mom.grid().n);
    if (f.left.size() != n || f.right.size() != n) {
        throw InvalidParam(std::string(what) + ": cell density size mismatch");
    }
    if (f.grid.n != mom.grid().n || f.grid.L != mom.grid().L) {
        throw InvalidParam(std::string(what) + ": density grid differs from moment grid");
    }
}

// Shared kernel-sum skeleton: reflected contribution enters with sign
// +1 (odd extension) or -1 (even extension) for the signed kernel.
std::vector<double> conj_riesz_impl(const KernelMoments& mom,
                                    const CellDensity& f, double refl) {
    check_cells(mom, f, "conj_riesz");
    const int n = mom.grid().n;
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) {
            const double w0 = mom.q0i(i - c) + refl * mom.q0i(-(i + c));
            const double w1 = mom.q1i(i - c) + refl * mom.q1i(-(i + c));
            acc += f.left[static_cast<std::size_t>(c)] * w0 +
                   f.right[static_cast<std::size_t>(c)] * w1;
        }
        out[static_cast<std::size_t>(i)] = acc * mom.scale_h();
    }
    return out;
}

} // namespace

std::vector<double> conj_riesz(const KernelMoments& mom, const CellDensity& f) {
    return conj_riesz_impl(mom, f, -1.0);
}

std::vector<double> conj_riesz(const KernelMoments& mom, const EvenProfile& f) {
    return conj_riesz_impl(mom, to_cells(f), -1.0);
}

std::vector<double> conj_riesz_odd(const KernelMoments& mom,
                                   const CellDensity& f) {
    return conj_riesz_impl(mom, f, +1.0);
}

std::vector<double> exponent_integral(const KernelMoments& mom,
                                      const CellDensity& rho,
                                      const std::vector<double>* bubble) {
    check_cells(mom, rho, "exponent_integral");
    const int n = mom.grid().n;
    if (bubble && bubble->size() != static_cast<std::size_t>(n)) {
        throw InvalidParam("exponent_integral: bubble coefficient count mismatch");
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) {
            const double w0 =
                mom.p0i(i - c) + mom.p0i(-(i + c)) - 2.0 * mom.p0i(-c);
            const double w1 =
                mom.p1i(i - c) + mom.p1i(-(i + c)) - 2.0 * mom.p1i(-c);
            acc += rho.left[static_cast<std::size_t>(c)] * w0 +
                   rho.right[static_cast<std::size_t>(c)] * w1;
            if (bubble) {
                const double wb =
                    mom.pbi(i - c) + mom.pbi(-(i + c)) - 2.0 * mom.pbi(-c);
                acc += (*bubble)[static_cast<std::size_t>(c)] * wb;
            }
        }
        out[static_cast<std::size_t>(i)] = -acc * mom.scale_w();
    }
    return out;
}

std::vector<double> exponent_integral(const KernelMoments& mom,
                                      const EvenProfile& rho,
                                      const std::vector<double>* bubble) {
    return exponent_integral(mom, to_cells(rho), bubble);
}

std::vector<double> exponent_integral_odd(const KernelMoments& mom,
                                          const CellDensity& g) {
    check_cells(mom, g, "exponent_integral_odd");
    const int n = mom.grid().n;
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) {
            const double w0 = mom.p0i(i - c) - mom.p0i(-(i + c));
            const double w1 = mom.p1i(i - c) - mom.p1i(-(i + c));
            acc += g.left[static_cast<std::size_t>(c)] * w0 +
                   g.right[static_cast<std::size_t>(c)] * w1;
        }
        out[static_cast<std::size_t>(i)] = -acc * mom.scale_w();
    }
    return out;
}

std::vector<double> second_diffs(const std::vector<double>& rho) {
    const std::size_t m = rho.size();
    if (m < 3) throw InvalidParam("second_diffs: need at least 3 samples");
    const std::size_t n = m - 1;
    std::vector<double> d2(m);
    for (std::size_t i = 1; i < n; ++i) {
        d2[i] = rho[i - 1] - 2.0 * rho[i] + rho[i + 1];
    }
    d2[0] = 2.0 * (rho[1] - rho[0]);  // even reflection across x = 0
    d2[n] = d2[n - 1];                // one-sided copy at the outer edge
    std::vector<double> bc(n);
    for (std::size_t c = 0; c < n; ++c) {
        bc[c] = -0.25 * (d2[c] + d2[c + 1]);  // cell average, times -1/2
    }
    return bc;
}

namespace {

double h_at_impl(const KernelMoments& mom, const double* left,
                 const double* right, const std::vector<double>* bubble,
                 double xq) {
    const int n = mom.grid().n;
    const double q = xq / mom.grid().h;
    double acc = 0.0;
    for (int c = 0; c < n; ++c) {
        const double cd = static_cast<double>(c);
        acc += left[c] * (mom.Q0(q - cd) - mom.Q0(-(q + cd))) +
               right[c] * (mom.Q1(q - cd) - mom.Q1(-(q + cd)));
        if (bubble) {
            acc += (*bubble)[static_cast<std::size_t>(c)] *
                   (mom.QB(q - cd) - mom.QB(-(q + cd)));
        }
    }
    return acc * mom.scale_h();
}

} // namespace

double h_at(const KernelMoments& mom, const std::vector<double>& rho,
            const std::vector<double>* bubble, double xq) {
    check_sizes(mom.grid(), rho, "h_at");
    // Continuous nodal density: left = rho[c], right = rho[c+1].
    return h_at_impl(mom, rho.data(), rho.data() + 1, bubble, xq);
}

std::vector<double> weight_matrix(const KernelMoments& mom, bool with_bubble) {
    const int n = mom.grid().n;
    const std::size_t nn = static_cast<std::size_t>(n) + 1;
    const double sw = mom.scale_w();
    std::vector<double> W(nn * nn, 0.0);
    for (int i = 0; i <= n; ++i) {
        double* row = W.data() + static_cast<std::size_t>(i) * nn;
        for (int c = 0; c < n; ++c) {
            const double w0 =
                mom.p0i(i - c) + mom.p0i(-(i + c)) - 2.0 * mom.p0i(-c);
            const double w1 =
                mom.p1i(i - c) + mom.p1i(-(i + c)) - 2.0 * mom.p1i(-c);
            row[c] -= sw * w0;
            row[c + 1] -= sw * w1;
        }
    }
    if (!with_bubble) return W;

    // Bubble block: WB[i][c] maps cell coefficients to nodal corrections;
    // compose with the (sparse) linear map rho -> second_diffs(rho).
    std::vector<double> WB(nn * static_cast<std::size_t>(n));
    for (int i = 0; i <= n; ++i) {
        double* row = WB.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
        for (int c = 0; c < n; ++c) {
            row[c] = -sw * (mom.pbi(i - c) + mom.pbi(-(i + c)) - 2.0 * mom.pbi(-c));
        }
    }
    std::vector<double> unit(nn, 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
        unit[j] = 1.0;
        const std::vector<double> col = second_diffs(unit);
        unit[j] = 0.0;
        for (int c = 0; c < n; ++c) {
            const double s = col[static_cast<std::size_t>(c)];
            if (s == 0.0) continue;
            for (std::size_t i = 0; i < nn; ++i) {
                W[i * nn + j] += WB[i * static_cast<std::size_t>(n) +
                                    static_cast<std::size_t>(c)] * s;
            }
        }
    }
    return W;
}

double consistency_gap(const KernelMoments& mom, const CellDensity& rho) {
    check_cells(mom, rho, "consistency_gap");
    const int n = mom.grid().n;
    const double h = mom.grid().h;
    const std::vector<double> w = exponent_integral(mom, rho, nullptr);
    const auto rule = quad::gl16();
    double cum = 0.0;
    double gap = std::fabs(w[0]);  // w(0) must vanish
    for (int c = 0; c < n; ++c) {
        cum += quad::integrate(rule, h * c, h * (c + 1), [&](double t) {
            return h_at_impl(mom, rho.left.data(), rho.right.data(), nullptr, t);
        });
        const double g = std::fabs(w[static_cast<std::size_t>(c) + 1] + cum);
        if (g > gap) gap = g;
    }
    return gap;
}

double consistency_gap(const KernelMoments& mom, const EvenProfile& rho) {
    return consistency_gap(mom, to_cells(rho));
}

std::string row_sums_csv(const KernelMoments& mom) {
    const int n = mom.grid().n;
    CellDensity ones;
    ones.grid = mom.grid();
    ones.left.assign(static_cast<std::size_t>(n), 1.0);
    ones.right.assign(static_cast<std::size_t>(n), 1.0);
    const std::vector<double> hs = conj_riesz(mom, ones);
    const std::vector<double> ws = exponent_integral(mom, ones, nullptr);
    std::string out = "i,h_row_sum,w_row_sum\n";
    for (int i = 0; i <= n; ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(hs[static_cast<std::size_t>(i)]);
        out += ',';
        out += format_double(ws[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    return out;
}

} // namespace gelfand
