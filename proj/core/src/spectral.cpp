#include "gelfand/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace gelfand {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double pow3m2s(double m, double s) {
    return std::pow(std::fabs(m), 3.0 - 2.0 * s);
}

} // namespace

double gagliardo_gamma(int k, const FractionalOrder& ord) {
    const double s = ord.s;
    if (ord.oracle_endpoint) {
        // Classical -d^2/dx^2 stiffness band (times h, the caller applies
        // h^{1-2s} = 1/h).
        if (k == 0) return 2.0;
        if (k == 1) return -1.0;
        return 0.0;
    }
    const double kd = static_cast<double>(k);
    const double d4 = pow3m2s(kd - 2.0, s) - 4.0 * pow3m2s(kd - 1.0, s) +
                      6.0 * pow3m2s(kd, s) - 4.0 * pow3m2s(kd + 1.0, s) +
                      pow3m2s(kd + 2.0, s);
    return -(gamma_fn(2.0 * s - 3.0) * std::sin(kPi * s) / kPi) * d4;
}

GagliardoForm build_gagliardo(const HalfGrid& grid, const FractionalOrder& ord) {
    GagliardoForm g;
    g.half = grid;
    g.order = ord;
    g.size = 2 * grid.n + 1;
    g.h = grid.h;
    g.gamma.resize(static_cast<std::size_t>(g.size));
    const double scale = std::pow(grid.h, 1.0 - 2.0 * ord.s);
    for (int k = 0; k < g.size; ++k) {
        g.gamma[static_cast<std::size_t>(k)] = scale * gagliardo_gamma(k, ord);
    }
    return g;
}

MorseResult morse_index(const EvenProfile& u, const Weight& k,
                        const GagliardoForm& g, int n_lowest) {
    check_sizes(u.grid, u.samples, "morse_index");
    const int N = g.size;
    const double h = g.h;
    // Potential V = K e^u at the full-line nodes (evenly extended profile).
    std::vector<double> V(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double x = g.x(j);
        V[static_cast<std::size_t>(j)] = k.value(x) * std::exp(interp(u, x));
    }

    Eigen::MatrixXd A(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) A(i, j) = g.stiffness(i, j);
    }
    // Subtract the P1-exact weighted mass matrix of V (piecewise-linear V).
    for (int c = 0; c + 1 < N; ++c) {
        const double Va = V[static_cast<std::size_t>(c)];
        const double Vb = V[static_cast<std::size_t>(c) + 1];
        A(c, c) -= h * (Va / 4.0 + Vb / 12.0);
        A(c + 1, c + 1) -= h * (Va / 12.0 + Vb / 4.0);
        A(c, c + 1) -= h * (Va + Vb) / 12.0;
        A(c + 1, c) -= h * (Va + Vb) / 12.0;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) M(i, i) = 4.0 * h / 6.0;
    for (int i = 0; i + 1 < N; ++i) {
        M(i, i + 1) = h / 6.0;
        M(i + 1, i) = h / 6.0;
    }
    M(0, 0) = 2.0 * h / 6.0;
    M(N - 1, N - 1) = 2.0 * h / 6.0;

    // Dirichlet truncation: drop the boundary rows/columns.
    const int Ni = N - 2;
    const Eigen::MatrixXd Ai = A.block(1, 1, Ni, Ni);
    const Eigen::MatrixXd Mi = M.block(1, 1, Ni, Ni);

    MorseResult out;
    {
        // M is positive definite, so the pencil's negative count equals the
        // negative inertia of Ai (Sylvester).
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ai,
                                                          Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw std::runtime_error("morse_index: eigensolver failed");
        }
        const Eigen::VectorXd ev = es.eigenvalues();
        for (int i = 0; i < ev.size(); ++i) {
            if (ev[i] < 0.0) ++out.index;
        }
    }
    {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
            Ai, Mi, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
        if (ges.info() != Eigen::Success) {
            throw std::runtime_error("morse_index: pencil eigensolver failed");
        }
        const Eigen::VectorXd ev = ges.eigenvalues();
        const int count = std::min<int>(n_lowest, static_cast<int>(ev.size()));
        out.lowest.assign(ev.data(), ev.data() + count);
    }
    // Counting diagnostic || |x|^{2 alpha} V ||_{L1} + 1 (full line).
    {
        std::vector<double> wv(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j) {
            wv[static_cast<std::size_t>(j)] =
                std::pow(std::fabs(g.x(j)), 2.0 * g.order.alpha) *
                V[static_cast<std::size_t>(j)];
        }
        double acc = 0.5 * (wv.front() + wv.back());
        for (int j = 1; j + 1 < N; ++j) acc += wv[static_cast<std::size_t>(j)];
        out.bound_diag = acc * h + 1.0;
    }
    return out;
}

double kernel_residual_even(const Solution& sol, const KernelMoments& m,
                            const std::vector<double>* psi_override) {
    if (sol.params.weight.kind() != Weight::Kind::constant) {
        throw InvalidParam(
            "kernel_residual_even requires a constant weight (the kernel "
            "elements come from the translation/scaling symmetries)");
    }
    check_sizes(m.grid(), sol.v.samples, "kernel_residual_even");
    const int n = m.grid().n;
    const double s = sol.params.order.s;
    std::vector<double> rho(sol.v.samples.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = sol.v.samples[i] * sol.v.samples[i];
    }
    const EvenProfile rho_p{m.grid(), rho};
    std::vector<double> psi;
    if (psi_override) {
        psi = *psi_override;
        if (psi.size() != rho.size()) {
            throw InvalidParam("kernel_residual_even: psi size mismatch");
        }
    } else {
        const std::vector<double> H = conj_riesz(m, rho_p);
        psi.resize(rho.size());
        for (int i = 0; i <= n; ++i) {
            psi[static_cast<std::size_t>(i)] =
                -m.grid().x(i) * H[static_cast<std::size_t>(i)] + 2.0 * s;
        }
    }
    std::vector<double> rp(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rp[i] = rho[i] * psi[i];
    const std::vector<double> w = exponent_integral(m, EvenProfile{m.grid(), rp});
    double rsup = 0.0, psup = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (m.grid().x(i) > 0.5 * m.grid().L) break;
        const std::size_t k = static_cast<std::size_t>(i);
        rsup = std::max(rsup, std::fabs(psi[k] - w[k] - 2.0 * s));
        psup = std::max(psup, std::fabs(psi[k]));
    }
    return rsup / std::max(psup, 1e-300);
}

double kernel_residual_odd(const Solution& sol, const KernelMoments& m) {
    if (sol.params.weight.kind() != Weight::Kind::constant) {
        throw InvalidParam("kernel_residual_odd requires a constant weight");
    }
    check_sizes(m.grid(), sol.v.samples, "kernel_residual_odd");
    const int n = m.grid().n;
    std::vector<double> rho(sol.v.samples.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = sol.v.samples[i] * sol.v.samples[i];
    }
    // phi = du/dx = -H(v^2), odd with phi(0) = 0.
    const std::vector<double> H = conj_riesz(m, EvenProfile{m.grid(), rho});
    std::vector<double> phi(rho.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = -H[i];
    std::vector<double> rp(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rp[i] = rho[i] * phi[i];
    // Odd density rho*phi: cumulative via the odd fold.
    CellDensity cells;
    cells.grid = m.grid();
    cells.left.assign(rp.begin(), rp.end() - 1);
    cells.right.assign(rp.begin() + 1, rp.end());
    const std::vector<double> w = exponent_integral_odd(m, cells);
    double rsup = 0.0, psup = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (m.grid().x(i) > 0.5 * m.grid().L) break;
        const std::size_t k = static_cast<std::size_t>(i);
        rsup = std::max(rsup, std::fabs(phi[k] - w[k]));
        psup = std::max(psup, std::fabs(phi[k]));
    }
    return rsup / std::max(psup, 1e-300);
}

BirmanSchwinger birman_schwinger_odd(const Solution& sol,
                                     const KernelMoments& m) {
    if (sol.params.weight.kind() != Weight::Kind::constant) {
        throw InvalidParam("birman_schwinger_odd requires a constant weight");
    }
    check_sizes(m.grid(), sol.v.samples, "birman_schwinger_odd");
    const int n = m.grid().n;
    const std::size_t nn = static_cast<std::size_t>(n) + 1;
    const std::vector<double>& v = sol.v.samples;
    const double h = m.grid().h;
    const double sw = m.order().c_alpha * std::pow(h, 1.0 + 2.0 * m.order().alpha);

    // Product-integration kernel matrix B = c_a h^{1+2a} diag(v)(MP-MM)diag(v):
    // MP from reflected moments (|x+y| contribution), MM from direct ones.
    Eigen::MatrixXd B(static_cast<long>(nn), static_cast<long>(nn));
    B.setZero();
    for (int i = 0; i <= n; ++i) {
        for (int c = 0; c < n; ++c) {
            const double d0 = m.p0i(-(i + c)) - m.p0i(i - c);
            const double d1 = m.p1i(-(i + c)) - m.p1i(i - c);
            B(i, c) += d0;
            B(i, c + 1) += d1;
        }
    }
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            B(i, j) *= sw * v[static_cast<std::size_t>(i)] *
                       v[static_cast<std::size_t>(j)];
        }
    }

    // Symmetrize with trapezoid weights and diagonalize.
    std::vector<double> wq(nn, h);
    wq.front() = 0.5 * h;
    wq.back() = 0.5 * h;
    Eigen::MatrixXd Bs(static_cast<long>(nn), static_cast<long>(nn));
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            Bs(static_cast<long>(i), static_cast<long>(j)) =
                std::sqrt(wq[i]) * B(static_cast<long>(i), static_cast<long>(j)) /
                std::sqrt(wq[j]);
        }
    }
    Bs = 0.5 * (Bs + Bs.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bs);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("birman_schwinger_odd: eigensolver failed");
    }

    BirmanSchwinger out;
    const Eigen::VectorXd ev = es.eigenvalues();
    out.top = ev[static_cast<long>(nn) - 1];
    out.second = ev[static_cast<long>(nn) - 2];
    out.gap_rel = out.top != 0.0 ? (out.top - out.second) / out.top : 0.0;

    Eigen::VectorXd vec = es.eigenvectors().col(static_cast<long>(nn) - 1);
    std::vector<double> fn(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        fn[i] = vec[static_cast<long>(i)] / std::sqrt(wq[i]);
    }
    // Sign fix by the largest-magnitude entry.
    double big = 0.0;
    for (double f : fn) {
        if (std::fabs(f) > std::fabs(big)) big = f;
    }
    if (big < 0.0) {
        for (double& f : fn) f = -f;
    }
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = 0.0;
    bool pos = true, neg = true;
    for (std::size_t i = 1; i + 1 < nn; ++i) {
        pos = pos && fn[i] > 1e-14;
        neg = neg && fn[i] < -1e-14;
        fmin = std::min(fmin, fn[i]);
        fmax = std::max(fmax, std::fabs(fn[i]));
    }
    out.one_signed = pos || neg;
    out.fn_min_rel = fmax > 0.0 ? fmin / fmax : 0.0;

    // Known eigenfunction h = v H(v^2).
    std::vector<double> rho(nn);
    for (std::size_t i = 0; i < nn; ++i) rho[i] = v[i] * v[i];
    const std::vector<double> H = conj_riesz(m, EvenProfile{m.grid(), rho});
    Eigen::VectorXd hf(static_cast<long>(nn));
    double hsup = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        hf[static_cast<long>(i)] = v[i] * H[i];
        hsup = std::max(hsup, std::fabs(hf[static_cast<long>(i)]));
    }
    if (hsup > 0.0) {
        const Eigen::VectorXd r = B * hf - hf;
        out.h_residual = r.cwiseAbs().maxCoeff() / hsup;
        // Compare sup-normalized eigenfunction against sup-normalized h.
        double dev = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            dev = std::max(dev, std::fabs(fn[i] / fmax -
                                          hf[static_cast<long>(i)] / hsup));
        }
        out.eigfun_dev = dev;
    }
    return out;
}

double linearized_fixedpoint_spectrum(const Solution& sol,
                                      const KernelMoments& m) {
    check_sizes(m.grid(), sol.v.samples, "linearized_fixedpoint_spectrum");
    const std::size_t nn = sol.v.samples.size();
    const std::vector<double> W = weight_matrix(m, sol.curvature);
    const EvenProfile tv = apply_T(sol.v, sol.params, m, sol.curvature);
    Eigen::MatrixXd D(static_cast<long>(nn), static_cast<long>(nn));
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            D(static_cast<long>(i), static_cast<long>(j)) =
                tv.samples[i] * W[i * nn + j] * sol.v.samples[j];
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(D, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error(
            "linearized_fixedpoint_spectrum: eigensolver failed");
    }
    const Eigen::VectorXcd ev = es.eigenvalues();
    double dist = std::numeric_limits<double>::infinity();
    for (long i = 0; i < ev.size(); ++i) {
        dist = std::min(dist, std::abs(ev[i] - std::complex<double>(1.0, 0.0)));
    }
    return dist;
}

SpectralReport spectral_report(const Solution& sol, const KernelMoments& m) {
    SpectralReport rep;
    const GagliardoForm g = build_gagliardo(sol.grid, sol.params.order);
    rep.morse = morse_index(sol.u, sol.params.weight, g);
    if (sol.params.weight.kind() == Weight::Kind::constant) {
        rep.kernel_residual_even = kernel_residual_even(sol, m);
        rep.kernel_residual_odd = kernel_residual_odd(sol, m);
        rep.bs = birman_schwinger_odd(sol, m);
    }
    rep.linearized_distance = linearized_fixedpoint_spectrum(sol, m);
    return rep;
}

std::string spectral_report_json(const SpectralReport& rep) {
    nlohmann::json j;
    j["morse"] = {{"index", rep.morse.index},
                  {"lowest_eigenvalues", rep.morse.lowest},
                  {"bound_diag", rep.morse.bound_diag}};
    j["kernel_residual_even"] = rep.kernel_residual_even;
    j["kernel_residual_odd"] = rep.kernel_residual_odd;
    j["birman_schwinger"] = {{"top", rep.bs.top},
                             {"second", rep.bs.second},
                             {"gap_rel", rep.bs.gap_rel},
                             {"one_signed", rep.bs.one_signed},
                             {"fn_min_rel", rep.bs.fn_min_rel},
                             {"h_residual", rep.bs.h_residual},
                             {"eigfun_dev", rep.bs.eigfun_dev}};
    j["linearized_distance"] = rep.linearized_distance;
    return j.dump(2);
}

} // namespace gelfand
