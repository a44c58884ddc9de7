#include "gelfand/weight.hpp"

#include <cmath>

namespace gelfand {

Weight Weight::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidParam("constant weight requires c > 0");
    }
    Weight k;
    k.kind_ = Kind::constant;
    k.c_ = c;
    return k;
}

Weight Weight::polynomial(double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw InvalidParam("polynomial weight requires a >= 0");
    }
    Weight k;
    k.kind_ = Kind::polynomial;
    k.a_ = a;
    return k;
}

Weight Weight::stretched_exp(double beta, double m) {
    if (!(beta > 0.0) || !(m > 0.0)) {
        throw InvalidParam("stretched_exp weight requires beta > 0 and m > 0");
    }
    Weight k;
    k.kind_ = Kind::stretched_exp;
    k.beta_ = beta;
    k.m_ = m;
    return k;
}

double Weight::value(double x) const {
    switch (kind_) {
        case Kind::constant:
            return c_;
        case Kind::polynomial:
            return std::pow(1.0 + x * x, -a_);
        case Kind::stretched_exp:
            return std::exp(-beta_ * std::pow(std::fabs(x), 2.0 * m_));
    }
    return 0.0;  // unreachable
}

double Weight::sqrt_value(double x) const { return std::sqrt(value(x)); }

double Weight::dlog_half(double x) const {
    switch (kind_) {
        case Kind::constant:
            return 0.0;
        case Kind::polynomial:
            return -a_ * x / (1.0 + x * x);
        case Kind::stretched_exp: {
            if (x == 0.0) return 0.0;  // symmetry point; limit is 0 for m > 1/2
            const double s = x > 0.0 ? 1.0 : -1.0;
            return -beta_ * m_ * std::pow(std::fabs(x), 2.0 * m_ - 1.0) * s;
        }
    }
    return 0.0;  // unreachable
}

std::string Weight::describe() const {
    switch (kind_) {
        case Kind::constant:
            return "constant(c=" + std::to_string(c_) + ")";
        case Kind::polynomial:
            return "polynomial(a=" + std::to_string(a_) + ")";
        case Kind::stretched_exp:
            return "stretched_exp(beta=" + std::to_string(beta_) +
                   ", m=" + std::to_string(m_) + ")";
    }
    return "";  // unreachable
}

AssumptionReport validate_assumption_a(const Weight& k, const HalfGrid& grid) {
    AssumptionReport rep;
    rep.even_ok = true;  // all families depend on |x| only
    rep.positive_ok = true;
    rep.monotone_ok = true;
    rep.sign_ok = true;

    double prev = k.value(0.0);
    if (!(prev > 0.0)) {
        rep.positive_ok = false;
        rep.first_violation = 0;
    }
    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.x(i);
        const double kv = k.value(x);
        if (!(kv > 0.0) && rep.positive_ok) {
            rep.positive_ok = false;
            if (rep.first_violation < 0) rep.first_violation = i;
        }
        if (i > 0 && kv > prev * (1.0 + 1e-14) && rep.monotone_ok) {
            rep.monotone_ok = false;
            if (rep.first_violation < 0) rep.first_violation = i;
        }
        prev = kv;
        const double ds = std::fabs(k.sqrt_value(x) * k.dlog_half(x));
        if (ds > rep.sup_dsqrt) {
            rep.sup_dsqrt = ds;
            rep.argmax_dsqrt = x;
        }
        if (x * k.dlog_half(x) > 1e-14 && rep.sign_ok) {
            rep.sign_ok = false;
            if (rep.first_violation < 0) rep.first_violation = i;
        }
    }
    // Boundedness of d/dx sqrt(K): analytic for constant and polynomial;
    // for stretched_exp it is exactly the m > 1/2 parameter gate (the
    // derivative scales like |x|^{2m-1} near the origin).
    rep.dsqrt_bounded_ok = (k.kind() != Weight::Kind::stretched_exp) ||
                           (k.param_m() > 0.5);
    if (!rep.dsqrt_bounded_ok && rep.first_violation < 0) rep.first_violation = 0;
    rep.admissible = rep.positive_ok && rep.even_ok && rep.monotone_ok &&
                     rep.dsqrt_bounded_ok && rep.sign_ok;
    return rep;
}

bool slow_decay_class(const Weight& k) {
    switch (k.kind()) {
        case Weight::Kind::constant:
        case Weight::Kind::polynomial:
            return true;
        case Weight::Kind::stretched_exp:
            return k.param_m() < 0.5;
    }
    return false;  // unreachable
}

} // namespace gelfand
