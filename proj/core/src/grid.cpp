#include "gelfand/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace gelfand {

std::vector<double> HalfGrid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
}

HalfGrid make_grid(double L, int n) {
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw InvalidParam("grid half-length L must be positive and finite");
    }
    if (n < 16) {
        throw InvalidParam("grid must have at least 16 cells, got " +
                           std::to_string(n));
    }
    HalfGrid g;
    g.L = L;
    g.n = n;
    g.h = L / static_cast<double>(n);
    return g;
}

void check_sizes(const HalfGrid& g, const std::vector<double>& samples,
                 const char* what) {
    if (samples.size() != static_cast<std::size_t>(g.n) + 1) {
        throw InvalidParam(std::string(what) + ": sample count " +
                           std::to_string(samples.size()) +
                           " does not match grid nodes " +
                           std::to_string(g.n + 1));
    }
}

double half_integral(const std::vector<double>& samples, const HalfGrid& g) {
    check_sizes(g, samples, "half_integral");
    double acc = 0.5 * (samples.front() + samples.back());
    for (int i = 1; i < g.n; ++i) acc += samples[static_cast<std::size_t>(i)];
    return acc * g.h;
}

double integrate(const EvenProfile& p) {
    return 2.0 * half_integral(p.samples, p.grid);
}

namespace {

XAlphaNorm norm_impl(const HalfGrid& g, const std::vector<double>& v,
                     const FractionalOrder& ord) {
    check_sizes(g, v, "xalpha_norm");
    const std::size_t m = v.size();
    std::vector<double> sq(m), wsq(m);
    double sup = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = std::fabs(v[i]);
        sup = std::max(sup, a);
        sq[i] = v[i] * v[i];
        wsq[i] = std::pow(g.x(static_cast<int>(i)), 2.0 * ord.alpha) * sq[i];
    }
    XAlphaNorm out;
    out.l2 = std::sqrt(2.0 * half_integral(sq, g));
    out.weighted_l2 = std::sqrt(2.0 * half_integral(wsq, g));
    out.sup = sup;
    out.total = out.l2 + out.weighted_l2 + out.sup;
    return out;
}

double interp_half(const HalfGrid& g, const std::vector<double>& v, double ax) {
    // ax >= 0; piecewise linear, zero beyond L.
    if (ax > g.L) return 0.0;
    const double t = ax / g.h;
    int c = static_cast<int>(t);
    if (c >= g.n) return v.back();
    const double frac = t - static_cast<double>(c);
    const std::size_t cc = static_cast<std::size_t>(c);
    return v[cc] * (1.0 - frac) + v[cc + 1] * frac;
}

std::string csv_impl(const HalfGrid& g, const std::vector<double>& v) {
    std::string out = "x,value\n";
    for (int i = 0; i <= g.n; ++i) {
        out += format_double(g.x(i));
        out += ',';
        out += format_double(v[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    return out;
}

std::string json_impl(const HalfGrid& g, const std::vector<double>& v,
                      const char* parity) {
    nlohmann::json j;
    j["grid"] = {{"L", g.L}, {"n", g.n}, {"h", g.h}};
    j["parity"] = parity;
    j["samples"] = v;
    return j.dump(2);
}

} // namespace

XAlphaNorm xalpha_norm(const EvenProfile& p, const FractionalOrder& ord) {
    return norm_impl(p.grid, p.samples, ord);
}

XAlphaNorm xalpha_norm(const OddProfile& p, const FractionalOrder& ord) {
    return norm_impl(p.grid, p.samples, ord);
}

double interp(const EvenProfile& p, double x) {
    check_sizes(p.grid, p.samples, "interp");
    return interp_half(p.grid, p.samples, std::fabs(x));
}

double interp(const OddProfile& p, double x) {
    check_sizes(p.grid, p.samples, "interp");
    const double val = interp_half(p.grid, p.samples, std::fabs(x));
    return x < 0.0 ? -val : val;
}

std::string profile_csv(const EvenProfile& p) {
    check_sizes(p.grid, p.samples, "profile_csv");
    return csv_impl(p.grid, p.samples);
}

std::string profile_csv(const OddProfile& p) {
    check_sizes(p.grid, p.samples, "profile_csv");
    return csv_impl(p.grid, p.samples);
}

std::string profile_json(const EvenProfile& p) {
    check_sizes(p.grid, p.samples, "profile_json");
    return json_impl(p.grid, p.samples, "even");
}

std::string profile_json(const OddProfile& p) {
    check_sizes(p.grid, p.samples, "profile_json");
    return json_impl(p.grid, p.samples, "odd");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace gelfand
