// Command-line front end for the fractional Gelfand profile library.
//
// Subcommands:
//   solve      one fixed-point solve; writes profile.csv + diagnostics.json
//   continue   homotopy in sigma (down to 0) or lambda; writes branch.csv
//   verify     certificate suite on a fresh or stored profile; verify.json
//   spectrum   spectral certificate only; spectral.json
//   sweep      cartesian parameter sweep; sweep.csv
//   oracle     closed-form oracle comparisons; oracle.json
//
// Exit codes: 0 success, 1 invalid input, 2 non-convergence, 3 weight
// hypothesis violation, 4 grid policy exhausted, 5 failed verification.
//
// Every output embeds the resolved configuration and the library version
// ("# config {...}" preamble in CSV, "config" object in JSON); identical
// configuration and seed reproduce outputs bit for bit.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gelfand/continuation.hpp"
#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"
#include "gelfand/spectral.hpp"
#include "gelfand/verify.hpp"
#include "gelfand/version.hpp"
#include "gelfand/weight.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    double s = 0.75;
    double lambda = 1.0;
    double sigma = 0.0;
    std::string weight = "const";
    double K = 1.0;
    double a = 1.0;
    double beta = 1.0;
    double m = 1.0;
    int n = 1024;
    std::string L = "auto";
    double tol = 1e-12;
    int max_iter = 600;
    int anderson = 5;
    double damping = 1.0;
    bool newton = true;
    bool curvature = true;
    std::string out = ".";
    unsigned seed = 0;
    std::string config_file;
    // continue
    double lambda_to = 0.0;     // 0 = sigma homotopy instead
    // verify
    std::string profile;        // stored profile to verify (empty = fresh solve)
    int probe = 0;              // uniqueness probe starts (0 = off)
    bool spectral = true;
    // sweep
    std::vector<double> s_list, lambda_list, sigma_list;
    bool via_continuation = false;
};

// ---------------------------------------------------------------- helpers

double resolve_L(const RunConfig& c) {
    if (c.L == "auto") {
        // Wider boxes for fatter stretched-exponential tails (p = 2s-1).
        return c.s >= 0.85 ? 30.0 : (c.s >= 0.7 ? 40.0 : 60.0);
    }
    return std::stod(c.L);
}

gelfand::Weight make_weight(const RunConfig& c) {
    if (c.weight == "const") return gelfand::Weight::constant(c.K);
    if (c.weight == "poly") return gelfand::Weight::polynomial(c.a);
    if (c.weight == "stretched_exp") {
        return gelfand::Weight::stretched_exp(c.beta, c.m);
    }
    throw gelfand::InvalidParam("unknown weight kind: " + c.weight);
}

gelfand::SolveOptions make_options(const RunConfig& c) {
    gelfand::SolveOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.anderson_depth = c.anderson;
    o.damping = c.damping;
    o.newton = c.newton;
    o.curvature = c.curvature;
    o.adapt_tail = (c.L == "auto");
    return o;
}

json resolved_config(const RunConfig& c, const std::string& cmd) {
    json j;
    j["command"] = cmd;
    j["version"] = gelfand::kVersion;
    j["s"] = c.s;
    j["lambda"] = c.lambda;
    j["sigma"] = c.sigma;
    j["weight"] = c.weight;
    j["K"] = c.K;
    j["a"] = c.a;
    j["beta"] = c.beta;
    j["m"] = c.m;
    j["n"] = c.n;
    j["L"] = c.L;
    j["L_resolved"] = resolve_L(c);
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
    j["anderson"] = c.anderson;
    j["damping"] = c.damping;
    j["newton"] = c.newton;
    j["curvature"] = c.curvature;
    j["seed"] = c.seed;
    j["out"] = c.out;
    if (cmd == "continue") j["lambda_to"] = c.lambda_to;
    if (cmd == "verify") {
        j["profile"] = c.profile;
        j["probe"] = c.probe;
        j["spectral"] = c.spectral;
    }
    if (cmd == "sweep") {
        j["s_list"] = c.s_list;
        j["lambda_list"] = c.lambda_list;
        j["sigma_list"] = c.sigma_list;
        j["via_continuation"] = c.via_continuation;
    }
    return j;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw gelfand::InvalidParam("cannot open for writing: " + p.string());
    f << content;
}

std::string csv_preamble(const json& cfg) {
    return "# gelfand " + std::string(gelfand::kVersion) + "\n# config " +
           cfg.dump() + "\n";
}

json report_preamble(const json& cfg) {
    json j;
    j["version"] = gelfand::kVersion;
    j["config"] = cfg;
    return j;
}

/// Merge a JSON config file under already-set CLI flags; unknown keys are
/// rejected (strict config validation).
void merge_config_file(RunConfig& c, const std::string& path,
                       const std::vector<const CLI::Option*>& given) {
    std::ifstream f(path);
    if (!f) throw gelfand::InvalidParam("cannot read config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw gelfand::InvalidParam(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw gelfand::InvalidParam("config root must be an object");

    std::map<std::string, bool> cli_set;
    for (const CLI::Option* o : given) {
        for (const std::string& nm : o->get_lnames()) cli_set[nm] = true;
    }
    auto want = [&](const char* key) {
        return j.contains(key) && !cli_set.count(key);
    };
    try {
        static const std::vector<std::string> known = {
            "s", "lambda", "sigma", "weight", "K", "a", "beta", "m", "n", "L",
            "tol", "max-iter", "anderson", "damping", "newton", "curvature",
            "out", "seed", "lambda-to", "profile", "probe", "spectral",
            "s-list", "lambda-list", "sigma-list", "via-continuation"};
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
                throw gelfand::InvalidParam("unknown config key: " + it.key());
            }
        }
        if (want("s")) c.s = j["s"].get<double>();
        if (want("lambda")) c.lambda = j["lambda"].get<double>();
        if (want("sigma")) c.sigma = j["sigma"].get<double>();
        if (want("weight")) c.weight = j["weight"].get<std::string>();
        if (want("K")) c.K = j["K"].get<double>();
        if (want("a")) c.a = j["a"].get<double>();
        if (want("beta")) c.beta = j["beta"].get<double>();
        if (want("m")) c.m = j["m"].get<double>();
        if (want("n")) c.n = j["n"].get<int>();
        if (want("L")) {
            if (j["L"].is_string()) c.L = j["L"].get<std::string>();
            else c.L = gelfand::format_double(j["L"].get<double>());
        }
        if (want("tol")) c.tol = j["tol"].get<double>();
        if (want("max-iter")) c.max_iter = j["max-iter"].get<int>();
        if (want("anderson")) c.anderson = j["anderson"].get<int>();
        if (want("damping")) c.damping = j["damping"].get<double>();
        if (want("newton")) c.newton = j["newton"].get<bool>();
        if (want("curvature")) c.curvature = j["curvature"].get<bool>();
        if (want("out")) c.out = j["out"].get<std::string>();
        if (want("seed")) c.seed = j["seed"].get<unsigned>();
        if (want("lambda-to")) c.lambda_to = j["lambda-to"].get<double>();
        if (want("profile")) c.profile = j["profile"].get<std::string>();
        if (want("probe")) c.probe = j["probe"].get<int>();
        if (want("spectral")) c.spectral = j["spectral"].get<bool>();
        if (want("s-list")) c.s_list = j["s-list"].get<std::vector<double>>();
        if (want("lambda-list"))
            c.lambda_list = j["lambda-list"].get<std::vector<double>>();
        if (want("sigma-list"))
            c.sigma_list = j["sigma-list"].get<std::vector<double>>();
        if (want("via-continuation"))
            c.via_continuation = j["via-continuation"].get<bool>();
    } catch (const json::exception& e) {
        throw gelfand::InvalidParam(std::string("config type error: ") + e.what());
    }
}

/// Weight admissibility gate shared by all computing commands.  Returns the
/// report; the caller exits 3 when inadmissible.
gelfand::AssumptionReport check_weight(const gelfand::Weight& w,
                                       const gelfand::HalfGrid& g) {
    auto rep = gelfand::validate_assumption_a(w, g);
    if (!rep.admissible) {
        std::cerr << "weight fails hypothesis (first violation at node "
                  << rep.first_violation << ", sup |d sqrt K| = "
                  << rep.sup_dsqrt << "): " << w.describe() << "\n";
    }
    return rep;
}

struct SolveBundle {
    gelfand::ShootingParams params;
    gelfand::HalfGrid grid;
    gelfand::Solution sol;
};

SolveBundle run_solve(const RunConfig& c) {
    SolveBundle b;
    b.params.lambda = c.lambda;
    b.params.sigma = c.sigma;
    b.params.weight = make_weight(c);
    b.params.order = gelfand::make_order(c.s);
    gelfand::validate_params(b.params);
    b.grid = gelfand::make_grid(resolve_L(c), c.n);
    b.sol = gelfand::picard_solve(b.params, b.grid, make_options(c));
    return b;
}

// ----------------------------------------------------------- subcommands

int cmd_solve(const RunConfig& c) {
    const json cfg = resolved_config(c, "solve");
    const auto w = make_weight(c);
    const auto grid = gelfand::make_grid(resolve_L(c), c.n);
    if (!check_weight(w, grid).admissible) return 3;
    const auto t0 = std::chrono::steady_clock::now();
    SolveBundle b = run_solve(c);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "profile.csv",
               csv_preamble(cfg) + gelfand::solution_csv(b.sol));
    json diag = report_preamble(cfg);
    diag["solution"] = json::parse(gelfand::solution_diagnostics_json(b.sol));
    write_file(fs::path(c.out) / "diagnostics.json", diag.dump(2) + "\n");

    std::cout << "solve: converged s=" << gelfand::format_double(c.s)
              << " lambda=" << gelfand::format_double(c.lambda)
              << " sigma=" << gelfand::format_double(c.sigma)
              << " n=" << b.sol.grid.n << " L="
              << gelfand::format_double(b.sol.grid.L)
              << " mass=" << gelfand::format_double(b.sol.mass)
              << " residual=" << gelfand::format_double(b.sol.residual)
              << " iters=" << b.sol.picard_iterations << "+"
              << b.sol.newton_iterations << " time=" << secs << "s\n"
              << "solve: wrote " << (fs::path(c.out) / "profile.csv").string()
              << ", " << (fs::path(c.out) / "diagnostics.json").string()
              << "\n";
    return 0;
}

int cmd_continue(const RunConfig& c) {
    const json cfg = resolved_config(c, "continue");
    gelfand::ShootingParams p;
    p.lambda = c.lambda;
    p.sigma = c.sigma;
    p.weight = make_weight(c);
    p.order = gelfand::make_order(c.s);
    const auto grid = gelfand::make_grid(resolve_L(c), c.n);
    if (!check_weight(p.weight, grid).admissible) return 3;
    gelfand::SolveOptions o = make_options(c);
    o.adapt_tail = false;  // continuation keeps one grid along the branch

    gelfand::BranchPath path;
    if (c.lambda_to > 0.0) {
        path = gelfand::continue_lambda(p, c.lambda, c.lambda_to, grid, o);
    } else {
        if (p.sigma <= 0.0) {
            throw gelfand::InvalidParam(
                "continue: sigma homotopy needs --sigma > 0 "
                "(or set --lambda-to for a lambda branch)");
        }
        path = gelfand::continue_sigma(p, /*to_zero=*/true, grid, o);
    }

    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "branch.csv",
               csv_preamble(cfg) + gelfand::branch_csv(path));
    const auto& last = path.points.back();
    std::cout << "continue: " << path.points.size() << " points, "
              << path.stats.solves << " solves, " << path.stats.refinements
              << " refinements; endpoint lambda="
              << gelfand::format_double(last.lambda)
              << " sigma=" << gelfand::format_double(last.sigma)
              << " mass=" << gelfand::format_double(last.mass) << "\n"
              << "continue: wrote "
              << (fs::path(c.out) / "branch.csv").string() << "\n";
    return 0;
}

/// Load a stored profile.csv (written by cmd_solve) back into a Solution,
/// trusting its embedded config for the parameters.  No solver invariants
/// are enforced here: the point of verifying a stored profile is to catch
/// corruption.
SolveBundle load_profile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw gelfand::InvalidParam("cannot read profile: " + path);
    std::string line;
    json cfg;
    std::vector<double> xs, vs, us, ws;
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# config ";
            if (line.rfind(tag, 0) == 0) cfg = json::parse(line.substr(tag.size()));
            continue;
        }
        if (!header_seen) {
            if (line != "x,v,u,w") {
                throw gelfand::InvalidParam("profile header must be x,v,u,w");
            }
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        double row[4];
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(ss, tok, ',')) {
                throw gelfand::InvalidParam("short profile row: " + line);
            }
            row[k] = std::stod(tok);
        }
        xs.push_back(row[0]);
        vs.push_back(row[1]);
        us.push_back(row[2]);
        ws.push_back(row[3]);
    }
    if (cfg.is_null()) {
        throw gelfand::InvalidParam("profile lacks the '# config' preamble");
    }
    if (xs.size() < 2) throw gelfand::InvalidParam("profile has no data rows");

    RunConfig rc;
    rc.s = cfg.at("s").get<double>();
    rc.lambda = cfg.at("lambda").get<double>();
    rc.sigma = cfg.at("sigma").get<double>();
    rc.weight = cfg.at("weight").get<std::string>();
    rc.K = cfg.at("K").get<double>();
    rc.a = cfg.at("a").get<double>();
    rc.beta = cfg.at("beta").get<double>();
    rc.m = cfg.at("m").get<double>();

    SolveBundle b;
    b.params.lambda = rc.lambda;
    b.params.sigma = rc.sigma;
    b.params.weight = make_weight(rc);
    b.params.order = gelfand::make_order(rc.s);
    b.grid = gelfand::make_grid(xs.back(), static_cast<int>(xs.size()) - 1);
    b.sol.params = b.params;
    b.sol.grid = b.grid;
    b.sol.v = {b.grid, vs};
    b.sol.u = {b.grid, us};
    b.sol.w = {b.grid, ws};
    b.sol.curvature = cfg.value("curvature", true);
    b.sol.mass = gelfand::solution_mass(b.sol.v, b.sol.curvature);
    b.sol.tail_ratio = vs.front() > 0.0 ? vs.back() / vs.front() : 1.0;
    return b;
}

struct CheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

int cmd_verify(const RunConfig& c) {
    const json cfg = resolved_config(c, "verify");
    SolveBundle b;
    if (!c.profile.empty()) {
        b = load_profile(c.profile);
    } else {
        const auto w = make_weight(c);
        const auto grid = gelfand::make_grid(resolve_L(c), c.n);
        if (!check_weight(w, grid).admissible) return 3;
        b = run_solve(c);
    }
    const gelfand::KernelMoments mom(b.sol.grid, b.params.order);
    const auto rep = gelfand::verification_report(b.sol, mom);
    const bool constant = b.params.weight.kind() == gelfand::Weight::Kind::constant;
    const double two_alpha = 2.0 * b.params.order.alpha;

    std::vector<CheckRow> checks;
    auto add = [&](const std::string& name, double value, double thr,
                   bool pass) {
        checks.push_back({name, value, thr, pass});
    };
    add("pohozaev_rel", rep.pohozaev_residual_rel, 1e-6,
        rep.pohozaev_residual_rel <= 1e-6);
    add("double_integral_gap_rel", rep.double_integral_gap_rel, 1e-6,
        rep.double_integral_gap_rel <= 1e-6);
    add("hls_ratio_positive", rep.hls_ratio, 0.0,
        rep.hls_ratio > 0.0 && std::isfinite(rep.hls_ratio));
    add("laplace_min_nonnegative", rep.laplace_min, -1e-10,
        rep.laplace_min >= -1e-10);
    add("laplace_route_gap_rel", rep.laplace_route_gap, 1e-4,
        rep.laplace_route_gap <= 1e-4);
    add("monotone", rep.monotone_ok ? 1.0 : 0.0, 1.0, rep.monotone_ok);
    add("even", rep.even_ok ? 1.0 : 0.0, 1.0, rep.even_ok);
    if (constant && !rep.skipped.count("decay_exponent")) {
        add("decay_exponent_dev", std::fabs(rep.decay_exponent - two_alpha),
            0.05, std::fabs(rep.decay_exponent - two_alpha) <= 0.05);
    }
    if (!rep.skipped.count("scaling_mass")) {
        add("scaling_mass_gap", rep.scaling_mass_gap, 1e-10,
            rep.scaling_mass_gap <= 1e-10);
    }

    json out = report_preamble(cfg);
    out["verification"] = json::parse(gelfand::verification_report_json(rep));

    if (c.spectral && constant) {
        const auto srep = gelfand::spectral_report(b.sol, mom);
        add("morse_index_at_least_1", srep.morse.index, 1.0,
            srep.morse.index >= 1);
        add("kernel_residual_even", srep.kernel_residual_even, 1e-3,
            srep.kernel_residual_even <= 1e-3);
        add("kernel_residual_odd", srep.kernel_residual_odd, 1e-3,
            srep.kernel_residual_odd <= 1e-3);
        add("bs_top_near_1", std::fabs(srep.bs.top - 1.0), 1e-3,
            std::fabs(srep.bs.top - 1.0) <= 1e-3);
        add("bs_one_signed", srep.bs.one_signed ? 1.0 : 0.0, 1.0,
            srep.bs.one_signed);
        add("linearized_distance", srep.linearized_distance, 1e-2,
            srep.linearized_distance > 1e-2);
        out["spectral"] = json::parse(gelfand::spectral_report_json(srep));
    } else {
        out["spectral"] = "skipped";
    }

    if (c.probe >= 2) {
        gelfand::SolveOptions o = make_options(c);
        o.adapt_tail = false;
        try {
            const double d = gelfand::uniqueness_probe(b.params, c.probe,
                                                       c.seed, b.sol.grid, o);
            add("uniqueness_probe_sup", d, 1e-8, d <= 1e-8);
        } catch (const gelfand::ProbeInconclusive& e) {
            add("uniqueness_probe_sup",
                std::numeric_limits<double>::quiet_NaN(), 1e-8, false);
            out["probe_note"] = e.what();
        }
    }

    bool all_pass = true;
    json jchecks = json::array();
    for (const auto& ck : checks) {
        all_pass = all_pass && ck.pass;
        jchecks.push_back({{"name", ck.name},
                           {"value", ck.value},
                           {"threshold", ck.threshold},
                           {"pass", ck.pass}});
        std::cout << "verify: " << (ck.pass ? "PASS" : "FAIL") << " " << ck.name
                  << " value=" << gelfand::format_double(ck.value)
                  << " threshold=" << gelfand::format_double(ck.threshold)
                  << "\n";
    }
    out["checks"] = jchecks;
    out["pass"] = all_pass;

    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "verify.json", out.dump(2) + "\n");
    std::cout << "verify: wrote " << (fs::path(c.out) / "verify.json").string()
              << "\n";
    if (!all_pass) {
        for (const auto& ck : checks) {
            if (!ck.pass) {
                std::cerr << "verify failed: " << ck.name << "\n";
                break;
            }
        }
        return 5;
    }
    return 0;
}

int cmd_spectrum(const RunConfig& c) {
    const json cfg = resolved_config(c, "spectrum");
    const auto w = make_weight(c);
    const auto grid = gelfand::make_grid(resolve_L(c), c.n);
    if (!check_weight(w, grid).admissible) return 3;
    SolveBundle b = run_solve(c);
    const gelfand::KernelMoments mom(b.sol.grid, b.params.order);
    const auto srep = gelfand::spectral_report(b.sol, mom);

    json out = report_preamble(cfg);
    out["spectral"] = json::parse(gelfand::spectral_report_json(srep));
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "spectral.json", out.dump(2) + "\n");
    std::cout << "spectrum: morse_index=" << srep.morse.index
              << " kernel_even="
              << gelfand::format_double(srep.kernel_residual_even)
              << " kernel_odd="
              << gelfand::format_double(srep.kernel_residual_odd)
              << " bs_top=" << gelfand::format_double(srep.bs.top)
              << " lin_dist="
              << gelfand::format_double(srep.linearized_distance) << "\n"
              << "spectrum: wrote "
              << (fs::path(c.out) / "spectral.json").string() << "\n";
    return 0;
}

struct SweepRow {
    double s = 0.0, lambda = 0.0, sigma = 0.0;
    double mass = std::numeric_limits<double>::quiet_NaN();
    int morse = -1;
    double pohozaev = std::numeric_limits<double>::quiet_NaN();
    double decay_p = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
};

int cmd_sweep(const RunConfig& c) {
    if (c.s_list.empty() || c.lambda_list.empty() || c.sigma_list.empty()) {
        throw gelfand::InvalidParam(
            "sweep: --s-list, --lambda-list and --sigma-list must all be "
            "non-empty");
    }
    const json cfg = resolved_config(c, "sweep");

    std::vector<double> ss = c.s_list, ls = c.lambda_list, gs = c.sigma_list;
    std::sort(ss.begin(), ss.end());
    std::sort(ls.begin(), ls.end());
    std::sort(gs.begin(), gs.end());
    std::vector<SweepRow> rows;
    for (double s : ss) {
        for (double l : ls) {
            for (double g : gs) {
                SweepRow r;
                r.s = s;
                r.lambda = l;
                r.sigma = g;
                rows.push_back(r);
            }
        }
    }

    auto run_one = [&](SweepRow& r) {
        try {
            RunConfig pc = c;
            pc.s = r.s;
            pc.lambda = r.lambda;
            pc.sigma = r.sigma;
            gelfand::ShootingParams p;
            p.lambda = r.lambda;
            p.sigma = r.sigma;
            p.weight = make_weight(pc);
            p.order = gelfand::make_order(r.s);
            const auto grid = gelfand::make_grid(resolve_L(pc), pc.n);
            const auto arep = gelfand::validate_assumption_a(p.weight, grid);
            if (!arep.admissible) {
                r.error = "weight hypothesis violated";
                return;
            }
            gelfand::SolveOptions o = make_options(pc);
            o.adapt_tail = false;
            gelfand::Solution sol;
            if (c.via_continuation && r.sigma == 0.0) {
                gelfand::ShootingParams ph = p;
                ph.sigma = 1.0;
                auto path = gelfand::continue_sigma(ph, true, grid, o);
                const gelfand::KernelMoments mom(grid, p.order);
                sol = gelfand::newton_refine(p, path.points.back().v, o, mom);
            } else {
                sol = gelfand::picard_solve(p, grid, o);
            }
            const gelfand::KernelMoments mom(sol.grid, p.order);
            r.mass = sol.mass;
            r.pohozaev = gelfand::pohozaev_residual(sol, mom);
            const auto fit =
                gelfand::decay_exponent_fit(sol.v, p.order, true);
            r.decay_p = fit.ok ? fit.p : std::numeric_limits<double>::quiet_NaN();
            const auto g = gelfand::build_gagliardo(sol.grid, p.order);
            r.morse = gelfand::morse_index(sol.u, p.weight, g).index;
            r.ok = true;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    };

    // Concurrent over points, deterministic aggregation by row index.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>({hw, 4u, static_cast<unsigned>(rows.size())});
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        futs.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= rows.size()) return;
                run_one(rows[i]);
            }
        }));
    }
    for (auto& f : futs) f.get();

    std::string csv = csv_preamble(cfg);
    csv += "s,lambda,sigma,mass,morse_index,pohozaev,decay_p\n";
    bool all_ok = true;
    for (const auto& r : rows) {
        all_ok = all_ok && r.ok;
        csv += gelfand::format_double(r.s) + "," +
               gelfand::format_double(r.lambda) + "," +
               gelfand::format_double(r.sigma) + "," +
               gelfand::format_double(r.mass) + "," +
               (r.ok ? std::to_string(r.morse) : "nan") + "," +
               gelfand::format_double(r.pohozaev) + "," +
               gelfand::format_double(r.decay_p) + "\n";
        if (!r.ok) {
            std::cerr << "sweep: point (s=" << r.s << ", lambda=" << r.lambda
                      << ", sigma=" << r.sigma << ") failed: " << r.error
                      << "\n";
        }
    }
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "sweep.csv", csv);
    std::cout << "sweep: " << rows.size() << " points, "
              << (all_ok ? "all converged" : "some failed") << "; wrote "
              << (fs::path(c.out) / "sweep.csv").string() << "\n";
    return all_ok ? 0 : 2;
}

int cmd_oracle(const RunConfig& c) {
    const json cfg = resolved_config(c, "oracle");
    std::vector<CheckRow> checks;
    auto add = [&](const std::string& name, double value, double thr) {
        checks.push_back({name, value, thr, std::fabs(value) <= thr});
    };

    {
        // alpha = 1/4 box density on [-1, 1]: closed-form potentials.
        const auto ord = gelfand::make_order(0.75);
        const auto grid = gelfand::make_grid(2.0, 1024);
        const gelfand::KernelMoments mom(grid, ord);
        std::vector<double> box(static_cast<std::size_t>(grid.n) + 1, 0.0);
        for (int i = 0; i <= grid.n; ++i) {
            if (grid.x(i) <= 1.0) box[static_cast<std::size_t>(i)] = 1.0;
        }
        gelfand::CellDensity cells;
        cells.grid = grid;
        cells.left.assign(grid.n, 0.0);
        cells.right.assign(grid.n, 0.0);
        for (int cidx = 0; cidx < grid.n; ++cidx) {
            if (grid.x(cidx + 1) <= 1.0 + 0.5 * grid.h) {
                cells.left[static_cast<std::size_t>(cidx)] = 1.0;
                cells.right[static_cast<std::size_t>(cidx)] = 1.0;
            }
        }
        const auto H = gelfand::conj_riesz(mom, cells);
        const auto W = gelfand::exponent_integral(mom, cells);
        const int i1 = static_cast<int>(std::lround(1.0 / grid.h));
        add("box_conj_riesz_at_1",
            H[static_cast<std::size_t>(i1)] - 1.1283791670955126, 1e-6);
        add("box_exponent_integral_at_1",
            W[static_cast<std::size_t>(i1)] - (-0.44065947505686415), 1e-6);
        const auto [I1, I2] = gelfand::laplace_positivity(cells, ord);
        add("laplace_box_direct", I1 - 0.8813189501137283, 1e-6);
        add("laplace_box_transform", I2 - 0.8813189501137283, 1e-4);
    }
    {
        // s = 1 endpoint: -u'' = e^u, v = sech(x / sqrt 2), mass 2 sqrt 2.
        RunConfig oc = c;
        oc.s = 1.0;
        oc.lambda = 1.0;
        oc.sigma = 0.0;
        oc.weight = "const";
        oc.K = 1.0;
        oc.n = 1024;
        oc.L = "30";
        SolveBundle b = run_solve(oc);
        add("s1_mass_vs_2sqrt2", b.sol.mass - 2.0 * std::sqrt(2.0), 1e-5);
        double sup = 0.0;
        for (int i = 0; i <= b.sol.grid.n; ++i) {
            const double ref =
                1.0 / std::cosh(b.sol.grid.x(i) / std::sqrt(2.0));
            sup = std::max(
                sup, std::fabs(b.sol.v.samples[static_cast<std::size_t>(i)] -
                               ref));
        }
        add("s1_profile_vs_sech", sup, 5e-5);
        const auto g = gelfand::build_gagliardo(b.sol.grid, b.params.order);
        const auto mr = gelfand::morse_index(b.sol.u, b.params.weight, g, 1);
        add("s1_morse_index_minus_1", static_cast<double>(mr.index - 1), 0.0);
        add("s1_lowest_vs_poschl_teller", mr.lowest.front() + 0.5, 2e-2);
    }

    bool all_pass = true;
    json jchecks = json::array();
    for (const auto& ck : checks) {
        all_pass = all_pass && ck.pass;
        jchecks.push_back({{"name", ck.name},
                           {"deviation", ck.value},
                           {"tolerance", ck.threshold},
                           {"pass", ck.pass}});
        std::cout << "oracle: " << (ck.pass ? "PASS" : "FAIL") << " " << ck.name
                  << " deviation=" << gelfand::format_double(ck.value)
                  << " tolerance=" << gelfand::format_double(ck.threshold)
                  << "\n";
    }
    json out = report_preamble(cfg);
    out["checks"] = jchecks;
    out["pass"] = all_pass;
    fs::create_directories(c.out);
    write_file(fs::path(c.out) / "oracle.json", out.dump(2) + "\n");
    std::cout << "oracle: wrote " << (fs::path(c.out) / "oracle.json").string()
              << "\n";
    return all_pass ? 0 : 5;
}

void add_common(CLI::App* cmd, RunConfig& c,
                std::vector<const CLI::Option*>& opts) {
    opts.push_back(cmd->add_option("--s", c.s, "fractional order in (1/2, 1]"));
    opts.push_back(cmd->add_option("--lambda", c.lambda, "shooting height"));
    opts.push_back(cmd->add_option("--sigma", c.sigma, "Gaussian parameter"));
    opts.push_back(cmd->add_option("--weight", c.weight,
                                   "weight kind: const|poly|stretched_exp"));
    opts.push_back(cmd->add_option("--K", c.K, "constant weight value"));
    opts.push_back(cmd->add_option("--a", c.a, "polynomial weight strength"));
    opts.push_back(cmd->add_option("--beta", c.beta, "stretched-exp strength"));
    opts.push_back(cmd->add_option("--m", c.m, "stretched-exp exponent"));
    opts.push_back(cmd->add_option("--n", c.n, "half-grid cell count"));
    opts.push_back(cmd->add_option("--L", c.L, "half width, number or 'auto'"));
    opts.push_back(cmd->add_option("--tol", c.tol, "fixed-point tolerance"));
    opts.push_back(cmd->add_option("--max-iter", c.max_iter, "iteration cap"));
    opts.push_back(cmd->add_option("--anderson", c.anderson,
                                   "Anderson mixing depth (0 = off)"));
    opts.push_back(cmd->add_option("--damping", c.damping, "Picard damping"));
    opts.push_back(cmd->add_flag("!--no-newton", c.newton,
                                 "disable the Newton endgame"));
    opts.push_back(cmd->add_flag("!--no-curvature", c.curvature,
                                 "disable the cell-curvature correction"));
    opts.push_back(cmd->add_option("--out", c.out, "output directory"));
    opts.push_back(cmd->add_option("--seed", c.seed, "random seed"));
    cmd->add_option("--config", c.config_file,
                    "JSON config file (CLI flags take precedence)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional Gelfand profile solver and verifier"};
    app.require_subcommand(1);
    RunConfig c;

    std::map<std::string, std::vector<const CLI::Option*>> opts;
    CLI::App* solve = app.add_subcommand("solve", "run one fixed-point solve");
    add_common(solve, c, opts["solve"]);
    CLI::App* cont =
        app.add_subcommand("continue", "parameter continuation (sigma or lambda)");
    add_common(cont, c, opts["continue"]);
    opts["continue"].push_back(cont->add_option(
        "--lambda-to", c.lambda_to, "continue lambda to this value (> 0)"));
    CLI::App* verify =
        app.add_subcommand("verify", "verification certificate suite");
    add_common(verify, c, opts["verify"]);
    opts["verify"].push_back(verify->add_option(
        "--profile", c.profile, "stored profile.csv to verify (else fresh solve)"));
    opts["verify"].push_back(verify->add_option(
        "--probe", c.probe, "uniqueness probe start count (0 = off)"));
    opts["verify"].push_back(verify->add_flag(
        "!--no-spectral", c.spectral, "skip the spectral certificate"));
    CLI::App* spectrum =
        app.add_subcommand("spectrum", "spectral certificate only");
    add_common(spectrum, c, opts["spectrum"]);
    CLI::App* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
    add_common(sweep, c, opts["sweep"]);
    opts["sweep"].push_back(sweep->add_option("--s-list", c.s_list,
                                              "comma-separated s values")
                                ->delimiter(','));
    opts["sweep"].push_back(sweep->add_option("--lambda-list", c.lambda_list,
                                              "comma-separated lambda values")
                                ->delimiter(','));
    opts["sweep"].push_back(sweep->add_option("--sigma-list", c.sigma_list,
                                              "comma-separated sigma values")
                                ->delimiter(','));
    opts["sweep"].push_back(sweep->add_flag(
        "--via-continuation", c.via_continuation,
        "reach sigma = 0 points by homotopy from sigma = 1"));
    CLI::App* oracle =
        app.add_subcommand("oracle", "closed-form oracle comparisons");
    add_common(oracle, c, opts["oracle"]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const std::string name = active->get_name();
        if (!c.config_file.empty()) {
            std::vector<const CLI::Option*> given;
            for (const CLI::Option* o : opts[name]) {
                if (o->count() > 0) given.push_back(o);
            }
            merge_config_file(c, c.config_file, given);
        }
        if (name == "solve") return cmd_solve(c);
        if (name == "continue") return cmd_continue(c);
        if (name == "verify") return cmd_verify(c);
        if (name == "spectrum") return cmd_spectrum(c);
        if (name == "sweep") return cmd_sweep(c);
        if (name == "oracle") return cmd_oracle(c);
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const gelfand::InvalidParam& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return 1;
    } catch (const gelfand::GridPolicyError& e) {
        std::cerr << "grid policy exhausted: " << e.what() << "\n";
        return 4;
    } catch (const gelfand::SolveError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 2;
    } catch (const gelfand::ProbeInconclusive& e) {
        std::cerr << "probe inconclusive: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
