#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// Driver binary path injected by the build (tests exercise the installed
// command-line surface end to end).
#ifndef GELFAND_CLI_PATH
#error "GELFAND_CLI_PATH must be defined by the build"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GELFAND_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() /
                       ("gelfand_cli_" + tag + "_" +
                        std::to_string(static_cast<long>(::getpid())));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli rejects out-of-range order") {
    const fs::path d = fresh_dir("badorder");
    CHECK(run_cli("solve --s 0.4 --n 64 --L 10 --out " + d.string()) == 1);
    CHECK(run_cli("solve --s 1.5 --n 64 --L 10 --out " + d.string()) == 1);
    fs::remove_all(d);
}

TEST_CASE("cli gates inadmissible weights with its own exit code") {
    const fs::path d = fresh_dir("badweight");
    CHECK(run_cli("solve --weight stretched_exp --beta 1.0 --m 0.25 "
                  "--s 0.75 --n 64 --L 20 --out " +
                  d.string()) == 3);
    fs::remove_all(d);
}

TEST_CASE("cli solve writes annotated artifacts and succeeds") {
    const fs::path d = fresh_dir("solve");
    REQUIRE(run_cli("solve --s 0.9 --n 256 --L 30 --out " + d.string()) == 0);
    REQUIRE(fs::exists(d / "profile.csv"));
    REQUIRE(fs::exists(d / "diagnostics.json"));
    const std::string csv = slurp(d / "profile.csv");
    CHECK(csv.rfind("# gelfand ", 0) == 0);
    CHECK(csv.find("\n# config {") != std::string::npos);
    CHECK(csv.find("\nx,v,u,w\n") != std::string::npos);
    const auto diag = nlohmann::json::parse(slurp(d / "diagnostics.json"));
    CHECK(diag.at("config").at("s").get<double>() == 0.9);
    CHECK(diag.at("solution").at("mass").get<double>() > 0.0);
    fs::remove_all(d);
}

TEST_CASE("cli solve output is bitwise deterministic") {
    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    const std::string args = "solve --s 0.75 --n 192 --L 40 --out ";
    REQUIRE(run_cli(args + d1.string()) == 0);
    REQUIRE(run_cli(args + d2.string()) == 0);
    // The config preamble embeds the out directory, so compare data rows.
    const std::string a = slurp(d1 / "profile.csv");
    const std::string b = slurp(d2 / "profile.csv");
    CHECK(a.substr(a.find("\nx,v,u,w\n")) == b.substr(b.find("\nx,v,u,w\n")));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("cli verify passes on a fresh admissible solve") {
    const fs::path d = fresh_dir("verify");
    REQUIRE(run_cli("verify --s 0.75 --n 512 --L 40 --no-spectral --out " +
                    d.string()) == 0);
    const auto out = nlohmann::json::parse(slurp(d / "verify.json"));
    CHECK(out.at("pass").get<bool>());
    CHECK(out.at("spectral").is_string());  // "skipped"
    bool saw_pohozaev = false;
    for (const auto& ck : out.at("checks")) {
        if (ck.at("name") == "pohozaev_rel") {
            saw_pohozaev = true;
            CHECK(ck.at("pass").get<bool>());
            CHECK(ck.at("value").get<double>() <= 1e-6);
        }
    }
    CHECK(saw_pohozaev);
    fs::remove_all(d);
}

TEST_CASE("cli verify flags a corrupted stored profile") {
    const fs::path d = fresh_dir("corrupt");
    REQUIRE(run_cli("solve --s 0.75 --n 256 --L 40 --out " + d.string()) == 0);
    // Break monotonicity of the stored u column at one interior node.
    std::istringstream in(slurp(d / "profile.csv"));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() > 140);
    {
        std::string& row = lines[130];  // "x,v,u,w"
        const auto c1 = row.find(',');
        const auto c2 = row.find(',', c1 + 1);
        const auto c3 = row.find(',', c2 + 1);
        REQUIRE(c3 != std::string::npos);
        row = row.substr(0, c2 + 1) + "1.0" + row.substr(c3);
    }
    std::ofstream out(d / "corrupted.csv", std::ios::binary);
    for (const auto& line : lines) out << line << "\n";
    out.close();
    CHECK(run_cli("verify --profile " + (d / "corrupted.csv").string() +
                  " --no-spectral --out " + d.string()) == 5);
    const auto rep = nlohmann::json::parse(slurp(d / "verify.json"));
    CHECK(!rep.at("pass").get<bool>());
    bool monotone_failed = false;
    for (const auto& ck : rep.at("checks")) {
        if (ck.at("name") == "monotone") monotone_failed = !ck.at("pass").get<bool>();
    }
    CHECK(monotone_failed);
    fs::remove_all(d);
}

TEST_CASE("cli sweep demands explicit parameter lists") {
    const fs::path d = fresh_dir("sweepbad");
    CHECK(run_cli("sweep --s-list 0.75 --out " + d.string()) == 1);
    fs::remove_all(d);
}

TEST_CASE("cli config file merges under explicit flags") {
    const fs::path d = fresh_dir("config");
    {
        std::ofstream f(d / "cfg.json");
        f << R"({"s": 0.9, "n": 192, "L": 30, "tol": 1e-10})";
    }
    REQUIRE(run_cli("solve --config " + (d / "cfg.json").string() +
                    " --s 0.75 --L 40 --out " + d.string()) == 0);
    const auto diag = nlohmann::json::parse(slurp(d / "diagnostics.json"));
    CHECK(diag.at("config").at("s").get<double>() == 0.75);   // flag wins
    CHECK(diag.at("config").at("n").get<int>() == 192);       // file value
    CHECK(diag.at("config").at("L_resolved").get<double>() == 40.0);
    fs::remove_all(d);
}

TEST_CASE("cli config file rejects unknown keys") {
    const fs::path d = fresh_dir("configbad");
    {
        std::ofstream f(d / "cfg.json");
        f << R"({"s": 0.9, "cells": 128})";
    }
    CHECK(run_cli("solve --config " + (d / "cfg.json").string() + " --out " +
                  d.string()) == 1);
    fs::remove_all(d);
}

TEST_CASE("cli continue writes a branch table") {
    const fs::path d = fresh_dir("branch");
    REQUIRE(run_cli("continue --s 0.75 --sigma 1.0 --n 192 --L 40 --out " +
                    d.string()) == 0);
    const std::string csv = slurp(d / "branch.csv");
    CHECK(csv.find("lambda,sigma,mass,v0,xalpha_total\n") != std::string::npos);
    fs::remove_all(d);
}
