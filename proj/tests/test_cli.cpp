#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end runs of the installed binary; AECURV_BIN is set by ctest.

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& binary() {
    static std::string bin = [] {
        const char* env = std::getenv("AECURV_BIN");
        return std::string(env ? env : "./build/aecurv");
    }();
    return bin;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string base = "/tmp/aecurv_cli_test_" + std::to_string(counter++);
    std::string out_path = base + ".out";
    std::string err_path = base + ".err";
    std::string cmd = binary() + " " + args + " > " + out_path + " 2> " + err_path;
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

} // namespace

TEST_CASE("catalog lists the built-in metrics") {
    RunResult r = run_cli("catalog");
    REQUIRE(r.code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["entries"].is_array());
    CHECK(doc["entries"].size() == 5);
    bool has_flat = false, has_conformal = false;
    for (const auto& e : doc["entries"]) {
        if (e["name"] == "flat") has_flat = true;
        if (e["name"] == "conformal") has_conformal = true;
    }
    CHECK(has_flat);
    CHECK(has_conformal);
}

TEST_CASE("eval on flat space returns zeros") {
    RunResult r = run_cli("eval --metric flat --param n=4 --point 1,2,0.5,-1");
    REQUIRE(r.code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["points"].size() == 1);
    const auto& rec = doc["points"][0];
    CHECK(std::abs(rec["q"].get<double>()) < 1e-14);
    CHECK(std::abs(rec["r"].get<double>()) < 1e-14);
    for (int i = 0; i < 4; ++i) {
        CHECK(rec["g"][i][i].get<double>() == 1.0);
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(rec["j"][i][j].get<double>()) < 1e-14);
            CHECK(std::abs(rec["gj"][i][j].get<double>()) < 1e-14);
        }
    }
    CHECK(!rec.contains("div_gj"));
}

TEST_CASE("eval at order 5 reports the divergence, low orders are refused") {
    RunResult r5 = run_cli("eval --metric conformal --param n=5 --point 1,1,1,1,1 --order 5");
    REQUIRE(r5.code == 0);
    nlohmann::json doc = nlohmann::json::parse(r5.out);
    const auto& rec = doc["points"][0];
    REQUIRE(rec.contains("div_gj"));
    CHECK(rec["div_gj"].size() == 5);
    for (const auto& v : rec["div_gj"]) CHECK(std::abs(v.get<double>()) < 1e-10);

    RunResult r3 = run_cli("eval --metric conformal --param n=5 --point 1,1,1,1,1 --order 3");
    CHECK(r3.code == 3);
    CHECK(r3.err.find("Q requires derivative order 4") != std::string::npos);
}

TEST_CASE("eval output is deterministic") {
    std::string args = "eval --metric diagonal_perturbation --param n=4 --param eps=0.15 "
                       "--point 1.5,0.25,-2,0.75 --point 2,2,2,2";
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
}

TEST_CASE("eval csv layout") {
    RunResult r = run_cli("eval --metric flat --param n=3 --point 1,0,0 --format csv");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "point_index,quantity,i,j,value");
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("0,g,0,0,", 0) == 0);
}

TEST_CASE("check passes on catalog metrics and fails on a corrupted frame") {
    RunResult ok = run_cli("check --metric conformal --param n=5 --points 10");
    REQUIRE(ok.code == 0);
    nlohmann::json doc = nlohmann::json::parse(ok.out);
    CHECK(doc["pass"] == true);
    REQUIRE(doc["identities"].size() == 5);
    for (const auto& row : doc["identities"]) {
        CHECK(row["pass"] == true);
        CHECK(row["max_relative_residual"].get<double>() < row["tolerance"].get<double>());
    }

    RunResult bad = run_cli("check --metric conformal --param n=5 --points 10 --corrupt-fixture");
    CHECK(bad.code == 1);
    nlohmann::json bdoc = nlohmann::json::parse(bad.out);
    CHECK(bdoc["pass"] == false);
}

TEST_CASE("flux csv and json sweeps") {
    std::string common = "flux adm --metric schwarzschild_isotropic --param m=1 "
                         "--radii 32,6 --quad-degree 3";
    RunResult j = run_cli(common);
    REQUIRE(j.code == 0);
    nlohmann::json doc = nlohmann::json::parse(j.out);
    REQUIRE(doc["series"].size() == 1);
    const auto& s = doc["series"][0];
    CHECK(s["functional"] == "adm_energy");
    CHECK(s["radii"].size() == 6);
    CHECK(std::abs(s["f_inf"].get<double>() - 1.0) < 1e-2);

    RunResult c = run_cli(common + " --format csv");
    REQUIRE(c.code == 0);
    std::istringstream in(c.out);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "functional,radius,value,fit");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("decay estimates a catalog exponent") {
    RunResult r = run_cli("decay --metric product_decay --param n=3 --param tau=1 "
                          "--annuli 6 --points-per-annulus 32");
    REQUIRE(r.code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["field"] == "metric");
    CHECK(std::abs(doc["exponent"].get<double>() - 1.0) < 0.1);
}

TEST_CASE("linearize reports a quadratic remainder slope") {
    RunResult r = run_cli("linearize --metric diagonal_perturbation --param n=3 "
                          "--param eps=0.1 --points 3");
    REQUIRE(r.code == 0);
    nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["slope"].get<double>() > 1.9);
}

TEST_CASE("--out writes the report to a file") {
    std::string path = "/tmp/aecurv_cli_out.json";
    std::remove(path.c_str());
    RunResult r = run_cli("catalog --out " + path);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    nlohmann::json doc = nlohmann::json::parse(slurp(path));
    CHECK(doc["entries"].size() == 5);
    std::remove(path.c_str());
}

TEST_CASE("exit codes distinguish failure classes") {
    // Unknown metric: configuration error.
    RunResult cfg = run_cli("eval --metric nosuch --point 1,0,0");
    CHECK(cfg.code == 2);
    CHECK(cfg.err.find("error") != std::string::npos);

    // Bad flag: parse error.
    RunResult parse = run_cli("eval --bogus-flag");
    CHECK(parse.code == 2);

    // Metric singular at the origin: domain error.
    RunResult dom = run_cli("eval --metric schwarzschild_isotropic --point 0,0,0");
    CHECK(dom.code == 3);
    CHECK(dom.err.find("error") != std::string::npos);

    // Help exits cleanly.
    RunResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("eval") != std::string::npos);
}

TEST_CASE("serial flag reproduces the parallel output") {
    std::string args = "check --metric product_decay --param n=4 --param tau=1.5 --points 8";
    RunResult par = run_cli(args);
    RunResult ser = run_cli(args + " --serial");
    REQUIRE(par.code == 0);
    REQUIRE(ser.code == 0);
    nlohmann::json pd = nlohmann::json::parse(par.out);
    nlohmann::json sd = nlohmann::json::parse(ser.out);
    // Thread counts in the config block may differ; residuals must not.
    CHECK(pd["identities"] == sd["identities"]);
}
