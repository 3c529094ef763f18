#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "hep/specfun.hpp"
#include "hep/tacnode.hpp"

using json = nlohmann::json;
using namespace hep;

namespace {

int run(const std::string& cmd) {
    int status = std::system((cmd + " > cli_stdout.txt 2> cli_stderr.txt").c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

}  // namespace

TEST_CASE("kernel: finite n=1 row matches the closed form") {
    write_file("cli_k.json",
               R"({"model":"finite","n":1,"alpha":1,"a":2.0,"b":3.0,)"
               R"("points":[[0.4,1.0,0.6,1.5]]})");
    CHECK(run("./hep_cli kernel --config cli_k.json --output cli_k.csv") == 0);
    std::ifstream f("cli_k.csv");
    std::string header, row;
    REQUIRE(std::getline(f, header));
    CHECK(header == "s,x,t,y,re,im,err_estimate");
    REQUIRE(std::getline(f, row));
    double s, x, t, y, re, im, err;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &s, &x, &t, &y, &re,
                        &im, &err) == 7);
    // single bridge from a to b: p_{1-s}(x,b) p_t(a,y) / p_1(a,b) - p_{t-s}(x,y)
    cd ref = transition_density(1, 0.6, 1.0, 3.0) * transition_density(1, 0.6, 2.0, 1.5) /
                 transition_density(1, 1.0, 2.0, 3.0) -
             transition_density(1, 0.2, 1.0, 1.5);
    CHECK(std::fabs(re - ref.real()) < 1e-9 * std::fabs(ref.real()));
    CHECK(std::fabs(im) < 1e-12);
    CHECK(err < 1e-9);
}

TEST_CASE("kernel: tacnode single-time row matches the library route") {
    write_file("cli_kt.json",
               R"({"model":"tacnode","alpha":0,"sigma":0.0,)"
               R"("points":[[0.0,1.0,0.0,1.5]]})");
    CHECK(run("./hep_cli kernel --config cli_kt.json --output cli_kt.csv") == 0);
    std::ifstream f("cli_kt.csv");
    std::string header, row;
    REQUIRE(std::getline(f, header));
    REQUIRE(std::getline(f, row));
    double s, x, t, y, re, im, err;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &s, &x, &t, &y, &re,
                        &im, &err) == 7);
    TacnodeParams p;
    cd ref = k_tacnode(p, 0.0, 1.0, 0.0, 1.5);
    CHECK(std::fabs(re - ref.real()) < 1e-8);
    CHECK(err < 1e-5);  // two-resolution estimate stays small on a healthy build
}

TEST_CASE("kernel: malformed JSON exits 2 and writes nothing") {
    write_file("cli_bad.json", "{\"model\":");
    std::remove("cli_bad.csv");
    CHECK(run("./hep_cli kernel --config cli_bad.json --output cli_bad.csv") == 2);
    CHECK(!exists("cli_bad.csv"));
}

TEST_CASE("kernel: unknown config keys are rejected") {
    write_file("cli_uk.json", R"({"model":"finite","bogus":1})");
    CHECK(run("./hep_cli kernel --config cli_uk.json --output cli_uk.csv") == 2);
}

TEST_CASE("converge: errors decrease and the fitted slope is negative") {
    write_file("cli_c.json", R"({"model":"pearcey","alpha":0.0,"sizes":[50,200]})");
    CHECK(run("./hep_cli converge --config cli_c.json --output cli_c.csv") == 0);
    std::ifstream f("cli_c.csv");
    std::string line;
    REQUIRE(std::getline(f, line));
    CHECK(line == "size,error");
    double e1 = 0, e2 = 0, slope = 0;
    int n1 = 0, n2 = 0;
    REQUIRE(std::getline(f, line));
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf", &n1, &e1) == 2);
    REQUIRE(std::getline(f, line));
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf", &n2, &e2) == 2);
    REQUIRE(std::getline(f, line));
    REQUIRE(std::sscanf(line.c_str(), "slope,%lf", &slope) == 1);
    CHECK(e2 < e1);
    CHECK(slope < -0.2);
}

TEST_CASE("converge: a single size cannot be fitted") {
    write_file("cli_c1.json", R"({"model":"pearcey","sizes":[50]})");
    CHECK(run("./hep_cli converge --config cli_c1.json --output cli_c1.csv") == 2);
}

TEST_CASE("gap: probability lands in (0, 1]") {
    write_file("cli_g.json",
               R"({"model":"pearcey","alpha":0.0,"domains":[[0.0,0.05,0.8]],"m":12})");
    CHECK(run("./hep_cli gap --config cli_g.json --output cli_g.json.out") == 0);
    json rep = json::parse(slurp("cli_g.json.out"));
    double p = rep.at("probability").get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(std::fabs(rep.at("imag_residual").get<double>()) < 1e-8);
}

TEST_CASE("simulate: byte-identical re-runs, well-formed svg") {
    write_file("cli_s.json",
               R"({"preset":"pearcey","n":8,"q":1.0,"time_steps":21,"seed":4,)"
               R"("format":"csv"})");
    CHECK(run("./hep_cli simulate --config cli_s.json --output cli_s1.csv") == 0);
    CHECK(run("./hep_cli simulate --config cli_s.json --output cli_s2.csv") == 0);
    CHECK(slurp("cli_s1.csv") == slurp("cli_s2.csv"));

    write_file("cli_sv.json",
               R"({"preset":"pearcey","n":8,"q":1.0,"time_steps":21,"seed":4,)"
               R"("format":"svg"})");
    CHECK(run("./hep_cli simulate --config cli_sv.json --output cli_s.svg") == 0);
    std::string svg = slurp("cli_s.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    int poly = 0;
    for (size_t p = svg.find("<polyline"); p != std::string::npos;
         p = svg.find("<polyline", p + 1))
        ++poly;
    CHECK(poly == 8);
}

TEST_CASE("verify: healthy build passes every check") {
    CHECK(run("./hep_cli verify --output cli_v.json") == 0);
    json rep = json::parse(slurp("cli_v.json"));
    CHECK(rep.at("total").get<int>() >= 15);
    CHECK(rep.at("failed").get<int>() == 0);
    for (auto& c : rep.at("checks")) CHECK(c.at("status").get<std::string>() == "pass");
}

TEST_CASE("verify: impossible tolerance forces a named failure") {
    write_file("cli_vt.json", R"({"tolerance":1e-15,"prefix":"pearcey."})");
    CHECK(run("./hep_cli verify --config cli_vt.json --output cli_vt.json.out") == 1);
    json rep = json::parse(slurp("cli_vt.json.out"));
    CHECK(rep.at("failed").get<int>() > 0);
    bool named = false;
    for (auto& c : rep.at("checks"))
        if (c.at("status") == "fail" && !c.at("name").get<std::string>().empty())
            named = true;
    CHECK(named);
}

TEST_CASE("verify: prefix selects a subset") {
    CHECK(run("./hep_cli verify --prefix finite. --output cli_vp.json") == 0);
    json rep = json::parse(slurp("cli_vp.json"));
    CHECK(rep.at("total").get<int>() >= 3);
    for (auto& c : rep.at("checks"))
        CHECK(c.at("name").get<std::string>().rfind("finite.", 0) == 0);
    // nonsense prefix is a config error
    CHECK(run("./hep_cli verify --prefix nosuch.") == 2);
}
