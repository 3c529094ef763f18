#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "hep/finite_kernel.hpp"
#include "hep/simulate.hpp"
#include "hep/specfun.hpp"

using namespace hep;

TEST_CASE("regularized incomplete gamma and chi-square tail") {
    CHECK(std::fabs(gamma_q(1.0, 2.3) - std::exp(-2.3)) < 1e-14);
    CHECK(std::fabs(gamma_q(0.5, 1.7) - std::erfc(std::sqrt(1.7))) < 1e-14);
    CHECK(gamma_q(3.0, 0.0) == 1.0);
    CHECK(chi2_pvalue(10.0, 10) > chi2_pvalue(20.0, 10));
    CHECK(chi2_pvalue(31.41, 20) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("counter-based generator: reproducible, stream-separated") {
    CounterRng a(7, 3), b(7, 3), c(7, 4);
    bool same = true, diff = false;
    for (int i = 0; i < 100; ++i) {
        double x = a.uniform();
        same = same && (x == b.uniform());
        diff = diff || (x != c.uniform());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    CHECK(same);
    CHECK(diff);
    // normals have roughly unit variance
    CounterRng g(11, 0);
    double s1 = 0.0, s2 = 0.0;
    const int N = 20000;
    for (int i = 0; i < N; ++i) {
        double z = g.normal();
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::fabs(s1 / N) < 0.02);
    CHECK(std::fabs(s2 / N - 1.0) < 0.03);
}

TEST_CASE("configuration validation") {
    SimConfig bad;
    bad.n = 0;
    CHECK_THROWS_AS(simulate_bridge(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.b = -1.0;
    CHECK_THROWS_AS(simulate_bridge(bad), std::invalid_argument);
    bad = SimConfig{};
    bad.time_steps = 1;
    CHECK_THROWS_AS(simulate_bridge(bad), std::invalid_argument);
    CHECK_THROWS_AS(tacnode_preset(0, 1.0, 0.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(pearcey_preset(5, -1.0, 0, 1), std::invalid_argument);
}

TEST_CASE("bridge from 0 to 0: mean matches 2 t (1-t)") {
    SimConfig cfg;
    cfg.n = 1;
    cfg.alpha = 0;
    cfg.a = 0.0;
    cfg.b = 0.0;
    cfg.replicas = 100000;
    cfg.seed = 7;
    for (double t : {0.25, 0.5, 0.75}) {
        double acc = 0.0;
        for (int r = 0; r < cfg.replicas; ++r) acc += sample_positions(cfg, t, r)[0];
        double mean = acc / cfg.replicas, target = 2.0 * t * (1.0 - t);
        CHECK(std::fabs(mean - target) < 0.02 * target);
    }
}

TEST_CASE("paths: exact endpoint pinning and no order violations") {
    SimConfig cfg = tacnode_preset(15, 1.0, 0.0, 1, 42);
    cfg.time_steps = 501;
    PathEnsemble ens = simulate_bridge(cfg, 0);
    CHECK(ens.collisions == 0);
    for (int i = 0; i < cfg.n; ++i) {
        CHECK(ens.paths(i, 0) == cfg.a);
        CHECK(ens.paths(i, 500) == cfg.b);
    }
    // nonnegative everywhere, strictly ordered at a probe time
    CHECK(ens.paths.minCoeff() >= 0.0);
    for (int i = 0; i + 1 < cfg.n; ++i) CHECK(ens.paths(i, 250) > ens.paths(i + 1, 250));
    // determinism: identical seed and config give bit-identical paths
    PathEnsemble again = simulate_bridge(cfg, 0);
    CHECK((again.paths - ens.paths).cwiseAbs().maxCoeff() == 0.0);
    PathEnsemble other = simulate_bridge(cfg, 1);
    CHECK((other.paths - ens.paths).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("n=1 marginal matches the squared Bessel bridge density") {
    SimConfig cfg;
    cfg.n = 1;
    cfg.alpha = 0;
    cfg.a = 2.0;
    cfg.b = 2.0;
    cfg.replicas = 50000;
    cfg.seed = 11;
    double pab = transition_density(0, 1.0, 2.0, 2.0).real();
    auto dens = [&](double x) {
        return (transition_density(0, 0.5, 2.0, x) * transition_density(0, 0.5, x, 2.0))
                   .real() /
               pab;
    };
    MarginalReport rep = marginal_check(cfg, 0.5, 0.0, 8.0, 20, dens);
    MESSAGE("n=1 chi2 = ", rep.chi2, " dof = ", rep.dof, " p = ", rep.p_value);
    CHECK(rep.p_value > 0.01);
    CHECK(std::fabs(rep.total_mass - 1.0) < 0.01);
}

TEST_CASE("two-path marginal matches the kernel diagonal") {
    SimConfig cfg;
    cfg.n = 2;
    cfg.alpha = 0;
    cfg.a = 2.0;
    cfg.b = 2.0;
    cfg.replicas = 50000;
    cfg.seed = 13;
    EnsembleConfig ec;
    ec.n = 2;
    ec.alpha = 0;
    ec.a = 2.0;
    ec.b = 2.0;
    auto dens = [&](double x) { return kn_direct(ec, 0.5, x, 0.5, x).real(); };
    MarginalReport rep = marginal_check(cfg, 0.5, 0.0, 10.0, 20, dens);
    MESSAGE("n=2 chi2 = ", rep.chi2, " dof = ", rep.dof, " p = ", rep.p_value,
            " max_z = ", rep.max_z);
    CHECK(rep.max_z <= 3.0);  // sup-norm gap within 3 Monte Carlo standard errors
    CHECK(rep.p_value > 0.01);
    CHECK(std::fabs(rep.total_mass - 2.0) < 0.02);
}

TEST_CASE("critical-endpoint preset: lowest path hugs zero then lifts off") {
    SimConfig cfg = pearcey_preset(30, 1.0, 0, 43);
    cfg.time_steps = 201;
    PathEnsemble ens = simulate_bridge(cfg, 0);
    auto lowest = [&](double t) {
        int j = (int)std::lround(t * 200);
        return ens.paths(cfg.n - 1, j);
    };
    const double thr = 0.3, tc = 1.0 / (1.0 + 1.0);
    CHECK(lowest(tc - 0.2) - thr < 0.0);
    CHECK(lowest(tc + 0.2) - thr > 0.0);
    CHECK(lowest(tc + 0.4) > lowest(tc + 0.2));
}

TEST_CASE("symmetric preset: hull touches the hard edge near the middle") {
    const int N = 40;
    const double q = 1.0;
    SimConfig cfg = tacnode_preset(N, q, 0.0, 1, 42);
    cfg.time_steps = 501;
    PathEnsemble ens = simulate_bridge(cfg, 0);
    double central = 1e300, outer = 1e300;
    for (int j = 1; j < 500; ++j) {
        double t = ens.times[j], low = ens.paths(cfg.n - 1, j);
        if (std::fabs(t - 0.5) <= 0.15) central = std::min(central, low);
        if ((t >= 0.05 && t <= 0.15) || (t >= 0.85 && t <= 0.95))
            outer = std::min(outer, low);
    }
    double thr = 2.0 * std::cbrt(1.0 / N) * (q * cfg.a / ((1.0 + q) * (1.0 + q))) / 2.0;
    MESSAGE("central min = ", central, " outer min = ", outer, " threshold = ", thr);
    CHECK(central < thr);
    CHECK(outer > thr);
}

TEST_CASE("figure output: csv schema and svg structure") {
    SimConfig cfg;
    cfg.n = 3;
    cfg.alpha = 1;
    cfg.a = 1.0;
    cfg.b = 2.0;
    cfg.time_steps = 11;
    cfg.seed = 5;
    PathEnsemble ens = simulate_bridge(cfg, 0);
    figure_emit(ens, "csv", "test_fig.csv");
    std::ifstream f("test_fig.csv");
    std::string line;
    REQUIRE(std::getline(f, line));
    CHECK(line == "t,path,value");
    int rows = 0;
    double maxerr = 1e300;
    while (std::getline(f, line)) {
        double t, v;
        int idx;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%d,%lf", &t, &idx, &v) == 3);
        int j = (int)std::lround(t * 10);
        maxerr = std::fabs(v - ens.paths(idx, j));  // round-trip decimals
        CHECK(maxerr == 0.0);
        ++rows;
    }
    CHECK(rows == 11 * 3);

    figure_emit(ens, "svg", "test_fig.svg");
    std::ifstream g("test_fig.svg");
    std::stringstream ss;
    ss << g.rdbuf();
    std::string svg = ss.str();
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    int poly = 0;
    for (size_t p = svg.find("<polyline"); p != std::string::npos;
         p = svg.find("<polyline", p + 1))
        ++poly;
    CHECK(poly == 3);
    CHECK_THROWS_AS(figure_emit(ens, "png", "x.png"), std::invalid_argument);
}
