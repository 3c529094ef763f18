#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hep {

// Deterministic counter-based generator: every variate is a pure function of
// (seed, stream, counter), so replica-level parallelism cannot change results.
struct CounterRng {
    std::uint64_t key;
    std::uint64_t ctr = 0;
    bool have_spare = false;
    double spare = 0.0;

    CounterRng(std::uint64_t seed, std::uint64_t stream);
    double uniform();  // in (0, 1)
    double normal();   // standard normal via Box-Muller
};

// Upper regularized incomplete gamma Q(a, x); chi-square tail probability is
// Q(dof/2, stat/2).
double gamma_q(double a, double x);
double chi2_pvalue(double stat, int dof);

struct SimConfig {
    int n = 1;
    int alpha = 0;       // >= 0 (matrix model needs integer index)
    double a = 0.0;      // common start level, >= 0
    double b = 1.0;      // common end level, >= 0
    int time_steps = 101;  // number of grid times including both endpoints
    int replicas = 1;
    std::uint64_t seed = 0;
};

// Critical-scaling presets populate (n, a, b).
SimConfig tacnode_preset(int bigN, double q, double sigma, int alpha,
                         std::uint64_t seed);
SimConfig pearcey_preset(int n, double q, int alpha, std::uint64_t seed);

struct PathEnsemble {
    std::vector<double> times;  // size time_steps, uniform on [0, 1]
    Eigen::MatrixXd paths;      // n x time_steps, row i = i-th largest path
    std::uint64_t seed = 0;
    SimConfig config;
    int collisions = 0;  // interior grid times with a non-strict ordering
};

// One replica of the ordered eigenvalue paths of X(t)^dag X(t), where
// X(t) = (1-t) X0 + t X1 + G(t) is an (n+alpha) x n complex matrix bridge,
// X0 = sqrt(a) [I; 0], X1 = sqrt(b) [I; 0], and the real and imaginary parts
// of every entry of G are independent standard Brownian bridges (variance
// t(1-t) each, so the n=1, alpha=0 marginal matches the squared Bessel
// transition density in the 1/(2t) normalization used across the library).
PathEnsemble simulate_bridge(const SimConfig& cfg, int replica = 0);

// All n particle positions of one replica at a single time (no path needed;
// the bridge marginal is sampled directly).
std::vector<double> sample_positions(const SimConfig& cfg, double t, int replica);

struct MarginalReport {
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    double sup_gap = 0.0;     // max over bins of |empirical - expected| density
    double max_z = 0.0;       // max over bins of |count - expected|/sqrt(expected)
    double total_mass = 0.0;  // empirical mean particle count in [lo, hi]
};

// Histogram of particle positions at time t over cfg.replicas replicas against
// a reference one-point density (e.g. the kernel diagonal K_n(t,x;t,x), which
// integrates to n, or an n=1 bridge density integrating to 1).
MarginalReport marginal_check(const SimConfig& cfg, double t, double lo, double hi,
                              int bins, const std::function<double(double)>& density);

// Emit the ensemble as "csv" (header t,path,value; round-trip decimals) or
// "svg" (self-contained, one polyline per path).
void figure_emit(const PathEnsemble& ens, const std::string& format,
                 const std::string& path);

}  // namespace hep
