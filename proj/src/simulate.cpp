#include "hep/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void validate(const SimConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("simulate: n >= 1 required");
    if (cfg.alpha < 0) throw std::invalid_argument("simulate: alpha >= 0 required");
    if (cfg.a < 0.0 || cfg.b < 0.0 || !std::isfinite(cfg.a) || !std::isfinite(cfg.b))
        throw std::invalid_argument("simulate: need a >= 0 and b >= 0");
    if (cfg.time_steps < 2) throw std::invalid_argument("simulate: time_steps >= 2");
    if (cfg.replicas < 1) throw std::invalid_argument("simulate: replicas >= 1");
}

// End state of the conditioned matrix bridge: M(1) = b I fixes X(1) = sqrt(b) Q
// with Q an m x n isometry distributed with density prop. to
// exp(sqrt(ab) Re tr P^dag Q) relative to the invariant measure (P = [I; 0]).
// For n = 1 this is exactly the von Mises phase mixing that produces the
// Bessel-I factor of the squared Bessel bridge density.  kappa = 0 gives the
// Haar isometry; moderate kappa uses exact rejection from Haar; very large
// kappa (critical-scaling presets) is sampled as the concentration limit Q = P,
// which the Langevin law approaches at rate kappa^{-1/2}.
Eigen::MatrixXcd end_frame(int m, int n, double kappa, CounterRng& rng) {
    Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(m, n);
    if (kappa * n > 40.0) return Q;
    for (long tries = 0; tries < 2000000; ++tries) {
        Eigen::MatrixXcd Z(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c)
                Z(r, c) = std::complex<double>(rng.normal(), rng.normal());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
        Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, n);
        Eigen::MatrixXcd r = q.adjoint() * Z;
        for (int c = 0; c < n; ++c) {
            std::complex<double> d = r(c, c);
            q.col(c) *= std::abs(d) > 0 ? d / std::abs(d) : 1.0;
        }
        if (kappa == 0.0) return q;
        double lacc = 0.0;
        for (int c = 0; c < n; ++c) lacc += q(c, c).real() - 1.0;
        if (std::log(rng.uniform()) < kappa * lacc) return q;
    }
    throw std::runtime_error("end_frame: rejection sampling did not terminate");
}

// Ordered eigenvalues (descending, clamped at 0) of X^dag X.
Eigen::VectorXd ordered_eigs(const Eigen::MatrixXcd& X) {
    Eigen::MatrixXcd H = X.adjoint() * X;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("simulate: eigensolver failed");
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    return ev.cwiseMax(0.0);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double CounterRng::uniform() {
    std::uint64_t r = splitmix64(key ^ splitmix64(++ctr));
    return (double)(r >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare = r * std::sin(2.0 * M_PI * u2);
    have_spare = true;
    return r * std::cos(2.0 * M_PI * u2);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series, return 1 - P
        double term = 1.0 / a, sum = term, ap = a;
        for (int k = 0; k < 500 && std::fabs(term) > 1e-16 * std::fabs(sum); ++k) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

double chi2_pvalue(double stat, int dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

SimConfig tacnode_preset(int bigN, double q, double sigma, int alpha,
                         std::uint64_t seed) {
    if (bigN < 1 || !(q > 0.0)) throw std::invalid_argument("tacnode_preset: N >= 1, q > 0");
    SimConfig cfg;
    cfg.n = 2 * bigN;
    cfg.alpha = alpha;
    double N = bigN;
    cfg.a = 2.0 * q * N * (1.0 - sigma / (2.0 * std::pow(N, 2.0 / 3.0)));
    cfg.b = cfg.a / (q * q);
    cfg.seed = seed;
    return cfg;
}

SimConfig pearcey_preset(int n, double q, int alpha, std::uint64_t seed) {
    if (n < 1 || !(q > 0.0)) throw std::invalid_argument("pearcey_preset: n >= 1, q > 0");
    SimConfig cfg;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.a = 0.0;
    cfg.b = 2.0 * q * n;
    cfg.seed = seed;
    return cfg;
}

PathEnsemble simulate_bridge(const SimConfig& cfg, int replica) {
    validate(cfg);
    const int n = cfg.n, m = cfg.n + cfg.alpha, T = cfg.time_steps - 1;
    CounterRng rng(cfg.seed, (std::uint64_t)replica);

    Eigen::MatrixXcd Q =
        end_frame(m, n, std::sqrt(cfg.a * cfg.b), rng);

    PathEnsemble ens;
    ens.seed = cfg.seed;
    ens.config = cfg;
    ens.times.resize(T + 1);
    for (int j = 0; j <= T; ++j) ens.times[j] = (double)j / T;
    ens.paths.resize(n, T + 1);

    // One Brownian bridge per real component of each entry: accumulate the
    // walk, then subtract t * W(1).
    const double dt = 1.0 / T;
    const double sd = std::sqrt(dt);
    std::vector<Eigen::MatrixXcd> G(T + 1, Eigen::MatrixXcd::Zero(m, n));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) {
            double wr = 0.0, wi = 0.0;
            for (int j = 1; j <= T; ++j) {
                wr += sd * rng.normal();
                wi += sd * rng.normal();
                G[j](r, c) = std::complex<double>(wr, wi);
            }
            std::complex<double> w1 = G[T](r, c);
            for (int j = 1; j <= T; ++j) G[j](r, c) -= ens.times[j] * w1;
        }

    Eigen::MatrixXcd X0 = Eigen::MatrixXcd::Zero(m, n);
    X0.topRows(n) = std::sqrt(cfg.a) * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd X1 = std::sqrt(cfg.b) * Q;

    ens.collisions = 0;
    for (int j = 0; j <= T; ++j) {
        if (j == 0) {
            ens.paths.col(0).setConstant(cfg.a);
            continue;
        }
        if (j == T) {
            ens.paths.col(T).setConstant(cfg.b);
            continue;
        }
        double t = ens.times[j];
        Eigen::VectorXd ev = ordered_eigs((1.0 - t) * X0 + t * X1 + G[j]);
        for (int i = 0; i + 1 < n; ++i)
            if (!(ev[i] > ev[i + 1])) ++ens.collisions;
        ens.paths.col(j) = ev;
    }
    return ens;
}

std::vector<double> sample_positions(const SimConfig& cfg, double t, int replica) {
    validate(cfg);
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument("sample_positions: t in (0,1) required");
    const int n = cfg.n, m = cfg.n + cfg.alpha;
    CounterRng rng(cfg.seed, (std::uint64_t)replica);
    Eigen::MatrixXcd Q = end_frame(m, n, std::sqrt(cfg.a * cfg.b), rng);
    const double sd = std::sqrt(t * (1.0 - t));
    Eigen::MatrixXcd X = t * std::sqrt(cfg.b) * Q;
    X.topRows(n) += (1.0 - t) * std::sqrt(cfg.a) * Eigen::MatrixXcd::Identity(n, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c)
            X(r, c) += std::complex<double>(sd * rng.normal(), sd * rng.normal());
    Eigen::VectorXd ev = ordered_eigs(X);
    return std::vector<double>(ev.data(), ev.data() + n);
}

MarginalReport marginal_check(const SimConfig& cfg, double t, double lo, double hi,
                              int bins, const std::function<double(double)>& density) {
    if (cfg.replicas < 1 || bins < 2 || !(hi > lo))
        throw std::invalid_argument("marginal_check: bad arguments");
    const double width = (hi - lo) / bins;
    std::vector<double> counts(bins, 0.0);
    double inside = 0.0;
    for (int r = 0; r < cfg.replicas; ++r)
        for (double x : sample_positions(cfg, t, r))
            if (x >= lo && x < hi) {
                ++counts[std::min(bins - 1, (int)((x - lo) / width))];
                ++inside;
            }

    // expected counts by 8-point Gauss-Legendre per bin
    static const double gx[4] = {0.1834346424956498, 0.5255324099163290,
                                 0.7966664774136267, 0.9602898564975363};
    static const double gw[4] = {0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    MarginalReport rep;
    rep.dof = 0;
    for (int b = 0; b < bins; ++b) {
        double c0 = lo + (b + 0.5) * width, h = 0.5 * width, integ = 0.0;
        for (int k = 0; k < 4; ++k)
            integ += h * gw[k] * (density(c0 + h * gx[k]) + density(c0 - h * gx[k]));
        double exp_count = cfg.replicas * integ;
        double gap = std::fabs(counts[b] - exp_count) / (cfg.replicas * width);
        rep.sup_gap = std::max(rep.sup_gap, gap);
        if (exp_count >= 5.0) {
            double z = (counts[b] - exp_count) / std::sqrt(exp_count);
            rep.max_z = std::max(rep.max_z, std::fabs(z));
            rep.chi2 += z * z;
            ++rep.dof;
        }
    }
    rep.total_mass = inside / cfg.replicas;
    rep.p_value = rep.dof > 0 ? chi2_pvalue(rep.chi2, rep.dof) : 1.0;
    return rep;
}

void figure_emit(const PathEnsemble& ens, const std::string& format,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("figure_emit: cannot open " + path);
    const int n = (int)ens.paths.rows(), T = (int)ens.times.size();
    if (format == "csv") {
        out << "t,path,value\n";
        char buf[64];
        for (int j = 0; j < T; ++j)
            for (int i = 0; i < n; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", ens.times[j], i,
                              ens.paths(i, j));
                out << buf;
            }
    } else if (format == "svg") {
        const double W = 800.0, H = 500.0, mg = 40.0;
        double vmax = std::max(1e-300, ens.paths.maxCoeff());
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
            << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
            << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
        char buf[64];
        for (int i = 0; i < n; ++i) {
            out << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"0.8\" "
                   "points=\"";
            for (int j = 0; j < T; ++j) {
                double px = mg + ens.times[j] * (W - 2 * mg);
                double py = H - mg - ens.paths(i, j) / vmax * (H - 2 * mg);
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
                out << buf;
            }
            out << "\"/>\n";
        }
        out << "</svg>\n";
    } else {
        throw std::invalid_argument("figure_emit: format must be csv or svg");
    }
    if (!out) throw std::runtime_error("figure_emit: write failed");
}

}  // namespace hep
