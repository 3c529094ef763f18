#include "hep/finite_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hep/gl.hpp"
#include "hep/specfun.hpp"

namespace hep {

namespace {

cd cpow_i(cd z, int p) {
    if (p == 0) return cd(1.0, 0.0);
    cd base = p > 0 ? z : 1.0 / z;
    int q = std::abs(p);
    cd out(1.0, 0.0);
    while (q > 0) {
        if (q & 1) out *= base;
        base *= base;
        q >>= 1;
    }
    return out;
}

// trapezoid rule for \oint f(z) dz/z on the circle of given radius; doubled
// until stable (the integrands here are analytic in an annulus, so the rule
// converges geometrically).
cd circle_int(const std::function<cd(cd)>& f, double radius) {
    cd prev(0.0, 0.0);
    for (int npts = 64; npts <= 8192; npts *= 2) {
        cd sum(0.0, 0.0);
        for (int i = 0; i < npts; ++i) {
            double th = 2.0 * M_PI * (i + 0.5) / npts;
            sum += f(std::polar(radius, th));
        }
        cd val = sum * cd(0.0, 2.0 * M_PI / npts);
        if (npts > 64 && std::abs(val - prev) <= 1e-13 * (1.0 + std::abs(val)))
            return val;
        prev = val;
    }
    return prev;
}

Matrix moment_matrix(const EnsembleConfig& cfg, double radius) {
    std::vector<cd> mom(2 * cfg.n - 1);
    for (int d = -(cfg.n - 1); d <= cfg.n - 1; ++d)
        mom[d + cfg.n - 1] = moment(cfg, d, radius);
    Matrix A(cfg.n, cfg.n);
    for (int j = 0; j < cfg.n; ++j)
        for (int k = 0; k < cfg.n; ++k) A(j, k) = mom[j - k + cfg.n - 1];
    return A;
}

// signed value exp(l)*s with underflow flushed to zero
cd from_log(double l, double s) {
    if (l < -745.0) return cd(0.0, 0.0);
    if (l > 700.0) throw std::overflow_error("finite_kernel: coefficient overflow");
    return cd(s * std::exp(l), 0.0);
}

void assemble_blocks(BwBlocks& bw) {
    int m = bw.m, al = bw.alpha;
    int len = static_cast<int>(std::min(bw.zc.size(), bw.wc.size()));
    bw.A = Matrix::Zero(m, m);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            cd s(0.0, 0.0);
            for (int j = 0; j + std::max(k, l) < len; ++j)
                s += bw.zc[l + j] * bw.wc[k + j];
            bw.A(k, l) = (k == l ? 1.0 : 0.0) - s;
        }
    bw.B = Matrix::Zero(al, m);
    int lenh = static_cast<int>(std::min(bw.zc.size(), bw.whc.size()));
    for (int k = 0; k < al; ++k)
        for (int l = 0; l < m; ++l) {
            cd s(0.0, 0.0);
            for (int j = 0; j + std::max(k, l) < lenh; ++j)
                s += bw.zc[l + j] * bw.whc[k + j];
            bw.B(k, l) = -s;
        }
    bw.inv = block_schur_inverse(bw.A, bw.C, bw.B, bw.D);
}

// scaled powers base^0..base^(len-1)
std::vector<ScaledValue> scaled_powers(cd base, int len) {
    std::vector<ScaledValue> p(len);
    p[0] = ScaledValue(cd(1.0, 0.0), 0.0);
    for (int i = 1; i < len; ++i) p[i] = (p[i - 1] * base).normalized();
    return p;
}

// h-type suffix series sum_{i>=k} base^{i-k} coef[i] for k = 0..m-1
Vector suffix_series(const std::vector<cd>& coef, cd base, int m) {
    int len = static_cast<int>(coef.size());
    if (base == cd(0.0, 0.0)) {
        Vector out(m);
        for (int k = 0; k < m; ++k) out(k) = coef[k];
        return out;
    }
    std::vector<ScaledValue> p = scaled_powers(base, len);
    std::vector<ScaledValue> s(len + 1);
    s[len] = ScaledValue(cd(0.0, 0.0), 0.0);
    for (int i = len - 1; i >= 0; --i) s[i] = s[i + 1] + p[i] * coef[i];
    Vector out(m);
    for (int k = 0; k < m; ++k) out(k) = (s[k] / p[k]).value();
    return out;
}

struct NodeFactors {
    std::vector<cd> c;  // weight * algebraic * exp factor per node
    Matrix vecs;        // per-node resolvent row/column data
};

}  // namespace

cd weight_w(cd z, double x, double y, double t, int alpha) {
    cd e = std::exp((z - 1.0) * (x / (2.0 * t)) + (1.0 / z - 1.0) * (y / (2.0 * t)));
    return cpow_i(z, alpha) * e / cd(0.0, 4.0 * M_PI * t);
}

cd moment(const EnsembleConfig& cfg, int d, double radius) {
    return circle_int(
        [&](cd z) { return cpow_i(z, d) * weight_w(z, cfg.a, cfg.b, 1.0, cfg.alpha); },
        radius);
}

cd cn_toeplitz(const EnsembleConfig& cfg, cd xi, cd eta, double radius) {
    int n = cfg.n;
    std::vector<cd> mom(2 * n + 3);
    for (int d = -n - 1; d <= n + 1; ++d) mom[d + n + 1] = moment(cfg, d, radius);
    auto m = [&](int d) { return mom[d + n + 1]; };
    // numerator: (n-1)x(n-1) Toeplitz determinant of the deformed weight
    Matrix num(n - 1, n - 1);
    for (int j = 0; j < n - 1; ++j)
        for (int k = 0; k < n - 1; ++k) {
            int d = j - k;
            num(j, k) = (1.0 + xi / eta) * m(d) - xi * m(d + 1) - m(d - 1) / eta;
        }
    Matrix den(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) den(j, k) = m(j - k);
    cd dn = den.determinant();
    cd dm = (n == 1) ? cd(1.0, 0.0) : num.determinant();
    return cpow_i(eta / xi, n - 1) * dm / dn;
}

cd cn_cd_product(const EnsembleConfig& cfg, cd xi, cd eta, double radius) {
    int n = cfg.n;
    Matrix A = moment_matrix(cfg, radius);
    Vector row(n), col(n);
    for (int k = 0; k < n; ++k) row(k) = cpow_i(eta, k);
    for (int j = 0; j < n; ++j) col(j) = cpow_i(xi, -j);
    return row.transpose() * A.fullPivLu().solve(col);
}

cd kn_direct(const EnsembleConfig& cfg, double s, double x, double t, double y) {
    int n = cfg.n;
    Matrix A = moment_matrix(cfg, 1.0);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!(cond < 1e12))
        throw std::runtime_error(
            "kn_direct: moment matrix condition number " + std::to_string(cond) +
            " too large; use the contour-operator route instead");
    Vector phi(n), psi(n);
    for (int k = 0; k < n; ++k) {
        phi(k) = circle_int(
            [&](cd u) {
                return cpow_i((1.0 / u - s) / (1.0 - s), k) *
                       weight_w(u, x, cfg.b, 1.0 - s, cfg.alpha);
            },
            1.0);
        psi(k) = circle_int(
            [&](cd u) {
                return cpow_i((u - 1.0 + t) / t, k) *
                       weight_w(u, cfg.a, y, t, cfg.alpha);
            },
            1.0);
    }
    cd val = phi.transpose() * A.fullPivLu().solve(psi);
    if (t > s) val -= transition_density(cfg.alpha, t - s, x, y);
    return val;
}

cd kn_toeplitz(const EnsembleConfig& cfg, double s, double x, double t, double y,
               int npts) {
    int n = cfg.n;
    Matrix Ainv = moment_matrix(cfg, 1.0).fullPivLu().inverse();
    // sum_{u,v} C_n(xi(u),eta(v)) w(u;a,y,t) w(v;x,b,1-s) du/u dv/v factorizes
    // over the polynomial index of the Christoffel-Darboux form.
    Vector acc_u = Vector::Zero(n), acc_v = Vector::Zero(n);
    cd dthet = cd(0.0, 2.0 * M_PI / npts);
    for (int i = 0; i < npts; ++i) {
        double th = 2.0 * M_PI * (i + 0.5) / npts;
        cd u = std::polar(1.0, th);
        cd xi = t / (u - 1.0 + t);
        cd wu = weight_w(u, cfg.a, y, t, cfg.alpha) * dthet;
        cd v = u;
        cd eta = (1.0 / v - s) / (1.0 - s);
        cd wv = weight_w(v, x, cfg.b, 1.0 - s, cfg.alpha) * dthet;
        for (int j = 0; j < n; ++j) {
            acc_u(j) += wu * cpow_i(xi, -j);
            acc_v(j) += wv * cpow_i(eta, j);
        }
    }
    cd val = acc_v.transpose() * (Ainv * acc_u);
    if (t > s) val -= transition_density(cfg.alpha, t - s, x, y);
    return val;
}

BwBlocks bw_blocks(const EnsembleConfig& cfg, int m) {
    BwBlocks bw;
    bw.n = cfg.n;
    bw.alpha = cfg.alpha;
    bw.m = m;
    bw.a = cfg.a;
    bw.b = cfg.b;
    double c = std::sqrt(cfg.a * cfg.b);
    double logbeta = 0.5 * (std::log(cfg.a) - std::log(cfg.b));
    int ilen = m + std::max(60, static_cast<int>(c + 34.0 * std::cbrt(c + 1.0) +
                                                 40.0 - cfg.n));
    int mmax = cfg.n + cfg.alpha + 2 + ilen;
    std::vector<double> J = bessel_j_seq(mmax, c);
    auto coef = [&](int order, double betasign) {
        // betasign = +1 gives beta^order J_order, -1 gives beta^{-order} J_order
        int q = std::abs(order);
        double j = (order >= 0) ? J[q] : ((q % 2) ? -J[q] : J[q]);
        if (j == 0.0) return cd(0.0, 0.0);
        return from_log(betasign * order * logbeta + std::log(std::fabs(j)),
                        j > 0.0 ? 1.0 : -1.0);
    };
    bw.zc.resize(ilen);
    bw.wc.resize(ilen);
    bw.whc.resize(ilen);
    for (int i = 0; i < ilen; ++i) {
        bw.zc[i] = coef(i + cfg.n + cfg.alpha + 1, +1.0);
        bw.wc[i] = coef(i + cfg.n + cfg.alpha + 1, -1.0);
        bw.whc[i] = coef(i + cfg.n + 1, -1.0);
    }
    bw.C = Matrix::Zero(m, cfg.alpha);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < cfg.alpha; ++l) bw.C(k, l) = coef(cfg.n + cfg.alpha + k - l, -1.0);
    bw.D = Matrix::Zero(cfg.alpha, cfg.alpha);
    for (int k = 0; k < cfg.alpha; ++k)
        for (int l = 0; l < cfg.alpha; ++l) bw.D(k, l) = coef(cfg.n + k - l, -1.0);
    assemble_blocks(bw);
    return bw;
}

BwBlocks bw_blocks_quadrature(const EnsembleConfig& cfg, int m, double rho) {
    if (rho <= 1.0) throw std::invalid_argument("bw_blocks_quadrature: need rho > 1");
    BwBlocks bw;
    bw.n = cfg.n;
    bw.alpha = cfg.alpha;
    bw.m = m;
    bw.a = cfg.a;
    bw.b = cfg.b;
    int ilen = m + std::min(static_cast<int>(600.0 / std::log(rho)),
                            static_cast<int>(std::sqrt(cfg.a * cfg.b) + 200));
    const int nq = 1024;
    bw.zc.assign(ilen, cd(0.0, 0.0));
    bw.wc.assign(ilen, cd(0.0, 0.0));
    bw.whc.assign(ilen, cd(0.0, 0.0));
    bw.C = Matrix::Zero(m, cfg.alpha);
    bw.D = Matrix::Zero(cfg.alpha, cfg.alpha);
    for (int i = 0; i < nq; ++i) {
        double th = 2.0 * M_PI * (i + 0.5) / nq;
        cd w = std::polar(rho, th);
        cd z = std::polar(1.0 / rho, th);
        cd fw = std::exp((cfg.b * w - cfg.a / w) / 2.0) / static_cast<double>(nq);
        cd fz = std::exp((cfg.a / z - cfg.b * z) / 2.0) / static_cast<double>(nq);
        cd zp = cpow_i(z, cfg.n + cfg.alpha + 1);
        cd wp = cpow_i(w, -(cfg.n + cfg.alpha + 1));
        cd whp = cpow_i(w, -(cfg.n + 1));
        for (int j = 0; j < ilen; ++j) {
            bw.zc[j] += zp * fz;
            bw.wc[j] += wp * fw;
            bw.whc[j] += whp * fw;
            zp *= z;
            wp /= w;
            whp /= w;
        }
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < cfg.alpha; ++l)
                bw.C(k, l) += cpow_i(w, l - k - cfg.n - cfg.alpha) * fw;
        for (int k = 0; k < cfg.alpha; ++k)
            for (int l = 0; l < cfg.alpha; ++l)
                bw.D(k, l) += cpow_i(w, l - k - cfg.n) * fw;
    }
    assemble_blocks(bw);
    return bw;
}

Vector bw_h(const BwBlocks& bw, cd eta) { return suffix_series(bw.wc, -eta, bw.m); }

Vector bw_hhat(const BwBlocks& bw, cd eta) {
    return suffix_series(bw.whc, -eta, bw.alpha);
}

Vector bw_g(const BwBlocks& bw, cd xi) {
    // g_l = -(-xi)^{l-1} sum_{i>=l} (-xi)^{-i} zc_i
    Vector s = suffix_series(bw.zc, -1.0 / xi, bw.m);
    Vector out(bw.m);
    for (int l = 0; l < bw.m; ++l) out(l) = -s(l) / (-xi);
    return out;
}

Vector bw_h_quadrature(const BwBlocks& bw, cd eta, double rho) {
    const int nq = 2048;
    Vector h = Vector::Zero(bw.m);
    for (int i = 0; i < nq; ++i) {
        double th = 2.0 * M_PI * (i + 0.5) / nq;
        cd w = std::polar(rho, th);
        cd fw = std::exp((bw.b * w - bw.a / w) / 2.0) /
                ((w + eta) * static_cast<double>(nq));
        cd wp = cpow_i(w, -(bw.n + bw.alpha));
        for (int k = 0; k < bw.m; ++k) {
            h(k) += wp * fw;
            wp /= w;
        }
    }
    return h;
}

namespace {

cd m_block_impl(const BwBlocks& bw, cd xi, cd eta, bool small_radius) {
    Vector h = bw_h(bw, eta), hh = bw_hhat(bw, eta), g = bw_g(bw, xi);
    if (small_radius) {
        // move the resolvent poles back across the circles: subtract the
        // w = -eta residue from h, hhat and add the z = -xi one to g
        cd rh = std::exp((bw.a / eta - bw.b * eta) / 2.0);
        cd rg = std::exp((bw.b * xi - bw.a / xi) / 2.0);
        for (int k = 0; k < bw.m; ++k) {
            h(k) -= cpow_i(-eta, -(k + bw.n + bw.alpha + 1)) * rh;
            g(k) += cpow_i(-xi, k + bw.n + bw.alpha) * rg;
        }
        for (int k = 0; k < bw.alpha; ++k)
            hh(k) -= cpow_i(-eta, -(k + bw.n + 1)) * rh;
    }
    Vector sol = bw.inv.apply(h, hh);
    cd dot(0.0, 0.0);
    for (int i = 0; i < bw.m; ++i) dot += g(i) * sol(i);
    for (int l = 0; l < bw.alpha; ++l) dot += cpow_i(-xi, l) * sol(bw.m + l);
    return 1.0 / (eta - xi) - dot;
}

}  // namespace

cd m_block(const BwBlocks& bw, cd xi, cd eta) {
    return m_block_impl(bw, xi, eta, false);
}

cd m_block_cd(const BwBlocks& bw, cd xi, cd eta) {
    return m_block_impl(bw, xi, eta, true);
}

cd kn_operator_nodes(const EnsembleConfig& cfg, const BwBlocks& bw, double s,
                     double x, double t, double y, const ContourNodes& xi_nodes,
                     const ContourNodes& eta_nodes) {
    int nal = cfg.n + cfg.alpha;
    int mx = static_cast<int>(xi_nodes.z.size());
    int me = static_cast<int>(eta_nodes.z.size());
    int dim = bw.m + cfg.alpha;
    // per-eta node: solved resolvent column and combined scalar weight
    Matrix Y(dim, me);
    Vector ceta(me);
    for (int j = 0; j < me; ++j) {
        cd eta = eta_nodes.z[j];
        Y.col(j) = bw.inv.apply(bw_h(bw, eta), bw_hhat(bw, eta));
        cd leta = static_cast<double>(nal) * std::log(eta) + eta * cfg.b / 2.0 -
                  cfg.a / (2.0 * eta) -
                  x * (eta - 1.0) / (2.0 * (1.0 - s) * eta + 2.0 * s);
        cd alg = cpow_i((1.0 - s) * eta + s, cfg.alpha + 1);
        if (leta.real() > 700.0)
            throw std::overflow_error("kn_operator: eta contour is not steep enough");
        cd e = leta.real() < -745.0 ? cd(0.0, 0.0)
                                    : std::exp(leta.real()) * std::exp(cd(0.0, leta.imag()));
        ceta(j) = eta_nodes.w[j] * e / alg;
    }
    Matrix G(mx, dim);
    Vector cxi(mx);
    for (int i = 0; i < mx; ++i) {
        cd xi = xi_nodes.z[i];
        Vector g = bw_g(bw, xi);
        for (int k = 0; k < bw.m; ++k) G(i, k) = g(k);
        for (int l = 0; l < cfg.alpha; ++l) G(i, bw.m + l) = cpow_i(-xi, l);
        cd lxi = -static_cast<double>(nal) * std::log(xi) - xi * cfg.b / 2.0 +
                 cfg.a / (2.0 * xi) +
                 y * (xi - 1.0) / (2.0 * (1.0 - t) * xi + 2.0 * t);
        cd alg = cpow_i((1.0 - t) * xi + t, cfg.alpha - 1);
        if (lxi.real() > 700.0)
            throw std::overflow_error("kn_operator: xi contour is not steep enough");
        cd e = lxi.real() < -745.0 ? cd(0.0, 0.0)
                                   : std::exp(lxi.real()) * std::exp(cd(0.0, lxi.imag()));
        cxi(i) = xi_nodes.w[i] * e * alg;
    }
    // dot-product part: sum_ij cxi_i ceta_j (row_i . col_j)
    cd total(0.0, 0.0);
    Vector left = G.transpose() * cxi;   // dim
    Vector right = Y * ceta;             // dim
    for (int k = 0; k < dim; ++k) total -= left(k) * right(k);
    // pole part 1/(eta - xi)
    for (int i = 0; i < mx; ++i) {
        if (cxi(i) == cd(0.0, 0.0)) continue;
        cd acc(0.0, 0.0);
        for (int j = 0; j < me; ++j) acc += ceta(j) / (eta_nodes.z[j] - xi_nodes.z[i]);
        total += cxi(i) * acc;
    }
    cd val = -total / (8.0 * M_PI * M_PI);
    if (t > s) val -= transition_density(cfg.alpha, t - s, x, y);
    return val;
}

cd kn_operator(const EnsembleConfig& cfg, double s, double x, double t, double y) {
    XiEtaContours gc = build_gamma_xi_eta(s, t);
    ContourNodes xi_nodes = discretize(gc.xi, 24, 16);
    ContourNodes eta_nodes = discretize(gc.eta_inner, 20, 16);
    ContourNodes loop = discretize(gc.eta_loop, 12, 16);
    eta_nodes.z.insert(eta_nodes.z.end(), loop.z.begin(), loop.z.end());
    eta_nodes.w.insert(eta_nodes.w.end(), loop.w.begin(), loop.w.end());
    // adaptive l^2 truncation: grow until M stabilizes at probe points
    cd xi0 = xi_nodes.z[xi_nodes.z.size() / 3];
    cd eta0 = eta_nodes.z[eta_nodes.z.size() / 3];
    cd eta1 = loop.z[0];
    int m = 16;
    BwBlocks bw = bw_blocks(cfg, m);
    for (; m <= 256; ) {
        BwBlocks next = bw_blocks(cfg, 2 * m);
        double d = std::abs(m_block(next, xi0, eta0) - m_block(bw, xi0, eta0)) +
                   std::abs(m_block(next, xi0, eta1) - m_block(bw, xi0, eta1));
        bw = std::move(next);
        m *= 2;
        if (d < 1e-10) break;
    }
    return kn_operator_nodes(cfg, bw, s, x, t, y, xi_nodes, eta_nodes);
}

namespace {

// affine image z -> scale*z + shift of a contour (real scale > 0)
Contour affine(const Contour& c, double scale, cd shift) {
    Contour out;
    for (const Piece& p : c.pieces) {
        if (p.kind == Piece::Line)
            out.pieces.push_back(Contour::line(scale * p.a + shift, scale * p.b + shift));
        else {
            Piece q = Contour::arc(scale * p.center + shift, scale * p.radius, p.th0, p.th1);
            out.pieces.push_back(q);
        }
    }
    return out;
}

// positive roots of |p0 + r e^{i phi} - c|^2 = R^2
std::pair<double, double> leg_circle_roots(cd p0, double phi, double c, double R) {
    cd d = p0 - c;
    double b2 = (d * std::polar(1.0, -phi)).real();
    double disc = b2 * b2 - (std::norm(d) - R * R);
    if (disc < 0.0) throw std::runtime_error("tacnode contour: leg misses circle");
    double sq = std::sqrt(disc);
    return {-b2 - sq, -b2 + sq};
}

}  // namespace

cd kn_tacnode_scaled(int bigN, double q, int alpha, double sigma, double s,
                     double x, double t, double y) {
    double N = bigN;
    EnsembleConfig cfg;
    cfg.n = 2 * bigN;
    cfg.alpha = alpha;
    cfg.a = 2.0 * q * N * (1.0 - sigma / (2.0 * std::pow(N, 2.0 / 3.0)));
    cfg.b = cfg.a / (q * q);
    double r = q / ((1.0 + q) * (1.0 + q)) * std::pow(N, -1.0 / 3.0);
    double sp = q / (1.0 + q) + r * s;
    double tp = q / (1.0 + q) + r * t;
    double xp = 2.0 * r * x;
    double yp = 2.0 * r * y;

    double C = std::cbrt(N);
    double w0 = std::max(-s, -t) + 1.0;
    double v0 = w0 + 1.0;
    if (!(v0 < C))
        throw std::invalid_argument("kn_tacnode_scaled: N too small for these times");
    // xi contour in local coordinates u, xi = q (u/C - 1): vertex w0 with legs
    // at +-2pi/3 closed by the right arc of the circle |u - C| = R2
    // the xi arc must enclose the |u - C| = C circle carrying the eta contour
    double R2 = std::max(1.3 * (C - w0), 1.15 * C);
    double rup = leg_circle_roots(w0, 2.0 * M_PI / 3.0, C, R2).second;
    cd eup = w0 + std::polar(rup, 2.0 * M_PI / 3.0);
    double thu = std::arg(eup - C);
    Contour xi_u;
    xi_u.pieces.push_back(Contour::arc(C, R2, -thu, thu));
    xi_u.pieces.push_back(Contour::line(eup, w0));
    xi_u.pieces.push_back(Contour::line(w0, std::conj(eup)));
    // eta main loop: counterclockwise around eta = 0 with a local dent at the
    // vertex v0 keeping the eta singularity outside.  The closing arc sits on
    // |u - C| = C (image |eta| = q) where the leading exponent is purely
    // oscillatory, so it needs O(n) quadrature nodes; the vertex lies inside
    // that circle and each leg meets it exactly once.
    double R1 = C;
    double rv = leg_circle_roots(v0, M_PI / 3.0, C, R1).second;
    cd evup = v0 + std::polar(rv, M_PI / 3.0);
    double thv = std::arg(evup - C);
    if (thv < 0.0) thv += 2.0 * M_PI;
    Contour eta_u;
    eta_u.pieces.push_back(Contour::arc(C, R1, -thv, thv));
    eta_u.pieces.push_back(Contour::line(evup, v0));
    eta_u.pieces.push_back(Contour::line(v0, std::conj(evup)));
    // small counterclockwise loop around the eta singularity
    double eta_sing = -sp / (1.0 - sp);
    double u_sing = C * (1.0 + eta_sing / q);
    Contour loop_u = Contour::circle(u_sing, 0.3);

    double scale = q / C;
    Contour xi_c = affine(xi_u, scale, -q);
    Contour eta_c = affine(eta_u, scale, -q);
    Contour loop_c = affine(loop_u, scale, -q);

    int arcp = std::max(60, static_cast<int>(16.0 * std::cbrt(N) * std::cbrt(N)));
    ContourNodes xi_nodes, eta_nodes;
    {
        Contour arc_only, legs_only;
        arc_only.pieces.push_back(xi_c.pieces[0]);
        legs_only.pieces.push_back(xi_c.pieces[1]);
        legs_only.pieces.push_back(xi_c.pieces[2]);
        xi_nodes = discretize(arc_only, arcp, 16);
        ContourNodes l = discretize(legs_only, 40, 16);
        xi_nodes.z.insert(xi_nodes.z.end(), l.z.begin(), l.z.end());
        xi_nodes.w.insert(xi_nodes.w.end(), l.w.begin(), l.w.end());
    }
    {
        Contour arc_only, legs_only;
        arc_only.pieces.push_back(eta_c.pieces[0]);
        legs_only.pieces.push_back(eta_c.pieces[1]);
        legs_only.pieces.push_back(eta_c.pieces[2]);
        // the |eta| = q arc is purely oscillatory with ~n phase turns
        int arcp_eta = std::max(60, static_cast<int>(1.2 * N));
        int legp_eta = std::max(40, static_cast<int>(N / 2.0));
        eta_nodes = discretize(arc_only, arcp_eta, 16);
        ContourNodes l = discretize(legs_only, legp_eta, 16);
        eta_nodes.z.insert(eta_nodes.z.end(), l.z.begin(), l.z.end());
        eta_nodes.w.insert(eta_nodes.w.end(), l.w.begin(), l.w.end());
        ContourNodes lp = discretize(loop_c, 10, 16);
        eta_nodes.z.insert(eta_nodes.z.end(), lp.z.begin(), lp.z.end());
        eta_nodes.w.insert(eta_nodes.w.end(), lp.w.begin(), lp.w.end());
    }
    int m = std::clamp(static_cast<int>(12.0 * std::cbrt(N)), 24, 128);
    BwBlocks bw = bw_blocks(cfg, m);
    cd val = kn_operator_nodes(cfg, bw, sp, xp, tp, yp, xi_nodes, eta_nodes);
    return 2.0 * r * val;
}

cd kn_pearcey_prelimit(int n, double alpha, const std::vector<double>& bs,
                       double s, double x, double t, double y) {
    if (bs.empty() || static_cast<int>(bs.size()) != n)
        throw std::invalid_argument("kn_pearcey_prelimit: need n endpoints");
    double bmin = *std::min_element(bs.begin(), bs.end());
    double bmax = *std::max_element(bs.begin(), bs.end());
    if (bmin <= 0.0) throw std::invalid_argument("kn_pearcey_prelimit: endpoints > 0");

    // w-side values F(w) = p_{t-1}(w, y) w^alpha e^{-w/2} prod_j (w - b_j)
    auto logprod_w = [&](double w) {
        double l = 0.0;
        for (double bj : bs) l += std::log(bj - w);
        return l;
    };
    auto Fw = [&](double w) -> ScaledValue {
        ScaledValue p = transition_density_scaled(alpha, t - 1.0, w, y);
        ScaledValue rest =
            scaled_exp(cd(-w / 2.0 + logprod_w(w), 0.0)) * cpow_above(w, alpha);
        double sgn = (n % 2) ? -1.0 : 1.0;
        return (p * rest * cd(sgn, 0.0)).normalized();
    };
    // truncation of (-inf, 0]: net exponential decay rate
    auto wexp = [&](double w) {
        return w * t / (2.0 * (1.0 - t)) + logprod_w(w) - logprod_w(0.0);
    };
    double L = 1.0;
    while (wexp(-L) > -46.0 && L < 1e7) L *= 1.3;

    // graded Gauss-Legendre panels on [-L, 0], denser near 0
    std::vector<double> wx, ww;
    {
        double rate0 = t / (2.0 * (1.0 - t)) + n / bmin +
                       std::sqrt(std::max(y, 1e-12)) / (1.0 - t);
        double lo = std::min(0.02 * bmin, L * 1e-3);
        double b0 = 0.0, b1 = lo;
        while (b0 < L) {
            b1 = std::min(b1, L);
            int panels = std::max(2, static_cast<int>((b1 - b0) * rate0 / 4.0));
            panels = std::min(panels, 64);
            std::vector<double> px, pw;
            gl_panels(-b1, -b0, panels, 16, px, pw);
            wx.insert(wx.end(), px.begin(), px.end());
            ww.insert(ww.end(), pw.begin(), pw.end());
            b0 = b1;
            b1 *= 3.0;
        }
    }
    // z-side wedge: vertex d > 0, legs at +-pi/3 graded geometrically to
    // radius R, closed by the arc through the left half plane
    double d = 0.02 * bmin;
    double R = 2.5 * bmax;
    // counterclockwise sector boundary: lower leg out, short arc through the
    // positive axis, upper leg in, chord down at radius d (the endpoints b_j
    // stay inside, the w half-line stays outside)
    Contour wedge;
    {
        for (double rr = d; rr < R;) {
            double nxt = std::min(rr * 2.2, R);
            wedge.pieces.push_back(Contour::line(std::polar(rr, -M_PI / 3.0),
                                                 std::polar(nxt, -M_PI / 3.0)));
            rr = nxt;
        }
        wedge.pieces.push_back(Contour::arc(0.0, R, -M_PI / 3.0, M_PI / 3.0));
        for (double rr = R; rr > d;) {
            double nxt = std::max(rr / 2.2, d);
            wedge.pieces.push_back(Contour::line(std::polar(rr, M_PI / 3.0),
                                                 std::polar(nxt, M_PI / 3.0)));
            rr = nxt;
        }
        wedge.pieces.push_back(
            Contour::line(std::polar(d, M_PI / 3.0), std::polar(d, -M_PI / 3.0)));
    }
    double zrate = s / (2.0 * (1.0 - s)) + n / (0.8 * bmin) + 0.5;
    ContourNodes zn;
    for (const Piece& p : wedge.pieces) {
        Contour single;
        single.pieces.push_back(p);
        double len = (p.kind == Piece::Line) ? std::abs(p.b - p.a)
                                             : p.radius * std::fabs(p.th1 - p.th0);
        int panels = std::clamp(static_cast<int>(len * zrate / 4.0) + 2, 2, 700);
        ContourNodes nn = discretize(single, panels, 16);
        zn.z.insert(zn.z.end(), nn.z.begin(), nn.z.end());
        zn.w.insert(zn.w.end(), nn.w.begin(), nn.w.end());
    }

    // z-side values G(z) = p_{1-s}(x, z) z^{-alpha} e^{z/2} prod_j (z - b_j)^{-1}
    // (the z^alpha of the density cancels the explicit z^{-alpha} exactly)
    double t1 = 1.0 - s;
    auto Gz = [&](cd z) -> ScaledValue {
        cd lp(0.0, 0.0);
        for (double bj : bs) lp += std::log(z - bj);
        ScaledValue g = g_entire(alpha, x * z / (4.0 * t1 * t1));
        ScaledValue e = scaled_exp(-(x + z) / (2.0 * t1) + z / 2.0 - lp);
        return (g * e * (1.0 / cpow_above(2.0 * t1, alpha + 1.0))).normalized();
    };

    // collapse to common scales
    size_t nw = wx.size(), nz = zn.z.size();
    std::vector<cd> fv(nw), gv(nz);
    double LF = -1e300, LG = -1e300;
    std::vector<ScaledValue> fs(nw), gs(nz);
    for (size_t i = 0; i < nw; ++i) {
        fs[i] = Fw(wx[i]);
        LF = std::max(LF, fs[i].log_abs());
    }
    for (size_t j = 0; j < nz; ++j) {
        gs[j] = Gz(zn.z[j]);
        LG = std::max(LG, gs[j].log_abs());
    }
    for (size_t i = 0; i < nw; ++i)
        fv[i] = (fs[i].log_scale - LF < -745.0) ? cd(0.0, 0.0)
                                                : fs[i].mantissa * std::exp(fs[i].log_scale - LF);
    for (size_t j = 0; j < nz; ++j)
        gv[j] = (gs[j].log_scale - LG < -745.0) ? cd(0.0, 0.0)
                                                : gs[j].mantissa * std::exp(gs[j].log_scale - LG);
    cd acc(0.0, 0.0);
    for (size_t i = 0; i < nw; ++i) {
        if (fv[i] == cd(0.0, 0.0)) continue;
        cd inner(0.0, 0.0);
        for (size_t j = 0; j < nz; ++j)
            inner += gv[j] * zn.w[j] / (wx[i] - zn.z[j]);
        acc += fv[i] * ww[i] * inner;
    }
    ScaledValue total = ScaledValue(acc, LF + LG) * (cd(-1.0, 0.0) / cd(0.0, 2.0 * M_PI));
    cd val = total.value();
    if (t > s) val -= transition_density(alpha, t - s, x, y);
    return val;
}

}  // namespace hep
