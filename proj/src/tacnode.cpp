#include "hep/tacnode.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hep/gl.hpp"
#include "hep/specfun.hpp"

namespace hep {

namespace {

// Fornberg weights for the m-th derivative at x0 from the nodes xs.
std::vector<double> fd_weights(int m, double x0, const std::vector<double>& xs) {
    int n = (int)xs.size();
    if (n < m + 1) throw std::invalid_argument("fd_weights: not enough nodes");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

}  // namespace

AiryOperatorSet build_airy_ops(const TacnodeParams& p) {
    if (p.alpha < 0) throw std::invalid_argument("build_airy_ops: alpha must be >= 0");
    if (p.L <= 0.0 || p.m < 24) throw std::invalid_argument("build_airy_ops: bad grid spec");
    AiryOperatorSet ops;
    ops.p = p;
    const int order = 12;
    int panels = std::max(4, (p.m + order - 1) / order);
    gl_panels(0.0, p.L, panels, order, ops.x, ops.w);
    const int m = (int)ops.x.size();
    const int a = p.alpha;

    // Boundary cluster for one-sided 4th order derivative slots: k-th
    // derivative from k+4 uniformly spaced points starting at 0.
    const double delta = 5e-3;
    const int nc = a > 0 ? a + 3 : 0;
    ops.xc.resize(nc);
    for (int c = 0; c < nc; ++c) ops.xc[c] = c * delta;
    ops.fd.resize(a, nc);
    for (int k = 0; k < a; ++k) {
        std::vector<double> sub(ops.xc.begin(), ops.xc.begin() + (k + 4));
        std::vector<double> wk = fd_weights(k, 0.0, sub);
        for (int c = 0; c < nc; ++c) ops.fd(k, c) = c < (int)wk.size() ? wk[c] : 0.0;
    }

    // Shared lambda grid: Airy decay on the right, exponential factors
    // exp(-v lambda) with |Re v| <= ~3 still converge well before +60.
    gl_panels(p.sigma, p.sigma + 60.0, 30, 16, ops.lam, ops.lamw);
    const int nl = (int)ops.lam.size();
    ops.u_mat.resize(m, nl);
    for (int i = 0; i < m; ++i)
        for (int q = 0; q < nl; ++q) ops.u_mat(i, q) = airy(0, ops.x[i] + ops.lam[q]);
    ops.uc_mat.resize(nc, nl);
    for (int c = 0; c < nc; ++c)
        for (int q = 0; q < nl; ++q) ops.uc_mat(c, q) = airy(0, ops.xc[c] + ops.lam[q]);

    Eigen::VectorXd lw = Eigen::Map<const Eigen::VectorXd>(ops.lamw.data(), nl);
    ops.kai = ops.u_mat * lw.asDiagonal() * ops.u_mat.transpose();
    ops.kai_c = ops.uc_mat * lw.asDiagonal() * ops.u_mat.transpose();

    ops.a_kernel.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            ops.a_kernel(i, j) = ops.a_kernel(j, i) = airy(0, ops.x[i] + ops.x[j] + p.sigma);
    ops.ac_kernel.resize(nc, m);
    for (int c = 0; c < nc; ++c)
        for (int j = 0; j < m; ++j) ops.ac_kernel(c, j) = airy(0, ops.xc[c] + ops.x[j] + p.sigma);

    ops.A_blk = Matrix::Identity(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            ops.A_blk(i, j) -= ops.kai(i, j) * std::sqrt(ops.w[i] * ops.w[j]);
    ops.C_blk.resize(m, a);
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < a; ++l)
            ops.C_blk(i, l) = airy(l, ops.x[i] + p.sigma) * std::sqrt(ops.w[i]);
    ops.B_blk.resize(a, m);
    for (int k = 0; k < a; ++k)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int q = 0; q < nl; ++q)
                s += ops.lamw[q] * airy(k, ops.lam[q]) * ops.u_mat(j, q);
            ops.B_blk(k, j) = -s * std::sqrt(ops.w[j]);
        }
    ops.D_blk.resize(a, a);
    for (int k = 0; k < a; ++k)
        for (int l = 0; l < a; ++l) ops.D_blk(k, l) = airy(k + l, p.sigma);

    ops.inv = block_schur_inverse(ops.A_blk, ops.C_blk, ops.B_blk, ops.D_blk);
    ops.a_lu = Eigen::PartialPivLU<Matrix>(ops.A_blk);

    if (a > 0) {
        Eigen::JacobiSVD<Matrix> svd(ops.inv.schur);
        double smin = svd.singularValues().minCoeff();
        double smax = svd.singularValues().maxCoeff();
        if (!(smin > 1e-10 * smax))
            throw std::runtime_error(
                "build_airy_ops: block operator numerically singular at alpha=" +
                std::to_string(a) + ", sigma=" + std::to_string(p.sigma));
    }
    return ops;
}

Matrix schur_complement(const AiryOperatorSet& ops) { return ops.inv.schur; }

Matrix schur_complement_repr(const AiryOperatorSet& ops) {
    const int m = (int)ops.x.size();
    const int a = ops.p.alpha;
    // This representation differentiates R in both arguments, so the
    // stencil amplification of roundoff is squared compared with the
    // one-argument slots; use a coarser, higher-order local cluster than
    // ops.xc (6th-order one-sided stencils on step 0.045).
    const double delta = 0.045;
    const int nc = a > 0 ? a + 5 : 0;
    std::vector<double> xc(nc);
    for (int c = 0; c < nc; ++c) xc[c] = c * delta;
    Eigen::MatrixXd fd(a, nc);
    for (int k = 0; k < a; ++k) {
        std::vector<double> sub(xc.begin(), xc.begin() + (k + 6));
        std::vector<double> wk = fd_weights(k, 0.0, sub);
        for (int c = 0; c < nc; ++c) fd(k, c) = c < (int)wk.size() ? wk[c] : 0.0;
    }
    const int nl = (int)ops.lam.size();
    Eigen::MatrixXd uc(nc, nl);
    for (int c = 0; c < nc; ++c)
        for (int q = 0; q < nl; ++q) uc(c, q) = airy(0, xc[c] + ops.lam[q]);
    Eigen::VectorXd lw = Eigen::Map<const Eigen::VectorXd>(ops.lamw.data(), nl);
    Eigen::MatrixXd kai_c = uc * lw.asDiagonal() * ops.u_mat.transpose();
    Eigen::MatrixXd ac_kernel(nc, m);
    for (int c = 0; c < nc; ++c)
        for (int j = 0; j < m; ++j)
            ac_kernel(c, j) = airy(0, xc[c] + ops.x[j] + ops.p.sigma);
    // R = A (id - A^2)^{-1} on the grid, then Nystrom-extended to the
    // boundary cluster in both arguments via R = A + A^2 R = A + R A^2.
    Eigen::MatrixXd sq(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sq(i, j) = std::sqrt(ops.w[i] * ops.w[j]);
    Eigen::MatrixXd asym = ops.a_kernel.cwiseProduct(sq);
    Eigen::MatrixXd rsym =
        (Eigen::MatrixXd::Identity(m, m) - asym * asym).partialPivLu().solve(asym);
    // plain-sample R(x_i, x_j)
    Eigen::MatrixXd r = rsym.cwiseQuotient(sq);
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(ops.w.data(), m);
    // R(x_i, xc) = A(x_i, xc) + sum_j R(x_i, x_j) w_j K(x_j, xc)
    Eigen::MatrixXd r_right = ac_kernel.transpose() + r * wv.asDiagonal() * kai_c.transpose();
    // R(xc, xc') = A(xc, xc') + sum_j K(xc, x_j) w_j R(x_j, xc')
    Eigen::MatrixXd acc(nc, nc);
    for (int c = 0; c < nc; ++c)
        for (int d = 0; d < nc; ++d) acc(c, d) = airy(0, xc[c] + xc[d] + ops.p.sigma);
    Eigen::MatrixXd rcc = acc + kai_c * wv.asDiagonal() * r_right;
    Matrix s(a, a);
    for (int k = 0; k < a; ++k)
        for (int l = 0; l < a; ++l) {
            double v = 0.0;
            for (int c = 0; c < nc; ++c)
                for (int d = 0; d < nc; ++d) v += fd(k, c) * fd(l, d) * rcc(c, d);
            s(k, l) = v;
        }
    return s;
}

namespace {

// exp(-v lam_q) on the shared lambda grid.
Vector exp_profile(const AiryOperatorSet& ops, cd v) {
    const int nl = (int)ops.lam.size();
    Vector e(nl);
    for (int q = 0; q < nl; ++q) {
        cd z = -v * ops.lam[q];
        e(q) = z.real() < -745.0 ? cd(0.0, 0.0) : std::exp(z);
    }
    return e;
}

Vector weighted_h(const AiryOperatorSet& ops, const Eigen::MatrixXd& rows, cd v) {
    Vector e = exp_profile(ops, v);
    const int nl = (int)ops.lam.size();
    for (int q = 0; q < nl; ++q) e(q) *= ops.lamw[q];
    return rows.cast<cd>() * e;
}

}  // namespace

Vector h_grid(const AiryOperatorSet& ops, cd v) {
    Vector h = weighted_h(ops, ops.u_mat, v);
    for (int i = 0; i < h.size(); ++i) h(i) *= std::sqrt(ops.w[i]);
    return h;
}

Vector h_cluster(const AiryOperatorSet& ops, cd v) { return weighted_h(ops, ops.uc_mat, v); }

cd resolvent_inner(const AiryOperatorSet& ops, cd u, cd v) {
    const int m = (int)ops.x.size();
    Vector eu(m), emv(m);
    for (int i = 0; i < m; ++i) {
        double sw = std::sqrt(ops.w[i]);
        eu(i) = std::exp(u * (ops.x[i] + ops.p.sigma)) * sw;
        emv(i) = std::exp(-v * (ops.x[i] + ops.p.sigma)) * sw;
    }
    return eu.cwiseProduct(ops.a_lu.solve(emv)).sum();
}

Vector m_limit_col(const AiryOperatorSet& ops, cd v) {
    Vector top = h_grid(ops, v);
    Vector hc = h_cluster(ops, v);
    const int a = ops.p.alpha;
    Vector bot(a);
    for (int k = 0; k < a; ++k) {
        cd s = 0.0;
        for (int c = 0; c < hc.size(); ++c) s += ops.fd(k, c) * hc(c);
        bot(k) = s;
    }
    return ops.inv.apply(top, bot);
}

Vector m_limit_row(const AiryOperatorSet& ops, cd u) {
    Vector top = h_grid(ops, -u);
    const int a = ops.p.alpha;
    cd es = std::exp(ops.p.sigma * u);
    Vector row(top.size() + a);
    row.head(top.size()) = top;
    cd up = 1.0;
    for (int l = 0; l < a; ++l) {
        row(top.size() + l) = -up * es;
        up *= u;
    }
    return row;
}

cd m_limit(const AiryOperatorSet& ops, cd u, cd v) {
    if (u == v) throw std::invalid_argument("m_limit: u and v must differ");
    cd pole = std::exp(ops.p.sigma * (u - v)) / (v - u);
    Vector row = m_limit_row(ops, u);
    Vector col = m_limit_col(ops, v);
    return pole + row.cwiseProduct(col).sum();
}

cd m_limit_schur(const AiryOperatorSet& ops, cd u, cd v) {
    if (!(u.real() < v.real()))
        throw std::invalid_argument("m_limit_schur: requires Re u < Re v");
    const int m = (int)ops.x.size();
    const int a = ops.p.alpha;
    const int nc = (int)ops.xc.size();
    Vector eu(m), emv(m);
    for (int i = 0; i < m; ++i) {
        double sw = std::sqrt(ops.w[i]);
        eu(i) = std::exp(u * (ops.x[i] + ops.p.sigma)) * sw;
        emv(i) = std::exp(-v * (ops.x[i] + ops.p.sigma)) * sw;
    }
    Vector gu = ops.a_lu.solve(eu);
    Vector hv = ops.a_lu.solve(emv);
    cd term1 = eu.cwiseProduct(hv).sum();
    if (a == 0) return term1;
    // Nystrom extension of (id - K)^{-1} e_u to the cluster, then derivatives.
    Vector guc(nc), ahvc(nc);
    for (int c = 0; c < nc; ++c) {
        cd s = std::exp(u * (ops.xc[c] + ops.p.sigma));
        cd t = 0.0;
        for (int j = 0; j < m; ++j) {
            double sw = std::sqrt(ops.w[j]);
            s += ops.kai_c(c, j) * sw * gu(j);
            t += ops.ac_kernel(c, j) * sw * hv(j);
        }
        guc(c) = s;
        ahvc(c) = t;
    }
    Vector r(a), cvec(a);
    for (int k = 0; k < a; ++k) {
        cd sr = 0.0, sc = 0.0;
        for (int c = 0; c < nc; ++c) {
            sr += ops.fd(k, c) * guc(c);
            sc += ops.fd(k, c) * ahvc(c);
        }
        r(k) = sr;
        cvec(k) = sc;
    }
    return term1 - r.cwiseProduct(ops.inv.schur.partialPivLu().solve(cvec)).sum();
}

cd k_tacnode_uv(const AiryOperatorSet& ops, double s, double x, double t, double y,
                const UvContours& uv) {
    if (x <= 0.0 || y <= 0.0)
        throw std::invalid_argument("k_tacnode: x and y must be positive");
    const int a = ops.p.alpha;
    const double sg = ops.p.sigma;
    ContourNodes un = discretize(uv.u, 12, 16);
    Contour v_all = uv.v_arc;
    for (const Piece& pc : uv.v_loop.pieces) v_all.pieces.push_back(pc);
    ContourNodes vn = discretize(v_all, 8, 16);

    const int nu = (int)un.z.size(), nv = (int)vn.z.size();
    std::vector<cd> fu(nu), fv(nv);
    for (int i = 0; i < nu; ++i) {
        cd u = un.z[i];
        fu[i] = un.w[i] * std::exp(-u * u * u / 3.0 - y / (u + t)) *
                std::pow(u + t, a - 1);
    }
    for (int j = 0; j < nv; ++j) {
        cd v = vn.z[j];
        fv[j] = vn.w[j] * std::exp(v * v * v / 3.0 + x / (v + s)) /
                std::pow(v + s, a + 1);
    }

    // Bilinear part separates into a single (row sum) . (column sum).
    Vector rsum = Vector::Zero((int)ops.x.size() + a);
    for (int i = 0; i < nu; ++i) rsum += fu[i] * m_limit_row(ops, un.z[i]);
    Vector csum = Vector::Zero((int)ops.x.size() + a);
    for (int j = 0; j < nv; ++j) csum += fv[j] * m_limit_col(ops, vn.z[j]);
    cd total = rsum.cwiseProduct(csum).sum();

    for (int i = 0; i < nu; ++i) {
        cd u = un.z[i];
        cd acc = 0.0;
        for (int j = 0; j < nv; ++j) {
            cd v = vn.z[j];
            acc += fv[j] * std::exp(sg * (u - v)) / (v - u);
        }
        total += fu[i] * acc;
    }
    cd val = -total / (4.0 * M_PI * M_PI);
    if (t > s) val -= transition_density(a, (t - s) / 2.0, x, y);
    return val;
}

cd k_tacnode(const TacnodeParams& p, double s, double x, double t, double y) {
    AiryOperatorSet ops = build_airy_ops(p);
    return k_tacnode_uv(ops, s, x, t, y, build_gamma_uv(s, t));
}

cd temp_factor_g(const AiryOperatorSet& ops, double s, double x) {
    const int a = ops.p.alpha;
    const double sg = ops.p.sigma;
    UvContours uv = build_gamma_uv(s, s);
    Contour v_all = uv.v_arc;
    for (const Piece& pc : uv.v_loop.pieces) v_all.pieces.push_back(pc);
    ContourNodes vn = discretize(v_all, 8, 16);
    const int m = (int)ops.x.size();
    Vector ai0(m);
    for (int i = 0; i < m; ++i) ai0(i) = airy(0, ops.x[i] + sg) * std::sqrt(ops.w[i]);
    cd total = 0.0;
    for (int j = 0; j < (int)vn.z.size(); ++j) {
        cd v = vn.z[j];
        cd pre = vn.w[j] * std::exp(v * v * v / 3.0 + x / (v + s)) /
                 std::pow(v + s, a + 1);
        cd inner;
        if (a == 0) {
            Vector hv = h_grid(ops, v);
            inner = std::exp(-v * sg) + ai0.cwiseProduct(ops.a_lu.solve(hv)).sum();
        } else {
            inner = m_limit_col(ops, v)(m + a - 1);
        }
        total += pre * inner;
    }
    return total / cd(0.0, 2.0 * M_PI);
}

cd temp_factor_h(const AiryOperatorSet& ops, double s, double x) {
    const int a = ops.p.alpha;
    const double sg = ops.p.sigma;
    if (a == 0) return temp_factor_g(ops, s, x);
    // u-contour crossing the real axis to the right of s.
    UvContours uv = build_gamma_uv(-s, -s);
    ContourNodes un = discretize(uv.u, 12, 16);
    const int m = (int)ops.x.size();
    const int nc = (int)ops.xc.size();
    Vector top(m);
    for (int i = 0; i < m; ++i) top(i) = airy(a, ops.x[i] + sg) * std::sqrt(ops.w[i]);
    Vector bot(a);
    for (int k = 0; k < a; ++k) {
        cd sum = 0.0;
        for (int c = 0; c < nc; ++c) sum += ops.fd(k, c) * airy(a, ops.xc[c] + sg);
        bot(k) = sum;
    }
    Vector col = ops.inv.apply(top, bot);
    cd total = 0.0;
    for (int i = 0; i < (int)un.z.size(); ++i) {
        cd u = un.z[i];
        cd pre = un.w[i] * std::pow(u - s, a - 1) *
                 std::exp(-u * u * u / 3.0 - x / (u - s));
        cd bracket = std::pow(u, a) * std::exp(sg * u) +
                     m_limit_row(ops, u).cwiseProduct(col).sum();
        total += pre * bracket;
    }
    return -std::pow(x, -a) * total / cd(0.0, 2.0 * M_PI);
}

TempDerivReport temp_derivative_check(const TacnodeParams& p,
                                      const std::vector<std::array<double, 4>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("temp_derivative_check: need at least 3 points");
    const int np = (int)points.size();
    const double step = 1e-3;
    auto kmat = [&](double sigma) {
        TacnodeParams q = p;
        q.sigma = sigma;
        AiryOperatorSet ops = build_airy_ops(q);
        Matrix k(np, np);
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j) {
                double s = points[i][0], x = points[i][1];
                double t = points[j][2], y = points[j][3];
                k(i, j) = k_tacnode_uv(ops, s, x, t, y, build_gamma_uv(s, t));
            }
        return k;
    };
    Matrix d1 = (kmat(p.sigma + step) - kmat(p.sigma - step)) / (2.0 * step);
    Matrix d2 = (kmat(p.sigma + step / 2.0) - kmat(p.sigma - step / 2.0)) / step;
    Matrix deriv = (4.0 * d2 - d1) / 3.0;

    TempDerivReport rep;
    Eigen::JacobiSVD<Matrix> svd(deriv);
    rep.rank_ratio = svd.singularValues()(1) / svd.singularValues()(0);

    AiryOperatorSet ops = build_airy_ops(p);
    std::vector<cd> g(np), h(np), gback(np);
    for (int i = 0; i < np; ++i) {
        g[i] = temp_factor_g(ops, points[i][0], points[i][1]);
        h[i] = temp_factor_h(ops, -points[i][2], points[i][3]);
        gback[i] = temp_factor_g(ops, -points[i][2], points[i][3]);
    }
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            double y = points[j][3];
            cd model = std::pow(y, p.alpha) * g[i] * h[j];
            rep.max_factor_gap = std::max(rep.max_factor_gap, std::abs(deriv(i, j) - model));
        }
    for (int j = 0; j < np; ++j)
        rep.max_gh_gap = std::max(rep.max_gh_gap, std::abs(gback[j] - h[j]));
    return rep;
}

boost::multiprecision::cpp_int detan_exact(int n) {
    using boost::multiprecision::cpp_int;
    if (n < 1 || n > 20) throw std::invalid_argument("detan_exact: need 1 <= n <= 20");
    std::vector<std::vector<cpp_int>> a(n, std::vector<cpp_int>(n));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            cpp_int prod = 1;
            for (int i = 0; i < l; ++i) prod *= 2 * k - 1 - 4 * i;
            a[k][l] = prod;
        }
    // Bareiss fraction-free elimination.
    cpp_int prev = 1;
    int sign = 1;
    for (int c = 0; c < n - 1; ++c) {
        if (a[c][c] == 0) {
            int r = c + 1;
            while (r < n && a[r][c] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[c], a[r]);
            sign = -sign;
        }
        for (int i = c + 1; i < n; ++i)
            for (int j = c + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[c][c] - a[i][c] * a[c][j]) / prev;
        prev = a[c][c];
    }
    return sign * a[n - 1][n - 1];
}

namespace {

// Polynomials in x^{1/2} (exponent stored in half units) representing the
// m-th derivative of exp(2/3 x^{3/2}) divided by exp(2/3 x^{3/2}):
// q_0 = 1, q_{m+1} = q_m' + x^{1/2} q_m.
using HalfPoly = std::map<int, double>;

HalfPoly half_poly_step(const HalfPoly& q) {
    HalfPoly r;
    for (auto& [j, c] : q) {
        if (j != 0) r[j - 2] += c * j / 2.0;  // d/dx of x^{j/2}
        r[j + 1] += c;                        // x^{1/2} * term
    }
    return r;
}

double half_poly_eval(const HalfPoly& q, double x) {
    double s = 0.0;
    for (auto& [j, c] : q) s += c * std::pow(x, j / 2.0);
    return s;
}

// f_j(x) = 2 sqrt(pi) exp(2/3 x^{3/2}) Ai^{(j)}(x), evaluated stably.
double f_scaled(int j, double x) {
    ScaledValue a = airy_scaled(j, x);
    double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
    ScaledValue v(a.mantissa * 2.0 * std::sqrt(M_PI), a.log_scale + zeta);
    return v.value().real();
}

// f_k^{(l)}(x) by the Leibniz rule on the two factors of f_k.
double f_deriv(int k, int l, double x) {
    HalfPoly q;
    q[0] = 1.0;
    double sum = 0.0;
    double binom = 1.0;
    for (int mm = 0; mm <= l; ++mm) {
        if (mm > 0) {
            binom = binom * (l - mm + 1) / mm;
            q = half_poly_step(q);
        }
        sum += binom * half_poly_eval(q, x) * f_scaled(k + l - mm, x);
    }
    return sum;
}

double log_factorial(int n) {
    double s = 0.0;
    for (int j = 2; j <= n; ++j) s += std::log((double)j);
    return s;
}

}  // namespace

std::pair<double, double> airy_det_rewrite(int n, double x) {
    if (n < 1) throw std::invalid_argument("airy_det_rewrite: n must be positive");
    Eigen::MatrixXd direct(n, n), scaled(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            direct(k, l) = airy(k + l, x);
            scaled(k, l) = f_deriv(k, l, x);
        }
    double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
    double logpre = -n * zeta - n * std::log(2.0) - 0.5 * n * std::log(M_PI);
    if (logpre < -700.0)
        throw std::runtime_error("airy_det_rewrite: underflow despite scaling");
    return {direct.determinant(), std::exp(logpre) * scaled.determinant()};
}

AiryDetAsympt airy_det_asympt(int n, double x) {
    if (n < 1 || x <= 0.0) throw std::invalid_argument("airy_det_asympt: bad arguments");
    Eigen::MatrixXd fm(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) fm(k, l) = f_scaled(k + l, x);
    double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
    double logpre = -n * zeta - n * std::log(2.0) - 0.5 * n * std::log(M_PI);
    if (logpre < -700.0)
        throw std::runtime_error("airy_det_asympt: underflow despite scaling");
    AiryDetAsympt r;
    r.lhs = std::exp(logpre) * fm.determinant();
    double logfac = 0.0;
    for (int j = 0; j < n; ++j) logfac += log_factorial(j);
    double logmag = logfac - (n * (n + 1) / 2) * std::log(2.0) - 0.5 * n * std::log(M_PI) -
                    0.25 * n * n * std::log(x) - 2.0 / 3.0 * n * std::pow(x, 1.5);
    double sgn = (n / 2) % 2 == 0 ? 1.0 : -1.0;  // (-1)^{n(n-1)/2}
    r.rhs = sgn * std::exp(logmag);
    r.ratio = r.lhs / r.rhs;
    return r;
}

}  // namespace hep
