#include "hep/pearcey.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hep/gl.hpp"
#include "hep/specfun.hpp"

namespace hep {

namespace {

// integer power for complex base (avoids std::pow branch handling)
cd ipow(cd z, int k) {
    if (k < 0) return 1.0 / ipow(z, -k);
    cd r(1.0, 0.0);
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

bool is_nonneg_int(double a) { return a >= 0.0 && a == std::floor(a); }

// Clockwise loop around -s touching -s itself: two straight legs leaving at
// angles +-phi (phi < pi keeps the principal branch cut along the negative
// half-line untouched) truncated where exp(x cos(phi)/rho) is negligible,
// closed by the clockwise arc of radius R through the real axis.
Contour cusped_loop(double s, double x, double R) {
    const double phi = 3.0 * M_PI / 4.0;
    double rho0 = std::min(0.5 * R, x * (-std::cos(phi)) / 45.0);
    cd c(-s, 0.0);
    Contour g;
    // geometric leg pieces so the boundary layer near the cusp is resolved
    std::vector<double> radii;
    for (double r = rho0; r < R; r = std::min(2.0 * r, R)) radii.push_back(r);
    radii.push_back(R);
    for (size_t i = 0; i + 1 < radii.size(); ++i)
        g.pieces.push_back(Contour::line(c + std::polar(radii[i], phi),
                                         c + std::polar(radii[i + 1], phi)));
    g.pieces.push_back(Contour::arc(c, R, phi, -phi));
    for (size_t i = radii.size() - 1; i > 0; --i)
        g.pieces.push_back(Contour::line(c + std::polar(radii[i], -phi),
                                         c + std::polar(radii[i - 1], -phi)));
    return g;
}

ContourNodes loop_nodes(const Contour& g) {
    ContourNodes n;
    for (const Piece& p : g.pieces) {
        Contour single;
        single.pieces.push_back(p);
        int panels = p.kind == Piece::Arc ? 24 : 6;
        ContourNodes nn = discretize(single, panels, 12);
        n.z.insert(n.z.end(), nn.z.begin(), nn.z.end());
        n.w.insert(n.w.end(), nn.w.begin(), nn.w.end());
    }
    return n;
}

// Vertical line delta + i[-T, T] with Gaussian truncation.
ContourNodes line_nodes(double delta, double sigma) {
    double T = std::sqrt(90.0 + delta * delta + 2.0 * std::fabs(sigma) * delta) + 1.0;
    Contour g;
    g.pieces.push_back(Contour::line(cd(delta, -T), cd(delta, T)));
    return discretize(g, 40, 12);
}

// Composite rule on [0, hi] with panels refined geometrically toward 0: the
// u ~ v ~ 0 corner of the double integral is integrable but not smooth, and
// uniform panels only converge at first order there.
void graded_half_line(double hi, std::vector<double>& xs, std::vector<double>& ws) {
    xs.clear();
    ws.clear();
    std::vector<double> x1, w1;
    double mid = std::min(0.4, 0.3 * hi);
    std::vector<double> edges;
    for (double e = mid; e > 1e-6; e *= 0.5) edges.push_back(e);
    edges.push_back(0.0);
    for (size_t k = 0; k + 1 < edges.size(); ++k) {
        gl_panels(edges[k + 1], edges[k], 2, 12, x1, w1);
        xs.insert(xs.end(), x1.begin(), x1.end());
        ws.insert(ws.end(), w1.begin(), w1.end());
    }
    gl_panels(mid, hi, 24, 12, x1, w1);
    xs.insert(xs.end(), x1.begin(), x1.end());
    ws.insert(ws.end(), w1.begin(), w1.end());
}

struct ContourSetup {
    double delta = 0.0, R = 0.0;
};
ContourSetup pick_contours(double s, double t) {
    ContourSetup c;
    c.delta = std::max({0.0, -t, -s}) + 1.0;
    c.R = std::min(1.2, 0.5 * (c.delta + s));
    if (c.R <= 0.0) throw std::runtime_error("pearcey: contour ordering failed");
    return c;
}

}  // namespace

HermiteBlock hermite_block(int alpha, double sigma) {
    if (alpha < 0) throw std::invalid_argument("hermite_block: alpha >= 0");
    HermiteBlock b;
    b.alpha = alpha;
    b.sigma = sigma;
    b.DD.resize(alpha, alpha);
    for (int k = 0; k < alpha; ++k)
        for (int l = 0; l < alpha; ++l) b.DD(k, l) = gauss_b(k + l, -sigma);
    if (alpha > 0) b.lu.compute(b.DD);
    b.bcol.resize(alpha);
    for (int k = 0; k < alpha; ++k) b.bcol(k) = gauss_b(k + alpha, -sigma);
    return b;
}

double hermite_block_det_closed(int alpha, double sigma) {
    double d = 1.0;
    for (int j = 0; j < alpha; ++j) {
        double f = 1.0;
        for (int i = 2; i <= j; ++i) f *= i;
        d *= (j % 2 ? -1.0 : 1.0) * f;
    }
    return d * std::exp(-alpha * sigma * sigma / 2.0);
}

Vector hermite_h(const HermiteBlock& blk, cd v) {
    const int a = blk.alpha;
    Vector h = Vector::Zero(a);
    if (a == 0) return h;
    double adec = std::max(0.0, -v.real());
    double lmax = std::max(0.0, blk.sigma) + adec +
                  std::sqrt(adec * adec + 2.0 * adec * std::fabs(blk.sigma) + 90.0) + 2.0;
    std::vector<double> xs, ws;
    gl_panels(0.0, lmax, 20, 12, xs, ws);
    for (size_t i = 0; i < xs.size(); ++i) {
        cd e = std::exp(-v * xs[i]);
        for (int k = 0; k < a; ++k) h(k) += ws[i] * e * gauss_b(k, xs[i] - blk.sigma);
    }
    return h;
}

cd m_pearcey(const HermiteBlock& blk, cd u, cd v) {
    cd val = 1.0 / (v - u);
    if (blk.alpha == 0) return val;
    Vector sol = blk.lu.solve(hermite_h(blk, v));
    cd up(1.0, 0.0);
    for (int k = 0; k < blk.alpha; ++k) {
        val -= up * sol(k);
        up *= u;
    }
    return val;
}

cd hermite_h_schur(int alpha, double sigma, cd u) {
    if (alpha == 0) return cd(1.0, 0.0);
    HermiteBlock b = hermite_block(alpha, sigma);
    Vector sol = b.lu.solve(b.bcol);
    cd val = ipow(u, alpha);
    cd up(1.0, 0.0);
    for (int k = 0; k < alpha; ++k) {
        val -= up * sol(k);
        up *= u;
    }
    return val;
}

cd l_bessel_form(const PearceyParams& p, double s, double x, double t, double y) {
    if (x <= 0.0 || y <= 0.0)
        throw std::invalid_argument("l_bessel_form: x and y must be positive");
    if (p.alpha <= -1.0) throw std::invalid_argument("l_bessel_form: alpha > -1");
    const double a = p.alpha;
    const double ss = s + p.sigma, tt = t + p.sigma;

    // truncation radii from the quartic decay
    auto rmax = [](double c) {
        double r2 = -c + std::sqrt(c * c + 90.0);
        return std::sqrt(r2) + 0.3;
    };
    double umax = rmax(tt), vmax = rmax(ss);

    std::vector<double> ux, uw, vx, vw;
    graded_half_line(umax, ux, uw);
    graded_half_line(vmax, vx, vw);

    // (u/v)^a J_a(2 sqrt(y) u) J_a(2 sqrt(x) v) = u^{2a} y^{a/2} x^{a/2}
    //   G_a(-y u^2) G_a(-x v^2) with the entire series G_a; combined with the
    // (y/x)^{a/2} prefactor this leaves y^a u^{2a}, free of branch choices.
    const cd eup = std::polar(1.0, M_PI / 4.0);
    std::vector<cd> fu(ux.size());
    for (size_t i = 0; i < ux.size(); ++i) {
        double u = ux[i];
        fu[i] = uw[i] * std::pow(u, 2.0 * a + 1.0) *
                std::exp(-u * u * u * u / 2.0 - tt * u * u) *
                g_entire(a, cd(-y * u * u, 0.0)).value();
    }
    // v rays: from e^{i pi/4} inf to 0, then 0 to e^{-i pi/4} inf
    cd acc(0.0, 0.0);
    for (int ray = 0; ray < 2; ++ray) {
        cd dir = ray == 0 ? eup : std::conj(eup);
        double orient = ray == 0 ? -1.0 : 1.0;  // first ray runs toward 0
        for (size_t j = 0; j < vx.size(); ++j) {
            cd v = vx[j] * dir;
            cd v2 = v * v;
            cd gv = vw[j] * dir * orient * v *
                    std::exp(v2 * v2 / 2.0 + ss * v2) * g_entire(a, -x * v2).value();
            cd inner(0.0, 0.0);
            for (size_t i = 0; i < ux.size(); ++i)
                inner += fu[i] / (v2 - ux[i] * ux[i]);
            acc += gv * inner;
        }
    }
    cd val = std::pow(y, a) * 2.0 / (cd(0.0, 1.0) * M_PI) * acc;
    if (t > s) val -= transition_density(a, (t - s) / 2.0, x, y);
    return val;
}

cd l_contour_form(const PearceyParams& p, double s, double x, double t, double y) {
    if (x <= 0.0 || y <= 0.0)
        throw std::invalid_argument("l_contour_form: x and y must be positive");
    const double a = p.alpha;
    ContourSetup cs = pick_contours(s, t);
    ContourNodes wn = loop_nodes(cusped_loop(s, x, cs.R));
    ContourNodes zn = line_nodes(cs.delta, p.sigma);

    std::vector<cd> fw(wn.z.size()), gz(zn.z.size());
    for (size_t i = 0; i < wn.z.size(); ++i) {
        cd w = wn.z[i];
        fw[i] = wn.w[i] * std::exp(-w * w / 2.0 + p.sigma * w + x / (w + s)) *
                std::pow(w + s, a - 1.0);
    }
    for (size_t j = 0; j < zn.z.size(); ++j) {
        cd z = zn.z[j];
        gz[j] = zn.w[j] * std::exp(z * z / 2.0 - p.sigma * z - y / (z + t)) /
                std::pow(z + t, a + 1.0);
    }
    cd acc(0.0, 0.0);
    for (size_t i = 0; i < fw.size(); ++i) {
        cd inner(0.0, 0.0);
        for (size_t j = 0; j < gz.size(); ++j) inner += gz[j] / (wn.z[i] - zn.z[j]);
        acc += fw[i] * inner;
    }
    cd val = std::pow(y / x, a) * acc / (-4.0 * M_PI * M_PI);
    if (t > s) val -= transition_density(a, (t - s) / 2.0, x, y);
    return val;
}

cd l_operator_form(const PearceyParams& p, double s, double x, double t, double y) {
    if (x <= 0.0 || y <= 0.0)
        throw std::invalid_argument("l_operator_form: x and y must be positive");
    if (!is_nonneg_int(p.alpha))
        throw std::invalid_argument("l_operator_form: alpha must be a non-negative integer");
    const int a = static_cast<int>(p.alpha);
    ContourSetup cs = pick_contours(s, t);
    ContourNodes vn = loop_nodes(cusped_loop(s, x, cs.R));
    ContourNodes un = line_nodes(cs.delta, p.sigma);
    HermiteBlock blk = hermite_block(a, p.sigma);

    std::vector<cd> fv(vn.z.size()), gu(un.z.size());
    for (size_t j = 0; j < vn.z.size(); ++j) {
        cd v = vn.z[j];
        fv[j] = vn.w[j] * std::exp(-v * v / 2.0 + p.sigma * v + x / (v + s)) /
                ipow(v + s, a + 1);
    }
    for (size_t i = 0; i < un.z.size(); ++i) {
        cd u = un.z[i];
        gu[i] = un.w[i] * std::exp(u * u / 2.0 - p.sigma * u - y / (u + t)) *
                ipow(u + t, a - 1);
    }
    // pole part of M needs the genuine double sum; the finite-block part
    // separates into (row integral) DD^{-1} (column integral)
    cd acc(0.0, 0.0);
    for (size_t j = 0; j < vn.z.size(); ++j) {
        cd inner(0.0, 0.0);
        for (size_t i = 0; i < un.z.size(); ++i) inner += gu[i] / (vn.z[j] - un.z[i]);
        acc += fv[j] * inner;
    }
    if (a > 0) {
        Vector row = Vector::Zero(a), col = Vector::Zero(a);
        for (size_t i = 0; i < un.z.size(); ++i) {
            cd up(1.0, 0.0);
            for (int k = 0; k < a; ++k) {
                row(k) += gu[i] * up;
                up *= un.z[i];
            }
        }
        for (size_t j = 0; j < vn.z.size(); ++j) col += fv[j] * hermite_h(blk, vn.z[j]);
        acc -= row.cwiseProduct(blk.lu.solve(col)).sum();
    }
    cd val = acc / (-4.0 * M_PI * M_PI);
    if (t > s) val -= transition_density(p.alpha, (t - s) / 2.0, x, y);
    return val;
}

cd l_alt(const PearceyParams& p, double s, double x, double t, double y) {
    return std::pow(y / x, p.alpha) * l_contour_form(p, t, y, s, x);
}

cd kmw_kernel(int alpha, double x, double y, double t) {
    const double rho = 0.6;
    // G_v: clockwise circle centered -rho of radius rho touching 0; the
    // essential singularity exp(1/(2 v^2)) suppresses the neighbourhood of
    // the touching point, so the arc is truncated there
    double eps = 1.0 / (rho * std::sqrt(90.0));
    Contour gv;
    gv.pieces.push_back(Contour::arc(cd(-rho, 0.0), rho, 2.0 * M_PI - eps, eps));
    ContourNodes vn = discretize(gv, 110, 12);
    // G_u: counterclockwise circle surrounding G_v (and the origin)
    Contour gu = Contour::circle(cd(-rho, 0.0), 2.5 * rho, true);
    ContourNodes un = discretize(gu, 40, 12);

    std::vector<cd> fv(vn.z.size()), fu(un.z.size());
    for (size_t j = 0; j < vn.z.size(); ++j) {
        cd v = vn.z[j];
        fv[j] = vn.w[j] * std::exp(t / v + 1.0 / (2.0 * v * v) + x * v) * ipow(v, alpha);
    }
    for (size_t i = 0; i < un.z.size(); ++i) {
        cd u = un.z[i];
        fu[i] = un.w[i] * std::exp(-t / u - 1.0 / (2.0 * u * u) - y * u) / ipow(u, alpha);
    }
    cd acc(0.0, 0.0);
    for (size_t i = 0; i < un.z.size(); ++i) {
        cd inner(0.0, 0.0);
        for (size_t j = 0; j < vn.z.size(); ++j) inner += fv[j] / (un.z[i] - vn.z[j]);
        acc += fu[i] * inner;
    }
    return acc / (-4.0 * M_PI * M_PI);
}

cd bk_kernel(double s1, double e1, double s2, double e2) {
    auto rmax = [](double c) {
        double r2 = (-c + std::sqrt(c * c + 4.0 * 90.0)) / 2.0;
        return std::sqrt(r2) + 0.3;
    };
    double umax = rmax(e1), vmax = rmax(e2);
    std::vector<double> ux, uw, vx, vw;
    graded_half_line(umax, ux, uw);
    graded_half_line(vmax, vx, vw);

    std::vector<cd> fu(ux.size());
    for (size_t i = 0; i < ux.size(); ++i) {
        double u = ux[i];
        fu[i] = uw[i] * std::exp(-u * u * u * u - e1 * u * u) * std::cos(s1 * u);
    }
    const cd eup = std::polar(1.0, M_PI / 4.0);
    cd acc(0.0, 0.0);
    for (int ray = 0; ray < 2; ++ray) {
        cd dir = ray == 0 ? eup : std::conj(eup);
        double orient = ray == 0 ? -1.0 : 1.0;
        for (size_t j = 0; j < vx.size(); ++j) {
            cd v = vx[j] * dir;
            cd v2 = v * v;
            cd gv = vw[j] * dir * orient * v * std::exp(v2 * v2 + e2 * v2) *
                    std::cos(s2 * v);
            cd inner(0.0, 0.0);
            for (size_t i = 0; i < ux.size(); ++i) inner += fu[i] / (v2 - ux[i] * ux[i]);
            acc += gv * inner;
        }
    }
    cd val = 2.0 / (cd(0.0, 1.0) * M_PI * M_PI) * acc;
    if (e1 > e2) {
        double d = e2 - e1;
        val -= 1.0 / (2.0 * std::sqrt(M_PI * (e1 - e2))) *
               (std::exp((s1 + s2) * (s1 + s2) / (4.0 * d)) +
                std::exp((s1 - s2) * (s1 - s2) / (4.0 * d)));
    }
    return val;
}

cd pearcey_g1(const PearceyParams& p, double s, double x, bool schur) {
    if (x <= 0.0) throw std::invalid_argument("pearcey_g1: x > 0");
    ContourSetup cs = pick_contours(s, s);
    ContourNodes vn = loop_nodes(cusped_loop(s, x, cs.R));
    cd acc(0.0, 0.0);
    if (schur) {
        if (!is_nonneg_int(p.alpha))
            throw std::invalid_argument("pearcey_g1: Schur form needs integer alpha");
        const int a = static_cast<int>(p.alpha);
        HermiteBlock blk = hermite_block(a, p.sigma);
        for (size_t j = 0; j < vn.z.size(); ++j) {
            cd v = vn.z[j];
            cd scal(1.0, 0.0);
            if (a > 0) scal = blk.lu.solve(hermite_h(blk, v))(a - 1);
            acc += vn.w[j] * std::exp(-v * v / 2.0 + p.sigma * v + x / (v + s)) /
                   ipow(v + s, a + 1) * scal;
        }
        // for alpha = 0 the bracket is understood to be 1
        if (a == 0)
            ;  // scal already 1
    } else {
        for (size_t j = 0; j < vn.z.size(); ++j) {
            cd v = vn.z[j];
            acc += vn.w[j] * std::exp(-v * v / 2.0 + p.sigma * v + x / (v + s)) *
                   std::pow(v + s, p.alpha - 1.0);
        }
        acc *= cpow_above(-x, -p.alpha);
    }
    return acc / cd(0.0, 2.0 * M_PI);
}

cd pearcey_g2(const PearceyParams& p, double t, double y, bool schur) {
    if (y <= 0.0) throw std::invalid_argument("pearcey_g2: y > 0");
    ContourSetup cs = pick_contours(t, t);
    ContourNodes un = line_nodes(cs.delta, p.sigma);
    cd acc(0.0, 0.0);
    if (schur) {
        if (!is_nonneg_int(p.alpha))
            throw std::invalid_argument("pearcey_g2: Schur form needs integer alpha");
        const int a = static_cast<int>(p.alpha);
        for (size_t i = 0; i < un.z.size(); ++i) {
            cd u = un.z[i];
            acc += un.w[i] * std::exp(u * u / 2.0 - p.sigma * u - y / (u + t)) *
                   ipow(u + t, a - 1) * hermite_h_schur(a, p.sigma, u);
        }
    } else {
        for (size_t i = 0; i < un.z.size(); ++i) {
            cd u = un.z[i];
            acc += un.w[i] * std::exp(u * u / 2.0 - p.sigma * u - y / (u + t)) /
                   std::pow(u + t, p.alpha + 1.0);
        }
        acc *= cpow_above(-y, p.alpha);
    }
    return acc / cd(0.0, 2.0 * M_PI);
}

std::pair<cd, cd> int_parts_sides(int alpha, double s, double x, double sigma) {
    ContourSetup cs = pick_contours(s, s);
    ContourNodes vn = loop_nodes(cusped_loop(s, x, cs.R));
    // f(v) = exp(-v^2/2 + sigma v); derivatives stay elementary
    auto fder = [&](cd v, int k) {
        cd f = std::exp(-v * v / 2.0 + sigma * v);
        if (k == 0) return f;
        if (k == 1) return (sigma - v) * f;
        if (k == 2) return ((sigma - v) * (sigma - v) - 1.0) * f;
        cd d = sigma - v;
        return (d * d * d - 3.0 * d) * f;  // k == 3
    };
    cd lhs(0.0, 0.0), rhs(0.0, 0.0);
    for (size_t j = 0; j < vn.z.size(); ++j) {
        cd v = vn.z[j];
        cd e = std::exp(x / (v + s));
        lhs += vn.w[j] * e / ipow(v + s, alpha + 1) * fder(v, 0);
        rhs += vn.w[j] * e * ipow(v + s, alpha - 1) * fder(v, alpha);
    }
    rhs *= std::pow(x, -alpha);
    return {lhs, rhs};
}

PearceyRank1Report rank1_pearcey_check(const PearceyParams& p,
                                       const std::vector<std::array<double, 4>>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 3) throw std::invalid_argument("rank1_pearcey_check: need >= 3 points");
    Matrix dk(n, n), model(n, n);
    const double h = 0.05;
    auto kern = [&](double sg, double s, double x, double t, double y) {
        PearceyParams q = p;
        q.sigma = sg;
        return l_operator_form(q, s, x, t, y);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = points[i][0], x = points[i][1];
            double t = points[j][2], y = points[j][3];
            cd d1 = (kern(p.sigma + h, s, x, t, y) - kern(p.sigma - h, s, x, t, y)) /
                    (2.0 * h);
            cd d2 = (kern(p.sigma + h / 2.0, s, x, t, y) -
                     kern(p.sigma - h / 2.0, s, x, t, y)) /
                    h;
            dk(i, j) = (4.0 * d2 - d1) / 3.0;  // Richardson in h^2
        }
    std::vector<cd> g1v(n), g2v(n);
    bool schur_ok = is_nonneg_int(p.alpha);
    for (int i = 0; i < n; ++i) {
        g1v[i] = pearcey_g1(p, points[i][0], points[i][1], schur_ok);
        g2v[i] = pearcey_g2(p, points[i][2], points[i][3], schur_ok);
    }
    PearceyRank1Report rep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            model(i, j) = g1v[i] * g2v[j];
            rep.max_factor_gap =
                std::max(rep.max_factor_gap, std::abs(dk(i, j) - model(i, j)));
        }
    Eigen::JacobiSVD<Matrix> svd(dk);
    rep.rank_ratio = svd.singularValues()(1) / svd.singularValues()(0);
    if (schur_ok)
        for (int i = 0; i < n; ++i) {
            rep.max_form_gap = std::max(
                rep.max_form_gap,
                std::abs(g1v[i] - pearcey_g1(p, points[i][0], points[i][1], false)));
            rep.max_form_gap = std::max(
                rep.max_form_gap,
                std::abs(g2v[i] - pearcey_g2(p, points[i][2], points[i][3], false)));
        }
    return rep;
}

double ode_residual(const PearceyParams& p, char which, double s,
                    const std::vector<double>& x_grid, double h) {
    if (which != 'f' && which != 'g')
        throw std::invalid_argument("ode_residual: which must be 'f' or 'g'");
    auto factor = [&](double x) -> cd {
        if (which == 'f') return std::pow(x, p.alpha) * pearcey_g1(p, s, x, false);
        return std::pow(x, -p.alpha) * pearcey_g2(p, s, x, false);
    };
    double worst = 0.0;
    for (double x0 : x_grid) {
        cd f[7];
        for (int k = -3; k <= 3; ++k) f[k + 3] = factor(x0 + k * h);
        cd d1 = (-f[5] + 8.0 * f[4] - 8.0 * f[2] + f[1]) / (12.0 * h);
        cd d2 = (-f[5] + 16.0 * f[4] - 30.0 * f[3] + 16.0 * f[2] - f[1]) /
                (12.0 * h * h);
        cd d3 = (-f[6] + 8.0 * f[5] - 13.0 * f[4] + 13.0 * f[2] - 8.0 * f[1] + f[0]) /
                (8.0 * h * h * h);
        cd res;
        if (which == 'f')
            res = x0 * d3 + (2.0 - p.alpha) * d2 - (s + p.sigma) * d1 + f[3];
        else
            res = x0 * d3 + (2.0 + p.alpha) * d2 - (s + p.sigma) * d1 - f[3];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace hep
