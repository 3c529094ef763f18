#include "hep/contour.hpp"

#include <cmath>
#include <stdexcept>

#include "hep/gl.hpp"

namespace hep {

cd Piece::point(double t) const {
    if (kind == Line) return a + t * (b - a);
    double th = th0 + t * (th1 - th0);
    return center + radius * cd(std::cos(th), std::sin(th));
}

cd Piece::velocity(double t) const {
    if (kind == Line) return b - a;
    double th = th0 + t * (th1 - th0);
    return radius * (th1 - th0) * cd(-std::sin(th), std::cos(th));
}

namespace {

cd gl_piece(const Piece& p, const std::function<cd(cd)>& f, double t0, double t1, int order,
            double* l1 = nullptr) {
    const GlRule& r = gl_rule(order);
    cd sum = 0.0;
    double h = 0.5 * (t1 - t0);
    double c = 0.5 * (t0 + t1);
    for (int i = 0; i < order; ++i) {
        double t = c + h * r.x[i];
        cd v = f(p.point(t)) * p.velocity(t);
        sum += h * r.w[i] * v;
        if (l1) *l1 += h * r.w[i] * std::abs(v);
    }
    return sum;
}

void adapt(const Piece& p, const std::function<cd(cd)>& f, double t0, double t1, int order,
           double tol_per_unit, int depth, int& panels, int max_panels, cd& acc) {
    cd hi = gl_piece(p, f, t0, t1, order);
    cd lo = gl_piece(p, f, t0, t1, order / 2);
    double err = std::abs(hi - lo);
    if (err <= tol_per_unit * (t1 - t0) || depth >= 30 || panels >= max_panels) {
        acc += hi;
        ++panels;
        return;
    }
    double tm = 0.5 * (t0 + t1);
    adapt(p, f, t0, tm, order, tol_per_unit, depth + 1, panels, max_panels, acc);
    adapt(p, f, tm, t1, order, tol_per_unit, depth + 1, panels, max_panels, acc);
}

}  // namespace

cd integrate(const Contour& c, const std::function<cd(cd)>& f, const QuadSpec& spec) {
    // coarse L1 pass to set the cancellation-aware scale
    double l1 = 0.0;
    for (const auto& p : c.pieces) (void)gl_piece(p, f, 0.0, 1.0, spec.order, &l1);
    double tol = std::max(spec.abs_tol, spec.rel_tol * std::max(l1, 1e-300));
    cd acc = 0.0;
    for (const auto& p : c.pieces) {
        int panels = 0;
        adapt(p, f, 0.0, 1.0, spec.order, tol, 0, panels, spec.max_panels, acc);
    }
    return acc;
}

ContourNodes discretize(const Contour& c, int panels_per_piece, int order) {
    const GlRule& r = gl_rule(order);
    ContourNodes out;
    for (const auto& p : c.pieces) {
        for (int pnl = 0; pnl < panels_per_piece; ++pnl) {
            double t0 = (double)pnl / panels_per_piece, t1 = (double)(pnl + 1) / panels_per_piece;
            double h = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
            for (int i = 0; i < order; ++i) {
                double t = mid + h * r.x[i];
                out.z.push_back(p.point(t));
                out.w.push_back(h * r.w[i] * p.velocity(t));
            }
        }
    }
    return out;
}

int winding_number(const Contour& c, cd p) {
    QuadSpec spec;
    spec.rel_tol = 1e-10;
    cd w = integrate(c, [&](cd z) { return 1.0 / (z - p); }, spec) / cd(0.0, 2.0 * M_PI);
    double re = w.real();
    int n = (int)std::lround(re);
    if (std::fabs(re - n) > 1e-6 || std::fabs(w.imag()) > 1e-6)
        throw std::runtime_error("winding_number: non-integer result (point on contour?)");
    return n;
}

XiEtaContours build_gamma_xi_eta(double s, double t) {
    if (s <= 0.0 || s >= 1.0 || t <= 0.0 || t >= 1.0)
        throw std::invalid_argument("build_gamma_xi_eta: need 0 < s,t < 1");
    double ps = s / (1.0 - s), pt = t / (1.0 - t);  // singular points are -ps, -pt
    double rmin = std::min(ps, pt);
    XiEtaContours g;
    double rxi = 0.6 * rmin;
    g.xi = Contour::circle({0.0, 0.0}, rxi);
    g.eta_inner = Contour::circle({0.0, 0.0}, 0.5 * rxi);
    // keep the loop clear of the xi circle and of -pt, but as large as
    // possible: the integrand has an essential singularity exp(c/(eta + ps))
    // at the center, and quadrature needs |c|/rloop moderate
    double rloop = 0.75 * (ps - rxi);
    if (std::fabs(pt - ps) > 1e-12) rloop = std::min(rloop, 0.45 * std::fabs(pt - ps));
    g.eta_loop = Contour::circle({-ps, 0.0}, rloop);
    return g;
}

UvContours build_gamma_uv(double s, double t, double umax, double vmax) {
    UvContours g;
    g.u0 = std::max({-s, -t, -1.0}) + 1.0;
    g.v0 = g.u0 + 1.0;
    cd e_up = std::polar(1.0, 2.0 * M_PI / 3.0);
    cd e_dn = std::conj(e_up);
    cd u0(g.u0, 0.0);
    g.u.pieces.push_back(Contour::line(u0 + umax * e_dn, u0));
    g.u.pieces.push_back(Contour::line(u0, u0 + umax * e_up));
    cd f_up = std::polar(1.0, M_PI / 3.0);
    cd f_dn = std::conj(f_up);
    cd v0(g.v0, 0.0);
    g.v_arc.pieces.push_back(Contour::line(v0 + vmax * f_dn, v0));
    g.v_arc.pieces.push_back(Contour::line(v0, v0 + vmax * f_up));
    // clockwise loop around -s, kept clear of both leg families
    double rloop = 0.35;
    g.v_loop = Contour::circle({-s, 0.0}, rloop, /*counterclockwise=*/false);
    return g;
}

Contour build_steep_descent(double r) {
    if (r <= std::sqrt(3.0) / 2.0 || r == 1.0)
        throw std::invalid_argument("build_steep_descent: need r in (sqrt(3)/2, 1) or r > 1");
    double disc = std::sqrt(4.0 * r * r - 3.0);
    double tstar = (r < 1.0) ? (1.0 - disc) / 2.0 : (disc - 1.0) / 2.0;
    double phi = (r < 1.0) ? M_PI / 3.0 : 2.0 * M_PI / 3.0;
    cd mOne(-1.0, 0.0);
    cd zp = mOne + tstar * std::polar(1.0, phi);
    cd zm = std::conj(zp);
    double thp = std::arg(zp);  // in (0, pi)
    Contour c;
    c.pieces.push_back(Contour::line(mOne, zm));
    c.pieces.push_back(Contour::arc({0.0, 0.0}, r, -thp, thp));
    c.pieces.push_back(Contour::line(zp, mOne));
    return c;
}

}  // namespace hep
