#pragma once

#include <functional>
#include <vector>

#include "hep/scaled.hpp"

namespace hep {

// A contour is a chain of oriented pieces: straight segments and circular
// arcs. Rays are represented as segments truncated where the integrand has
// decayed below target accuracy (the builders pick the truncation).
struct Piece {
    enum Kind { Line, Arc } kind = Line;
    cd a{0.0, 0.0}, b{0.0, 0.0};  // Line: endpoints
    cd center{0.0, 0.0};          // Arc: center/radius/angles (th1<th0 = clockwise)
    double radius = 0.0, th0 = 0.0, th1 = 0.0;

    cd point(double t) const;     // position at parameter t in [0,1]
    cd velocity(double t) const;  // d(point)/dt
};

struct Contour {
    std::vector<Piece> pieces;

    static Piece line(cd a, cd b) {
        Piece p;
        p.kind = Piece::Line;
        p.a = a;
        p.b = b;
        return p;
    }
    static Piece arc(cd center, double radius, double th0, double th1) {
        Piece p;
        p.kind = Piece::Arc;
        p.center = center;
        p.radius = radius;
        p.th0 = th0;
        p.th1 = th1;
        return p;
    }
    static Contour circle(cd center, double radius, bool counterclockwise = true) {
        Contour c;
        c.pieces.push_back(counterclockwise ? arc(center, radius, -M_PI, M_PI)
                                            : arc(center, radius, M_PI, -M_PI));
        return c;
    }
};

struct QuadSpec {
    int order = 32;        // Gauss-Legendre order per panel
    int max_panels = 256;  // adaptivity cap per piece
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
};

// Adaptive contour integral of f along c.
cd integrate(const Contour& c, const std::function<cd(cd)>& f, const QuadSpec& spec = {});

// Fixed discretization (nodes z_i and complex weights w_i including dz) for
// tensor-product double contour integrals.
struct ContourNodes {
    std::vector<cd> z;
    std::vector<cd> w;
};
ContourNodes discretize(const Contour& c, int panels_per_piece, int order = 32);

// Winding number of c around p (numerically; exact integers are recovered).
int winding_number(const Contour& c, cd p);

// Contours of the finite-n kernel double integral at times 0 < s,t < 1:
// xi runs on a circle around 0 enclosing neither singular point
// -s/(1-s), -t/(1-t); eta on a smaller circle around 0 inside the xi circle
// plus a small counterclockwise loop around -s/(1-s).
struct XiEtaContours {
    Contour xi, eta_inner, eta_loop;
};
XiEtaContours build_gamma_xi_eta(double s, double t);

// Contours for the hard-edge tacnode kernel: Gamma_u from e^{-2i pi/3}inf to
// e^{2i pi/3}inf crossing the real axis right of -s and -t; Gamma_v from
// e^{-i pi/3}inf to e^{i pi/3}inf right of Gamma_u, plus a clockwise loop
// around -s. Rays are truncated at |u| = umax, |v| = vmax.
struct UvContours {
    Contour u, v_arc, v_loop;
    double u0 = 0.0, v0 = 0.0;  // real-axis crossings
};
UvContours build_gamma_uv(double s, double t, double umax = 6.0, double vmax = 6.0);

// Steep-descent contour Gamma_r: for r<1 legs from -1 in directions
// e^{+-i pi/3}, for r>1 in directions e^{+-2i pi/3}, closed by the arc of the
// circle of radius r through the positive axis; counterclockwise around 0.
Contour build_steep_descent(double r);

}  // namespace hep
