#pragma once

#include <array>
#include <utility>
#include <vector>

#include "hep/contour.hpp"
#include "hep/linalg.hpp"
#include "hep/scaled.hpp"

namespace hep {

// Parameters of the hard-edge Pearcey limit: index alpha > -1 (the operator
// form additionally needs a non-negative integer) and temperature sigma.
struct PearceyParams {
    double alpha = 0.0;
    double sigma = 0.0;
};

// Finite alpha x alpha block built from derivatives of B(x) = exp(-x^2/2):
// DD(k,l) = B^(k+l)(-sigma). Its determinant is prod_{j<alpha} (-1)^j j!
// times exp(-alpha sigma^2 / 2), so the block is always invertible.
struct HermiteBlock {
    int alpha = 0;
    double sigma = 0.0;
    Matrix DD;                           // B^(k+l)(-sigma)
    Eigen::PartialPivLU<Matrix> lu;      // factorization of DD
    Vector bcol;                         // (B^(k+alpha)(-sigma))_k
};
HermiteBlock hermite_block(int alpha, double sigma);
double hermite_block_det_closed(int alpha, double sigma);

// h_k(v) = int_0^inf exp(-v lambda) B^(k)(lambda - sigma) dlambda for
// k = 0..alpha-1 (converges for every complex v by the Gaussian decay).
Vector hermite_h(const HermiteBlock& blk, cd v);

// M(u, v) = 1/(v-u) - (1, u, ..., u^{alpha-1}) DD^{-1} h(v).
cd m_pearcey(const HermiteBlock& blk, cd u, cd v);

// H~_alpha(u) = u^alpha - (1, u, ..., u^{alpha-1}) DD^{-1} (B^(k+alpha)),
// the Schur-complement form of exp(-u^2/2 + sigma u) d^alpha/du^alpha
// exp(u^2/2 - sigma u); satisfies H_a = (u - sigma) H_{a-1} + H_{a-1}'.
cd hermite_h_schur(int alpha, double sigma, cd u);

// Hard edge Pearcey kernel, Bessel-function form (any real alpha > -1):
//   L(s,x;t,y) = -p_{(t-s)/2}(x,y) 1_{t>s}
//     + (y/x)^{alpha/2} (2/(pi i)) int_C dv int_0^inf du (u/v)^alpha
//       uv/(v^2-u^2) e^{v^4/2+s v^2}/e^{u^4/2+t u^2}
//       J_alpha(2 sqrt(y) u) J_alpha(2 sqrt(x) v)
// with C running from e^{i pi/4} inf to 0 to e^{-i pi/4} inf.
cd l_bessel_form(const PearceyParams& p, double s, double x, double t, double y);

// Contour form (any real alpha > -1):
//   L(s,x;t,y) = -p_{(t-s)/2}(x,y) 1_{t>s}
//     + (y/x)^alpha (1/(2 pi i)^2) int_{G_-s} dw int_{delta+iR} dz
//       1/(w-z) e^{-w^2/2+sigma w+x/(w+s)}/e^{-z^2/2+sigma z+y/(z+t)}
//       (w+s)^{alpha-1} / (z+t)^{alpha+1}
// where G_-s is a clockwise loop around -s (for non-integer alpha a cusped
// loop touching -s with legs of angle < pi, keeping the principal branch
// cut on the negative half-line untouched) and delta + iR passes right of
// -t and of the loop.
cd l_contour_form(const PearceyParams& p, double s, double x, double t, double y);

// Operator form (non-negative integer alpha):
//   L(s,x;t,y) = -p_{(t-s)/2}(x,y) 1_{t>s}
//     + (1/(2 pi i)^2) int_{G_-s} dv int_{delta+iR} du
//       e^{-v^2/2+sigma v+x/(v+s)}/e^{-u^2/2+sigma u+y/(u+t)}
//       (u+t)^{alpha-1} / (v+s)^{alpha+1}  M(u,v).
cd l_operator_form(const PearceyParams& p, double s, double x, double t, double y);

// Alternate process with start and end points exchanged; exposed as the
// derived conjugation (y/x)^alpha L(t,y;s,x) of the contour form.
cd l_alt(const PearceyParams& p, double s, double x, double t, double y);

// Single-time kernel of Kuijlaars, Martinez-Finkelshtein and Wielonsky
// (integer alpha), computed on its own contours:
//   K(x,y,t) = (1/(2 pi i)^2) int_{G_v} dv int_{G_u} du 1/(u-v)
//     e^{t/v + 1/(2v^2) + x v} / e^{t/u + 1/(2u^2) + y u}  (v/u)^alpha
// with G_v a clockwise circle in the left half plane touching 0 and G_u a
// counterclockwise loop surrounding it. Single-time reduction:
// L(t,x;t,y) = (y/x)^alpha K(y,x,t+sigma).
cd kmw_kernel(int alpha, double x, double y, double t);

// Borodin-Kuan kernel (independent implementation):
//   K(s1,e1;s2,e2) = (2/(pi^2 i)) int_C dv int_0^inf du v/(v^2-u^2)
//     e^{v^4+e2 v^2}/e^{u^4+e1 u^2} cos(s1 u) cos(s2 v)
//     - (4 pi (e1-e2))^{-1/2} (e^{(s1+s2)^2/(4(e2-e1))}
//        + e^{(s1-s2)^2/(4(e2-e1))}) 1_{e1>e2};
// equals L^{-1/2} under s = e2/sqrt2, t = e1/sqrt2, x = s2^2/(4 sqrt2),
// y = s1^2/(4 sqrt2) times the Jacobian dy/ds1 = s1/(2 sqrt2).
cd bk_kernel(double s1, double e1, double s2, double e2);

// Rank-one temperature derivative factors (Schur form needs integer alpha;
// the simplified form admits any real alpha > -1):
//   d/dsigma L = g1(s,x) g2(t,y)  for the operator-form normalization.
cd pearcey_g1(const PearceyParams& p, double s, double x, bool schur);
cd pearcey_g2(const PearceyParams& p, double t, double y, bool schur);

// Both sides of the repeated integration-by-parts identity
//   int_G e^{x/(v+s)} (v+s)^{-alpha-1} f(v) dv
//     = x^{-alpha} int_G e^{x/(v+s)} (v+s)^{alpha-1} f^(alpha)(v) dv
// for f(v) = exp(-v^2/2 + sigma v).
std::pair<cd, cd> int_parts_sides(int alpha, double s, double x, double sigma);

// Numerical check of the rank-one structure: the sigma-derivative matrix
// over (s_i, x_i) x (t_j, y_j) (Richardson-extrapolated central FD of the
// operator form) against g1 g2, plus the SVD rank ratio and the agreement
// of the Schur and simplified factor forms on the points.
struct PearceyRank1Report {
    double rank_ratio = 0.0;       // second/first singular value of the FD matrix
    double max_factor_gap = 0.0;   // max |dL/dsigma - g1 g2|
    double max_form_gap = 0.0;     // max |g_schur - g_simplified| over factors
};
PearceyRank1Report rank1_pearcey_check(const PearceyParams& p,
                                       const std::vector<std::array<double, 4>>& points);

// Maximum ODE residual of the rank-one factor on the grid, with 4th-order
// central differences of step h. which = 'f' checks
//   x f''' + (2-alpha) f'' - (s+sigma) f' + f = 0 for f(x) = x^alpha g1(s,x);
// which = 'g' checks
//   y g''' + (2+alpha) g'' - (t+sigma) g' - g = 0 for g(y) = y^{-alpha} g2(t,y).
double ode_residual(const PearceyParams& p, char which, double s,
                    const std::vector<double>& x_grid, double h);

}  // namespace hep
