#pragma once

#include <vector>

#include "hep/contour.hpp"
#include "hep/linalg.hpp"
#include "hep/scaled.hpp"

namespace hep {

// Parameters of n non-intersecting squared Bessel paths with common starting
// point a (time 0) and common ending point b (time 1).
struct EnsembleConfig {
    int n = 1;
    int alpha = 0;
    double a = 1.0;
    double b = 1.0;
};

// Two-point weight w(z; x, y, t) on the unit circle (continued analytically):
// integrating w(z;x,y,t) dz/z over a circle around 0 gives the transition
// density p_t(x, y).
cd weight_w(cd z, double x, double y, double t, int alpha);

// Toeplitz moment of z^d against the (a, b, t=1) weight; the circle radius is
// free by analyticity and exposed for deformation tests.
cd moment(const EnsembleConfig& cfg, int d, double radius = 1.0);

// Christoffel-Darboux kernel C_n(xi, eta) as a ratio of Toeplitz determinants
// and, equivalently, as a vector / moment-matrix-inverse / vector product.
cd cn_toeplitz(const EnsembleConfig& cfg, cd xi, cd eta, double radius = 1.0);
cd cn_cd_product(const EnsembleConfig& cfg, cd xi, cd eta, double radius = 1.0);

// Extended kernel by the confluent derivative-moment-matrix formula.
cd kn_direct(const EnsembleConfig& cfg, double s, double x, double t, double y);

// Extended kernel as a double unit-circle integral of C_n against two weights.
cd kn_toeplitz(const EnsembleConfig& cfg, double s, double x, double t,
               double y, int npts = 192);

// Truncated Borodin-Okounkov style blocks on l^2(Z_{>=0}) (+) C^alpha,
// together with the series coefficients that generate them:
//   A_{k,l} = delta - sum_j Z_{l+j} W_{k+j},   B_{k,l} = -sum_j Z_{l+j} Wh_{k+j},
// C and D Toeplitz in l - k.
struct BwBlocks {
    int n = 0;
    int alpha = 0;
    int m = 0;  // l^2 truncation size
    double a = 0.0, b = 0.0;
    std::vector<cd> zc, wc, whc;  // Z_m, W_m, Wh_m coefficient sequences
    Matrix A, B, C, D;
    BlockInverse inv;  // factorized inverse of [[A, C], [B, D]]
};

// Closed Bessel-function coefficient forms (valid for any a, b > 0).
BwBlocks bw_blocks(const EnsembleConfig& cfg, int m);
// Same blocks with coefficients from circle quadrature at explicit radius rho.
BwBlocks bw_blocks_quadrature(const EnsembleConfig& cfg, int m, double rho);

// Resolvent input vectors; power series in eta (resp. 1/xi) against the
// coefficient sequences, equal to the circle integrals at any admissible rho.
Vector bw_h(const BwBlocks& bw, cd eta);     // length m
Vector bw_hhat(const BwBlocks& bw, cd eta);  // length alpha
Vector bw_g(const BwBlocks& bw, cd xi);      // length m
// Direct circle quadrature of the h integral at explicit radius (tests).
Vector bw_h_quadrature(const BwBlocks& bw, cd eta, double rho);

// M(xi, eta) = 1/(eta - xi) - (g, xivec) . blockinv . (h, hhat).
// The resolvent vectors are taken at enlarged circle radii (poles at -eta
// inside, -xi outside), which is the version entering the kernel integral.
cd m_block(const BwBlocks& bw, cd xi, cd eta);
// Same with the vectors at the original radii inside the unit annulus
// |xi| < 1 < |eta| (explicit residue corrections); this is the version that
// enters the Christoffel-Darboux identity.
cd m_block_cd(const BwBlocks& bw, cd xi, cd eta);

// Extended kernel as a double contour integral with M(xi, eta) inside; the
// node sets are prebuilt discretizations of the xi and eta contours.
cd kn_operator_nodes(const EnsembleConfig& cfg, const BwBlocks& bw, double s,
                     double x, double t, double y, const ContourNodes& xi_nodes,
                     const ContourNodes& eta_nodes);
cd kn_operator(const EnsembleConfig& cfg, double s, double x, double t,
               double y);

// Finite-n kernel under the critical endpoint scaling a ~ 2qN, b ~ 2N/q with
// n = 2N, evaluated at the rescaled space-time arguments and multiplied by
// the local density factor 2r, r = q (1+q)^{-2} N^{-1/3}.
cd kn_tacnode_scaled(int bigN, double q, int alpha, double sigma, double s,
                     double x, double t, double y);

// Kernel of paths started at 0 with endpoints bs, as a (w, z) double integral
// with w on (-infinity, 0] and z on a wedge contour around the endpoints.
// Real alpha > -1 is admitted.
cd kn_pearcey_prelimit(int n, double alpha, const std::vector<double>& bs,
                       double s, double x, double t, double y);

}  // namespace hep
