#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "hep/contour.hpp"
#include "hep/linalg.hpp"
#include "hep/scaled.hpp"

namespace hep {

// Parameters of the hard-edge tacnode limit: nonnegative integer index alpha,
// temperature sigma, and the Nystrom grid (truncation length L, approximate
// node count m) used to discretize the half-line operator blocks.
struct TacnodeParams {
    int alpha = 0;
    double sigma = 0.0;
    double L = 24.0;
    int m = 192;
};

// Discretized Airy operator blocks on L^2(0,L) (+) C^alpha:
//   A = id - K_Ai(sigma),  B(k,y) = -int_sigma^inf Ai^{(k)}(l) Ai(y+l) dl,
//   C(x,l) = Ai^{(l)}(x+sigma),  D(k,l) = Ai^{(k+l)}(sigma),
// where K_Ai(sigma)(x,y) = int_sigma^inf Ai(x+l) Ai(y+l) dl. The continuous
// block carries symmetrized Nystrom samples; boundary-derivative slots are
// evaluated by one-sided 4th order finite differences on a refined cluster
// of points next to x = 0 (the Gauss grid itself excludes the origin).
struct AiryOperatorSet {
    TacnodeParams p;
    std::vector<double> x, w;    // Nystrom nodes/weights on [0, L]
    std::vector<double> xc;     // boundary cluster 0, d, 2d, ...
    Eigen::MatrixXd fd;          // alpha rows of finite-difference weights
    std::vector<double> lam, lamw;  // shared lambda grid on [sigma, sigma+60]
    Eigen::MatrixXd u_mat;       // Ai(x_i + lam_q), grid rows
    Eigen::MatrixXd uc_mat;      // Ai(xc_c + lam_q), cluster rows
    Eigen::MatrixXd a_kernel;    // Ai(x_i + x_j + sigma), plain samples
    Eigen::MatrixXd ac_kernel;   // Ai(xc_c + x_j + sigma)
    Eigen::MatrixXd kai;         // K_Ai(sigma)(x_i, x_j), plain samples
    Eigen::MatrixXd kai_c;       // K_Ai(sigma)(xc_c, x_j)
    Matrix A_blk, C_blk, B_blk, D_blk;  // weighted blocks as described above
    BlockInverse inv;            // factorized inverse of [[A, C], [B, D]]
    Eigen::PartialPivLU<Matrix> a_lu;  // factorization of A alone
};

// Build the operator set. Throws std::runtime_error if the block matrix (or
// equivalently its Schur complement) is numerically singular at (alpha,
// sigma); such a failure is reported, never regularized away.
AiryOperatorSet build_airy_ops(const TacnodeParams& p);

// Limiting Schur complement S = D - B A^{-1} C (alpha x alpha). For alpha=1
// this is the Hastings-McLeod function q(sigma).
Matrix schur_complement(const AiryOperatorSet& ops);
// Cross-check form: boundary derivatives of the kernel of A (id - A^2)^{-1}.
Matrix schur_complement_repr(const AiryOperatorSet& ops);

// h(x; v) = int_sigma^inf Ai(x + l) exp(-v l) dl on the grid (weighted with
// sqrt(w)) and on the boundary cluster (plain values).
Vector h_grid(const AiryOperatorSet& ops, cd v);
Vector h_cluster(const AiryOperatorSet& ops, cd v);

// <e_u, (id - K_Ai(sigma))^{-1} e_{-v}> with e_s(x) = exp(s (x + sigma)),
// discretized on [0, L]. Only faithful for Re u < Re v (else the truncated
// inner product no longer represents the integral).
cd resolvent_inner(const AiryOperatorSet& ops, cd u, cd v);

// M(u, v) = exp(sigma(u-v))/(v-u)
//           + ((h(y;-u))_y, -(1,u,..,u^{a-1}) e^{sigma u})
//             . [[A, C], [B, D]]^{-1} . ((h(x;v))_x, h(0;v), d/dx h(0;v), ..)
// in block form, and the equivalent Schur-complement form. Both require
// u != v; the Schur form additionally requires Re u < Re v.
cd m_limit(const AiryOperatorSet& ops, cd u, cd v);
cd m_limit_schur(const AiryOperatorSet& ops, cd u, cd v);

// Column (block inverse applied to the h(.;v) input) and row vectors of the
// bilinear part of M, exposed so that double-contour quadrature can reuse
// the factorization across all nodes.
Vector m_limit_col(const AiryOperatorSet& ops, cd v);
Vector m_limit_row(const AiryOperatorSet& ops, cd u);

// Hard-edge tacnode kernel
//   K(s,x;t,y) = -p_{(t-s)/2}(x,y) 1_{t>s}
//     + 1/(2 pi i)^2 int_{G_v} dv int_{G_u} du
//       exp(v^3/3 + x/(v+s)) / exp(u^3/3 + y/(u+t))
//       (u+t)^{alpha-1} / (v+s)^{alpha+1} M(u,v)
// with G_u from e^{-2i pi/3}inf to e^{2i pi/3}inf right of -s, -t, and G_v
// the arcs e^{+-i pi/3}inf right of G_u plus a clockwise loop around -s.
cd k_tacnode(const TacnodeParams& p, double s, double x, double t, double y);
cd k_tacnode_uv(const AiryOperatorSet& ops, double s, double x, double t,
                double y, const UvContours& uv);

// Left/right factors of the temperature derivative: d/dsigma K(s,x;t,y) =
// y^alpha g(s,x) h(-t,y). g uses the v-side contour representation; h the
// u-side one (both specialize consistently at alpha = 0).
cd temp_factor_g(const AiryOperatorSet& ops, double s, double x);
cd temp_factor_h(const AiryOperatorSet& ops, double s, double x);

// Numerical check of the rank-one temperature-derivative structure on a
// point set: the sigma-derivative matrix over (s_i, x_i) x (t_j, y_j) is
// formed by Richardson-extrapolated central differences and compared with
// the factorized form. The g = h coincidence is measured, not assumed.
struct TempDerivReport {
    double rank_ratio = 0.0;       // second / first singular value
    double max_factor_gap = 0.0;   // max |dK/dsigma - y^alpha g h|
    double max_gh_gap = 0.0;       // max |g - h| over the evaluation points
};
TempDerivReport temp_derivative_check(const TacnodeParams& p,
                                      const std::vector<std::array<double, 4>>& points);

// Exact integer determinant (fraction-free Bareiss elimination) of the
// n x n matrix a_{k,l} = (2k-1)(2k-5)...(2k+3-4l), empty product = 1;
// equals 2^{n(n-1)/2} prod_{j<n} j!.
boost::multiprecision::cpp_int detan_exact(int n);

// det(Ai^{(k+l)}(x))_{k,l<n}: value computed in the scaled basis
// f_k(x) = 2 sqrt(pi) exp(2/3 x^{3/2}) Ai^{(k)}(x) to avoid underflow,
// together with its large-x asymptotic value and their ratio.
struct AiryDetAsympt {
    double lhs = 0.0, rhs = 0.0, ratio = 0.0;
};
AiryDetAsympt airy_det_asympt(int n, double x);

// The two sides of the scaled-basis rewrite: the plain determinant
// det(Ai^{(k+l)}(x)) and exp(-2n x^{3/2}/3) / (2^n pi^{n/2}) det(f_k^{(l)}),
// with the f_k derivatives expanded analytically (no finite differences).
std::pair<double, double> airy_det_rewrite(int n, double x);

}  // namespace hep
