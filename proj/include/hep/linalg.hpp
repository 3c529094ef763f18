#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hep/scaled.hpp"

namespace hep {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Determinant via partial-pivot LU, returned in scaled form so that strongly
// under/overflowing determinants remain representable.
ScaledValue det_scaled(const Matrix& m);
cd det(const Matrix& m);

// Inverse of the 2x2 block matrix [[A, C], [B, D]] (A square mxm, D square
// axa) through the Schur complement S = D - B A^{-1} C.
struct BlockInverse {
    Matrix top_left, top_right, bottom_left, bottom_right;
    Matrix schur;  // S itself, exposed for the Schur-form evaluations

    // apply to a stacked vector (top of size m, bottom of size a)
    Vector apply(const Vector& top, const Vector& bottom) const;
};
BlockInverse block_schur_inverse(const Matrix& A, const Matrix& C, const Matrix& B,
                                 const Matrix& D);

// Discretized operator on L^2(0,L) (+) C^a. The continuous block carries the
// symmetrized Nystrom samples K(x_i,x_j) sqrt(w_i w_j); coupling blocks carry
// a single sqrt(w); the finite block enters as plain matrix entries.
struct DirectSumOperator {
    std::vector<double> x, w;  // Nystrom nodes/weights on [0, L]
    Matrix AA;  // m x m
    Matrix AC;  // m x a
    Matrix CA;  // a x m
    Matrix CC;  // a x a
};

// Build the grid part of a DirectSumOperator from a kernel function.
DirectSumOperator make_direct_sum(const std::function<cd(double, double)>& kernel, double L,
                                  int m, int a = 0);

// det(I + K) for the discretized direct-sum operator.
cd fredholm_det(const DirectSumOperator& op);

// Multi-interval, multi-time gap probability det(I - K) for an extended
// kernel K(s,x;t,y); E is a list of (time, lo, hi) windows.
struct GapDomain {
    double time, lo, hi;
};
double gap_probability(const std::function<cd(double, double, double, double)>& kernel,
                       const std::vector<GapDomain>& domains, int m_per_interval = 16,
                       double* imag_residual = nullptr);

}  // namespace hep
