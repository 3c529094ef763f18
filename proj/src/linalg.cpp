#include "hep/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "hep/gl.hpp"

namespace hep {

ScaledValue det_scaled(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: matrix must be square");
    if (m.rows() == 0) return ScaledValue(cd(1.0, 0.0), 0.0);
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix& u = lu.matrixLU();
    ScaledValue d(cd((double)lu.permutationP().determinant(), 0.0), 0.0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) d = d * ScaledValue(u(i, i), 0.0);
    return d;
}

cd det(const Matrix& m) { return det_scaled(m).value(); }

BlockInverse block_schur_inverse(const Matrix& A, const Matrix& C, const Matrix& B,
                                 const Matrix& D) {
    if (A.rows() != A.cols() || D.rows() != D.cols() || C.rows() != A.rows() ||
        C.cols() != D.cols() || B.rows() != D.rows() || B.cols() != A.cols())
        throw std::invalid_argument("block_schur_inverse: inconsistent block shapes");
    Eigen::PartialPivLU<Matrix> luA(A);
    Matrix AinvC = luA.solve(C);
    BlockInverse r;
    r.schur = D - B * AinvC;
    Eigen::PartialPivLU<Matrix> luS(r.schur);
    Matrix SinvB = luS.solve(B);
    r.bottom_right = luS.solve(Matrix::Identity(D.rows(), D.cols()));
    r.bottom_left = -SinvB * luA.inverse();
    r.top_right = -AinvC * r.bottom_right;
    r.top_left = luA.inverse() - AinvC * r.bottom_left;
    return r;
}

Vector BlockInverse::apply(const Vector& top, const Vector& bottom) const {
    Vector out(top.size() + bottom.size());
    out.head(top.size()) = top_left * top + top_right * bottom;
    out.tail(bottom.size()) = bottom_left * top + bottom_right * bottom;
    return out;
}

DirectSumOperator make_direct_sum(const std::function<cd(double, double)>& kernel, double L,
                                  int m, int a) {
    DirectSumOperator op;
    int panels = std::max(1, m / 16);
    gl_panels(0.0, L, panels, m / panels, op.x, op.w);
    int n = (int)op.x.size();
    op.AA.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            op.AA(i, j) = kernel(op.x[i], op.x[j]) * std::sqrt(op.w[i] * op.w[j]);
    op.AC = Matrix::Zero(n, a);
    op.CA = Matrix::Zero(a, n);
    op.CC = Matrix::Zero(a, a);
    return op;
}

cd fredholm_det(const DirectSumOperator& op) {
    int n = (int)op.AA.rows();
    int a = (int)op.CC.rows();
    Matrix m = Matrix::Identity(n + a, n + a);
    m.topLeftCorner(n, n) += op.AA;
    if (a > 0) {
        m.topRightCorner(n, a) += op.AC;
        m.bottomLeftCorner(a, n) += op.CA;
        m.bottomRightCorner(a, a) += op.CC;
    }
    return det(m);
}

double gap_probability(const std::function<cd(double, double, double, double)>& kernel,
                       const std::vector<GapDomain>& domains, int m_per_interval,
                       double* imag_residual) {
    std::vector<double> ts, xs, ws;
    for (const auto& d : domains) {
        if (d.hi <= d.lo) throw std::invalid_argument("gap_probability: empty window");
        std::vector<double> x, w;
        gl_panels(d.lo, d.hi, std::max(1, m_per_interval / 16), 16, x, w);
        if ((int)x.size() < m_per_interval) {
            x.clear();
            w.clear();
            gl_panels(d.lo, d.hi, 1, m_per_interval, x, w);
        }
        for (size_t i = 0; i < x.size(); ++i) {
            ts.push_back(d.time);
            xs.push_back(x[i]);
            ws.push_back(w[i]);
        }
    }
    int n = (int)xs.size();
    Matrix m = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) -= kernel(ts[i], xs[i], ts[j], xs[j]) * std::sqrt(ws[i] * ws[j]);
    cd d = det(m);
    if (imag_residual) *imag_residual = std::fabs(d.imag());
    return d.real();
}

}  // namespace hep
