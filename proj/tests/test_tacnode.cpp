#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "hep/contour.hpp"
#include "hep/finite_kernel.hpp"
#include "hep/gl.hpp"
#include "hep/specfun.hpp"
#include "hep/tacnode.hpp"

using namespace hep;

namespace {

TacnodeParams params(int alpha, double sigma) {
    TacnodeParams p;
    p.alpha = alpha;
    p.sigma = sigma;
    return p;
}

// Single-time reduced kernel at alpha = 0: a (xi, eta) double integral with
// 1/(xi - eta) inside, over cusped loops at the origin. Under eta = 1/(v+t),
// xi = 1/(u+t) this is exactly the free-resolvent (pole) part of the kernel;
// the operator (bilinear) part of M transforms into a separate contribution
// that this reduced form does not capture.
cd reduced_single_time(double t, double x, double y) {
    const double r0 = 0.12;     // cusp truncation: integrand < 1e-20 inside
    const double lxi = 1.1;     // xi loop radius
    const double lin = 0.5;     // inner eta loop radius
    const double rout = 2.4;    // outer eta circle radius
    cd e_xi_up = std::polar(1.0, 2.0 * M_PI / 3.0);
    cd e_eta_up = std::polar(1.0, M_PI / 3.0);

    Contour gxi;  // clockwise: out at 120 deg, arc through 0 deg, back at -120
    gxi.pieces.push_back(Contour::line(r0 * e_xi_up, lxi * e_xi_up));
    gxi.pieces.push_back(Contour::arc({0.0, 0.0}, lxi, 2.0 * M_PI / 3.0, -2.0 * M_PI / 3.0));
    gxi.pieces.push_back(Contour::line(lxi * std::conj(e_xi_up), r0 * std::conj(e_xi_up)));

    Contour geta;  // clockwise inner loop plus counterclockwise outer circle
    geta.pieces.push_back(Contour::line(r0 * e_eta_up, lin * e_eta_up));
    geta.pieces.push_back(Contour::arc({0.0, 0.0}, lin, M_PI / 3.0, -M_PI / 3.0));
    geta.pieces.push_back(Contour::line(lin * std::conj(e_eta_up), r0 * std::conj(e_eta_up)));
    geta.pieces.push_back(Contour::arc({0.0, 0.0}, rout, -M_PI, M_PI));

    QuadSpec spec;
    spec.rel_tol = 1e-11;
    auto inner = [&](cd eta) {
        cd num = std::exp(std::pow(1.0 / eta - t, 3) / 3.0 + x * eta);
        return integrate(gxi,
                         [&](cd xi) {
                             cd den = std::exp(std::pow(1.0 / xi - t, 3) / 3.0 + y * xi);
                             return num / den / (xi - eta);
                         },
                         spec);
    };
    cd total = integrate(geta, inner, spec);
    return total / std::pow(cd(0.0, 2.0 * M_PI), 2);
}

}  // namespace

TEST_CASE("shifted Airy kernel is the square of the Airy convolution operator") {
    AiryOperatorSet ops = build_airy_ops(params(1, 0.3));
    const int m = (int)ops.x.size();
    // composition with the grid quadrature vs the direct lambda integral
    double worst = 0.0;
    for (int i = 0; i < m; i += 37)
        for (int j = 0; j < m; j += 41) {
            double comp = 0.0;
            for (int k = 0; k < m; ++k)
                comp += ops.w[k] * ops.a_kernel(i, k) * ops.a_kernel(k, j);
            worst = std::max(worst, std::fabs(comp - ops.kai(i, j)));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("shifted Airy kernel vanishes at large temperature") {
    AiryOperatorSet ops = build_airy_ops(params(0, 8.0));
    CHECK(ops.kai.cwiseAbs().maxCoeff() < 1e-6);
    // resolvent factor within 1e-6 of the identity: <e_u, (id-K)^{-1} e_-v>
    // equals <e_u, e_-v> up to that error
    cd u(0.3, 0.2), v(1.4, -0.3);
    const int m = (int)ops.x.size();
    cd plain = 0.0;
    for (int i = 0; i < m; ++i)
        plain += ops.w[i] * std::exp((u - v) * (ops.x[i] + ops.p.sigma));
    CHECK(std::abs(resolvent_inner(ops, u, v) - plain) < 1e-6);
}

TEST_CASE("derivative matrix block is symmetric in the order indices") {
    AiryOperatorSet ops = build_airy_ops(params(3, -0.7));
    CHECK(ops.D_blk(0, 1) == ops.D_blk(1, 0));
    CHECK(ops.D_blk(0, 1).real() == doctest::Approx(airy(1, -0.7)).epsilon(1e-14));
    CHECK((ops.D_blk - ops.D_blk.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Schur complement: Hastings-McLeod value, symmetry, both forms") {
    // alpha = 1: scalar equals the Hastings-McLeod function, asymptote Ai
    AiryOperatorSet ops = build_airy_ops(params(1, 4.0));
    double q4 = schur_complement(ops)(0, 0).real();
    CHECK(std::fabs(q4 / airy(0, 4.0) - 1.0) < 1e-3);
    double q4r = schur_complement_repr(ops)(0, 0).real();
    CHECK(q4 == doctest::Approx(q4r).epsilon(1e-7));

    for (double sg : {-2.0, -1.0, 0.0, 1.0, 2.0, 4.0})
        for (int a : {1, 2, 3}) {
            AiryOperatorSet o = build_airy_ops(params(a, sg));  // throws if singular
            Matrix s = schur_complement(o);
            CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-9);
            Matrix s2 = schur_complement_repr(o);
            CHECK((s - s2).cwiseAbs().maxCoeff() < 1e-5);
        }
}

TEST_CASE("limit function: block form equals Schur form") {
    cd u0(0.5, 0.0), v0(1.5, 0.5);
    {
        AiryOperatorSet ops = build_airy_ops(params(1, 0.0));
        cd b = m_limit(ops, u0, v0);
        cd s = m_limit_schur(ops, u0, v0);
        CHECK(std::abs(b - s) < 1e-8 * std::max(1.0, std::abs(b)));
    }
    const cd us[3] = {{-0.5, 0.0}, {0.2, 0.4}, {0.2, -0.4}};
    const cd vs[3] = {{1.4, 0.0}, {1.8, 0.6}, {1.8, -0.6}};
    for (int a : {0, 1, 2})
        for (double sg : {-1.0, 0.0, 2.0}) {
            AiryOperatorSet ops = build_airy_ops(params(a, sg));
            for (const cd& u : us)
                for (const cd& v : vs) {
                    cd b = m_limit(ops, u, v);
                    cd s = m_limit_schur(ops, u, v);
                    CHECK(std::abs(b - s) < 1e-8 * std::max(1.0, std::abs(b)));
                }
        }
}

TEST_CASE("limit function at alpha 0 is the resolvent inner product") {
    // the explicit pole exp(sigma(u-v))/(v-u) is <e_u, e_-v>, and the
    // operator part supplies <e_u, K (id-K)^{-1} e_-v>, so the whole of M
    // collapses to the resolvent inner product
    AiryOperatorSet ops = build_airy_ops(params(0, 0.7));
    cd u(0.1, 0.3), v(1.6, -0.2);
    CHECK(std::abs(m_limit(ops, u, v) - resolvent_inner(ops, u, v)) < 1e-10);
}

TEST_CASE("kernel: single-time reduction at alpha 0") {
    TacnodeParams p = params(0, 0.0);
    const double s = 0.0, x = 1.0, t = 0.0, y = 1.5;
    AiryOperatorSet ops = build_airy_ops(p);
    UvContours uv = build_gamma_uv(s, t);

    // pole part alone: same contours and prefactors as the kernel, with M
    // replaced by exp(sigma(u-v))/(v-u)
    ContourNodes un = discretize(uv.u, 12, 16);
    Contour v_all = uv.v_arc;
    for (const Piece& pc : uv.v_loop.pieces) v_all.pieces.push_back(pc);
    ContourNodes vn = discretize(v_all, 8, 16);
    cd pole = 0.0;
    for (size_t i = 0; i < un.z.size(); ++i) {
        cd u = un.z[i];
        cd fu = un.w[i] * std::exp(-u * u * u / 3.0 - y / (u + t)) / (u + t);
        cd acc = 0.0;
        for (size_t j = 0; j < vn.z.size(); ++j) {
            cd v = vn.z[j];
            acc += vn.w[j] * std::exp(v * v * v / 3.0 + x / (v + s)) / (v + s) / (v - u);
        }
        pole += fu * acc;
    }
    pole *= -1.0 / (4.0 * M_PI * M_PI);

    cd rhs = reduced_single_time(0.0, x, y);
    CHECK(std::abs(pole - rhs) < 1e-6 * std::abs(rhs));

    // the full kernel carries the operator part on top: small but real,
    // confirmed independently by rescaled finite-size kernel values
    cd lhs = k_tacnode_uv(ops, s, x, t, y, uv);
    CHECK(std::fabs(lhs.imag()) < 1e-8);
    double extra = std::abs(lhs - pole);
    CHECK(extra > 1e-5);
    CHECK(extra < 1e-3);
    MESSAGE("operator-part contribution at the probe point = ", extra);
}

TEST_CASE("kernel: contour deformation and grid refinement invariance") {
    TacnodeParams p = params(1, 0.5);
    AiryOperatorSet ops = build_airy_ops(p);
    double s = 0.0, x = 1.0, t = 0.0, y = 0.8;
    UvContours uv = build_gamma_uv(s, t);
    cd base = k_tacnode_uv(ops, s, x, t, y, uv);

    // shift the u contour's real-axis crossing by +0.2
    UvContours shifted = uv;
    shifted.u.pieces.clear();
    cd e_up = std::polar(1.0, 2.0 * M_PI / 3.0);
    cd u0(uv.u0 + 0.2, 0.0);
    shifted.u.pieces.push_back(Contour::line(u0 + 6.0 * std::conj(e_up), u0));
    shifted.u.pieces.push_back(Contour::line(u0, u0 + 6.0 * e_up));
    cd moved = k_tacnode_uv(ops, s, x, t, y, shifted);
    CHECK(std::abs(moved - base) < 1e-8);

    TacnodeParams fine = p;
    fine.L += 5.0;
    fine.m *= 2;
    cd refined = k_tacnode_uv(build_airy_ops(fine), s, x, t, y, uv);
    CHECK(std::abs(refined - base) < 1e-6);
}

TEST_CASE("kernel: finite-n values approach the limit under critical scaling") {
    TacnodeParams p = params(1, 1.0);
    cd lim = k_tacnode(p, 0.0, 1.0, 0.0, 1.0);
    double e20 = std::abs(kn_tacnode_scaled(20, 1.0, 1, 1.0, 0.0, 1.0, 0.0, 1.0) - lim);
    double e60 = std::abs(kn_tacnode_scaled(60, 1.0, 1, 1.0, 0.0, 1.0, 0.0, 1.0) - lim);
    CHECK(e60 < e20);
    CHECK(e60 < 0.1 * std::abs(lim));
}

TEST_CASE("temperature derivative is rank one with matching factors") {
    TacnodeParams p = params(1, 1.0);
    std::vector<std::array<double, 4>> pts = {
        {0.0, 0.6, 0.0, 0.6}, {0.0, 1.0, 0.0, 1.0}, {0.0, 1.5, 0.0, 1.5}, {0.0, 2.1, 0.0, 2.1}};
    TempDerivReport rep = temp_derivative_check(p, pts);
    CHECK(rep.rank_ratio < 1e-4);
    CHECK(rep.max_factor_gap < 1e-5);
    MESSAGE("alpha=1 max |g-h| = ", rep.max_gh_gap);  // conjectured equality, reported

    TacnodeParams p0 = params(0, 0.5);
    TempDerivReport rep0 = temp_derivative_check(p0, pts);
    CHECK(rep0.rank_ratio < 1e-4);
    CHECK(rep0.max_gh_gap < 1e-7);
}

TEST_CASE("temperature integral recovers the kernel at alpha 0") {
    // The kernel decays toward low temperature (sigma -> -inf, the sparse
    // phase) and grows toward +inf, so the rank-one derivative integrates
    // up from below: K(sigma) = y^alpha int_{-inf}^{sigma} g g' dsigma'.
    // A 12-wide window [sigma0, sigma0 + 12] reproduces K at the top end
    // to within |K(sigma0)|; sigma0 = -5 puts that remainder near 1.5e-4.
    const double slo = -5.0, shi = 7.0;
    const double s = 0.0, x = 1.0, t = 0.0, y = 1.5;
    cd klo = k_tacnode(params(0, slo), s, x, t, y);
    cd khi = k_tacnode(params(0, shi), s, x, t, y);
    std::vector<double> sg, wg;
    gl_panels(slo, shi, 12, 8, sg, wg);
    cd acc = 0.0;
    for (size_t i = 0; i < sg.size(); ++i) {
        AiryOperatorSet ops = build_airy_ops(params(0, sg[i]));
        acc += wg[i] * temp_factor_g(ops, s, x) * temp_factor_g(ops, -t, y);
    }
    // exact consequence of the rank-one derivative over a finite window
    CHECK(std::abs((khi - klo) - acc) < 1e-5);
    // window integral alone matches the kernel at the top end
    CHECK(std::abs(khi - acc) < 1e-3 * std::max(1.0, std::abs(khi)));
    // decay at the bottom end justifies dropping the lower tail
    CHECK(std::abs(klo) < 5e-4);
}

TEST_CASE("exact determinant of the descending-product matrix") {
    using boost::multiprecision::cpp_int;
    CHECK(detan_exact(1) == 1);
    CHECK(detan_exact(2) == 2);
    CHECK(detan_exact(3) == 16);
    for (int n = 1; n <= 12; ++n) {
        // 2^{n(n-1)/2} prod_{j<n} j!
        cpp_int expect = 1;
        expect <<= n * (n - 1) / 2;
        for (int j = 1; j < n; ++j) {
            cpp_int f = 1;
            for (int i = 2; i <= j; ++i) f *= i;
            expect *= f;
        }
        CHECK(detan_exact(n) == expect);
    }
}

TEST_CASE("Airy derivative determinant asymptotics") {
    AiryDetAsympt a1 = airy_det_asympt(1, 10.0);
    CHECK(std::fabs(a1.ratio - 1.0) < 0.03);
    CHECK(a1.lhs == doctest::Approx(airy(0, 10.0)).epsilon(1e-12));

    AiryDetAsympt a2 = airy_det_asympt(2, 15.0);
    CHECK(std::fabs(a2.ratio - 1.0) < 0.10);

    auto [direct, rewritten] = airy_det_rewrite(3, 6.0);
    CHECK(std::fabs(direct - rewritten) < 1e-10 * std::fabs(direct));
}

TEST_CASE("finite-n operator entries approach the Airy operator") {
    // q=1 endpoint scaling; compare the continuous block of the finite-n
    // operator against the limiting shifted-Airy kernel entry at (0.5, 1.0).
    const double sg = 0.0, xx = 0.5, yy = 1.0;
    TacnodeParams p = params(0, sg);
    AiryOperatorSet lim = build_airy_ops(p);
    auto kai_at = [&](double x, double y) {
        double s = 0.0;
        for (size_t q = 0; q < lim.lam.size(); ++q)
            s += lim.lamw[q] * airy(0, x + lim.lam[q]) * airy(0, y + lim.lam[q]);
        return s;
    };
    double errs[2];
    int idx = 0;
    for (int bigN : {50, 200}) {
        double n13 = std::cbrt((double)bigN);
        EnsembleConfig cfg;
        cfg.n = 2 * bigN;
        cfg.alpha = 0;
        cfg.a = cfg.b = 2.0 * bigN - sg * n13;
        int k = (int)std::lround(n13 * xx), l = (int)std::lround(n13 * yy);
        BwBlocks bw = bw_blocks(cfg, std::max(k, l) + 8);
        double fin = (n13 * bw.A(k, l)).real();
        double limval = -kai_at(k / n13, l / n13);
        errs[idx++] = std::fabs(fin - limval);
    }
    CHECK(errs[1] < errs[0]);
}
