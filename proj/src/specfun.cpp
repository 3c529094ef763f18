#include "hep/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hep/gl.hpp"

namespace hep {

namespace {

using cld = std::complex<long double>;

constexpr double kSeriesRadiusI = 30.0;  // series/asymptotic switch for I_nu
constexpr double kSeriesRadiusJ = 20.0;  // same for J_nu at complex argument

// Coefficients a_k(nu) of the Hankel asymptotic expansions.
std::vector<double> hankel_coeffs(double nu, int kmax) {
    std::vector<double> a(kmax + 1);
    a[0] = 1.0;
    double mu = 4.0 * nu * nu;
    for (int k = 1; k <= kmax; ++k) {
        double odd = 2.0 * k - 1.0;
        a[k] = a[k - 1] * (mu - odd * odd) / (8.0 * k);
    }
    return a;
}

}  // namespace

ScaledValue bessel_i(double nu, cd z) {
    if (nu <= -1.0) throw std::invalid_argument("bessel_i: nu must exceed -1");
    if (std::abs(z) <= kSeriesRadiusI) {
        cd pref = (z == cd(0.0, 0.0)) ? cd(nu == 0.0 ? 1.0 : 0.0, 0.0)
                                      : std::pow(z / 2.0, nu);
        return (g_entire(nu, z * z / 4.0) * pref).normalized();
    }
    // Two-sided asymptotic expansion; both exponentials are kept so the
    // formula stays valid on and near the imaginary axis.
    auto a = hankel_coeffs(nu, 40);
    cld zz(z.real(), z.imag());
    cld s1 = 0.0L, s2 = 0.0L, pw = 1.0L;
    long double prev = 1e300L;
    for (int k = 0; k <= 40; ++k) {
        cld t1 = (k % 2 ? -1.0L : 1.0L) * (long double)a[k] * pw;
        if (std::abs(t1) > prev) break;  // asymptotic series turned around
        prev = std::abs(t1);
        s1 += t1;
        s2 += (long double)a[k] * pw;
        pw /= zz;
    }
    double sgn = (z.imag() >= 0.0) ? 1.0 : -1.0;
    cd root = std::sqrt(2.0 * M_PI * z);
    // I_nu(z) = [e^z s1 + e^{-z +- i pi (nu+1/2)} s2] / sqrt(2 pi z)
    double ls = std::fabs(z.real());
    cd e1 = std::exp(z - ls);
    cd e2 = std::exp(-z - ls + cd(0.0, sgn * M_PI * (nu + 0.5)));
    cd m = (e1 * cd((double)s1.real(), (double)s1.imag()) +
            e2 * cd((double)s2.real(), (double)s2.imag())) /
           root;
    return ScaledValue(m, ls).normalized();
}

ScaledValue g_entire(double nu, cd zeta) {
    if (std::abs(zeta) <= 225.0) {
        cld term = 1.0L, sum = 0.0L;
        cld zz(zeta.real(), zeta.imag());
        term = 1.0L / (long double)std::tgamma(nu + 1.0);
        sum = term;
        for (int k = 1; k <= 120; ++k) {
            term *= zz / (long double)(k * (k + nu));
            sum += term;
            if (std::abs(term) < 1e-22L * std::abs(sum) && k > 4) break;
        }
        return ScaledValue(cd((double)sum.real(), (double)sum.imag()), 0.0).normalized();
    }
    cd root = std::sqrt(zeta);  // principal; consistent with the division below
    ScaledValue i = bessel_i(nu, 2.0 * root);
    return (i / ScaledValue(std::pow(root, nu), 0.0)).normalized();
}

cd bessel_j(double nu, cd z) {
    if (std::abs(z) <= kSeriesRadiusJ) {
        cd pref = (z == cd(0.0, 0.0)) ? cd(nu == 0.0 ? 1.0 : 0.0, 0.0)
                                      : std::pow(z / 2.0, nu);
        ScaledValue g = g_entire(nu, -z * z / 4.0);
        return (g * pref).value();
    }
    auto a = hankel_coeffs(nu, 40);
    cld zz(z.real(), z.imag());
    cld p = 0.0L, q = 0.0L, pw = 1.0L;
    long double prev = 1e300L;
    for (int k = 0; k <= 40; ++k) {
        long double mag = std::abs((long double)a[k] * pw);
        if (mag > prev) break;
        prev = mag;
        cld t = (long double)a[k] * pw;
        if (k % 4 == 0) p += t;
        else if (k % 4 == 1) q += t;
        else if (k % 4 == 2) p -= t;
        else q -= t;
        pw /= zz;
    }
    cd omega = z - cd(nu * M_PI / 2.0 + M_PI / 4.0, 0.0);
    cd pc((double)p.real(), (double)p.imag());
    cd qc((double)q.real(), (double)q.imag());
    return std::sqrt(2.0 / (M_PI * z)) * (std::cos(omega) * pc - std::sin(omega) * qc);
}

double bessel_j_large(double nu, double x) {
    if (x <= 0.0 || nu < 0.0) throw std::invalid_argument("bessel_j_large: need x>0, nu>=0");
    if (x <= kSeriesRadiusJ) return bessel_j(nu, cd(x, 0.0)).real();
    // Schlaefli contour: circle of radius r plus (for non-integer order) two
    // legs along the negative axis. r is placed at the saddle when nu > x.
    double r = 1.0;
    if (nu > x) r = (nu + std::sqrt(nu * nu - x * x)) / x;
    // circle part: (1/pi) Re int_0^pi r^{-nu} e^{-i nu th} e^{(x/2)(r e^{i th} - e^{-i th}/r)} dth
    int panels = (int)std::min(60000.0, std::max(48.0, (nu + x) / 3.0));
    const GlRule& gr = gl_rule(16);
    double lr = std::log(r);
    double sum = 0.0;
    double h = M_PI / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        double c = (pnl + 0.5) * h;
        for (int i = 0; i < 16; ++i) {
            double th = c + 0.5 * h * gr.x[i];
            cd e(std::cos(th), std::sin(th));
            cd expo = 0.5 * x * (r * e - std::conj(e) / r) - cd(nu * lr, nu * th);
            double re = expo.real();
            double val = (re < -745.0) ? 0.0 : std::exp(re) * std::cos(expo.imag());
            sum += 0.5 * h * gr.w[i] * val;
        }
    }
    double result = sum / M_PI;
    double snu = std::sin(M_PI * nu);
    if (std::fabs(snu) > 1e-14) {
        // legs: -(sin nu pi / pi) int_r^inf u^{-nu-1} e^{-(x/2)(u - 1/u)} du,
        // substituted u = r e^tau.
        double tail = 0.0;
        double tmax = 1.0;
        while (0.5 * x * (r * std::exp(tmax) - std::exp(-tmax) / r) + nu * (tmax + lr) < 720.0 &&
               tmax < 50.0)
            tmax += 1.0;
        std::vector<double> xs, ws;
        gl_panels(0.0, tmax, std::max(8, (int)tmax * 2), 16, xs, ws);
        for (size_t i = 0; i < xs.size(); ++i) {
            double u = r * std::exp(xs[i]);
            double expo = -0.5 * x * (u - 1.0 / u) - nu * std::log(u);
            if (expo > -745.0) tail += ws[i] * std::exp(expo);
        }
        result -= snu / M_PI * tail;
    }
    return result;
}

std::vector<double> bessel_j_seq(int nmax, double x) {
    if (nmax < 0 || x <= 0.0) throw std::invalid_argument("bessel_j_seq: bad arguments");
    int start = nmax + 60 + (int)(2.0 * std::cbrt(x)) + (int)(0.1 * x < 40 ? 0.1 * x : 40);
    if (start % 2) ++start;
    std::vector<double> f(start + 2, 0.0);
    f[start + 1] = 0.0;
    f[start] = 1e-280;
    for (int m = start; m >= 1; --m) {
        f[m - 1] = (2.0 * m / x) * f[m] - f[m + 1];
        if (std::fabs(f[m - 1]) > 1e260) {
            for (int j = m - 1; j <= start + 1; ++j) f[j] *= 1e-260;
        }
    }
    long double norm = f[0];
    for (int m = 2; m <= start; m += 2) norm += 2.0L * f[m];
    std::vector<double> out(nmax + 1);
    for (int m = 0; m <= nmax; ++m) out[m] = (double)(f[m] / norm);
    return out;
}

namespace {

// Airy function table on [-41, 8.25] with step 1/4, built by Taylor stepping
// of y'' = x y from the exact values at 0; immutable after first use.
struct AiryTable {
    static constexpr double x0 = -41.0;
    static constexpr double step = 0.25;
    std::vector<long double> ai, aip;

    static void taylor_step(long double x, long double h, long double& a, long double& ap) {
        // Taylor coefficients around x for y'' = x y.
        const int N = 36;
        long double c[N + 1];
        c[0] = a;
        c[1] = ap;
        c[2] = x * c[0] / 2.0L;
        for (int n = 1; n + 2 <= N; ++n)
            c[n + 2] = (x * c[n] + c[n - 1]) / ((long double)(n + 1) * (n + 2));
        long double v = 0.0L;
        for (int n = N; n >= 1; --n) v = v * h + c[n];
        v = v * h + c[0];
        long double dd = 0.0L;
        for (int n = N; n >= 1; --n) dd = dd * h + c[n] * n;
        a = v;
        ap = dd;
    }

    AiryTable() {
        int n_lo = (int)std::llround(-x0 / step);     // steps from 0 down to x0
        int n_hi = (int)std::llround(8.25 / step);    // steps from 0 up
        ai.assign(n_lo + n_hi + 1, 0.0L);
        aip.assign(n_lo + n_hi + 1, 0.0L);
        const long double ai0 = 0.35502805388781723926L;
        const long double aip0 = -0.25881940379280679840L;
        long double a = ai0, ap = aip0;
        ai[n_lo] = a;
        aip[n_lo] = ap;
        for (int i = 1; i <= n_hi; ++i) {  // upward
            taylor_step(x0 + (n_lo + i - 1) * step, step, a, ap);
            ai[n_lo + i] = a;
            aip[n_lo + i] = ap;
        }
        a = ai0;
        ap = aip0;
        for (int i = 1; i <= n_lo; ++i) {  // downward
            taylor_step(x0 + (n_lo - i + 1) * step, -step, a, ap);
            ai[n_lo - i] = a;
            aip[n_lo - i] = ap;
        }
    }

    void eval(double x, double& a0, double& a1) const {
        int idx = (int)std::llround((x - x0) / step);
        idx = std::max(0, std::min((int)ai.size() - 1, idx));
        long double a = ai[idx], ap = aip[idx];
        long double h = (long double)x - (x0 + idx * step);
        taylor_step(x0 + idx * step, h, a, ap);
        a0 = (double)a;
        a1 = (double)ap;
    }
};

const AiryTable& airy_table() {
    static AiryTable t;
    return t;
}

// Positive-x asymptotics, returning mantissa pair and log scale -zeta.
void airy_asympt(double x, double& m0, double& m1, double& ls) {
    double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
    double u = 1.0, v = 1.0, s0 = 0.0, s1 = 0.0, pw = 1.0;
    double prev = 1e300;
    for (int k = 0; k <= 60; ++k) {
        if (std::fabs(u * pw) > prev) break;
        prev = std::fabs(u * pw);
        s0 += (k % 2 ? -1.0 : 1.0) * u * pw;
        s1 += (k % 2 ? -1.0 : 1.0) * v * pw;
        double kk = k;
        double un = u * (3.0 * kk + 0.5) * (3.0 * kk + 1.5) * (3.0 * kk + 2.5) /
                    (54.0 * (kk + 1.0) * (kk + 0.5));
        v = un * (6.0 * kk + 7.0) / (1.0 - (6.0 * kk + 6.0));
        u = un;
        pw /= zeta;
    }
    double sp = 2.0 * std::sqrt(M_PI);
    m0 = s0 / (sp * std::pow(x, 0.25));
    m1 = -std::pow(x, 0.25) * s1 / sp;
    ls = -zeta;
}

}  // namespace

ScaledValue airy_scaled(int k, double x) {
    if (k < 0) throw std::invalid_argument("airy: negative derivative order");
    double a0, a1, ls = 0.0;
    if (x > 7.0) {
        airy_asympt(x, a0, a1, ls);
    } else {
        if (x < -41.0) throw std::invalid_argument("airy: x below supported range");
        airy_table().eval(x, a0, a1);
    }
    if (k == 0) return ScaledValue(cd(a0, 0.0), ls).normalized();
    if (k == 1) return ScaledValue(cd(a1, 0.0), ls).normalized();
    // Ai^{(k+2)}(x) = x Ai^{(k)}(x) + k Ai^{(k-1)}(x)
    std::vector<double> v(k + 1);
    v[0] = a0;
    v[1] = a1;
    for (int j = 2; j <= k; ++j) v[j] = x * v[j - 2] + (j - 2) * (j >= 3 ? v[j - 3] : 0.0);
    return ScaledValue(cd(v[k], 0.0), ls).normalized();
}

double airy(int k, double x) {
    ScaledValue s = airy_scaled(k, x);
    return s.value().real();
}

double j_approx(int k, double s, double t) {
    if (t <= 0.0) throw std::invalid_argument("j_approx: t must be positive");
    double t13 = std::cbrt(t);
    double sum = 0.0;
    double binom = 1.0;
    for (int p = 0; p <= k; ++p) {
        if (p > 0) binom = binom * (k - p + 1) / p;
        double sign = ((k - p) % 2) ? -1.0 : 1.0;
        sum += binom * sign * bessel_j_large(2.0 * t + s * t13 + p, 2.0 * t);
    }
    return std::pow(t, (k + 1) / 3.0) * sum;
}

ScaledValue transition_density_scaled(double alpha, double t, double x, double y) {
    if (alpha <= -1.0) throw std::invalid_argument("transition_density: alpha must exceed -1");
    if (t == 0.0) throw std::invalid_argument("transition_density: t must be nonzero");
    cd num = cpow_above(y, alpha);
    cd den = cpow_above(2.0 * t, alpha + 1.0);
    ScaledValue e = scaled_exp(cd(-(x + y) / (2.0 * t), 0.0));
    ScaledValue g = g_entire(alpha, cd(x * y / (4.0 * t * t), 0.0));
    return (e * g * (num / den)).normalized();
}

cd transition_density(double alpha, double t, double x, double y) {
    return transition_density_scaled(alpha, t, x, y).value();
}

double gauss_b(int k, double x) {
    double b0 = std::exp(-0.5 * x * x);
    if (k == 0) return b0;
    double b1 = -x * b0;
    for (int j = 1; j < k; ++j) {
        double b2 = -x * b1 - j * b0;
        b0 = b1;
        b1 = b2;
    }
    return b1;
}

cd h_airy(int k, double x, cd v, double sigma) {
    if (x < 0.0) throw std::invalid_argument("h_airy: x must be nonnegative");
    double c = std::max(0.0, -v.real());
    double lmax = std::max(sigma, 0.0) + 40.0 + 4.0 * c * c + 8.0 * c;
    int panels = std::max(8, (int)std::ceil((lmax - sigma) / 2.0));
    std::vector<double> xs, ws;
    gl_panels(sigma, lmax, panels, 16, xs, ws);
    ScaledValue sum;
    for (size_t i = 0; i < xs.size(); ++i) {
        ScaledValue a = airy_scaled(k, x + xs[i]);
        ScaledValue e = scaled_exp(-v * xs[i]);
        sum = sum + a * e * cd(ws[i], 0.0);
    }
    return sum.value();
}

}  // namespace hep
