#pragma once

#include <vector>

#include "hep/scaled.hpp"

namespace hep {

// Modified Bessel function I_nu(z), scaled, principal branch of (z/2)^nu.
ScaledValue bessel_i(double nu, cd z);

// Bessel function J_nu(z) for complex z of moderate modulus, principal branch.
cd bessel_j(double nu, cd z);

// J_nu(x) for real nu >= 0 and large real x > 0, stable in the transition
// region nu ~ x (saddle-point contour representation).
double bessel_j_large(double nu, double x);

// J_0(x)..J_nmax(x) for integer orders by backward (Miller) recurrence.
std::vector<double> bessel_j_seq(int nmax, double x);

// Entire function G_nu(zeta) = sum_k zeta^k / (k! Gamma(k+nu+1)), so that
// I_nu(z) = (z/2)^nu G_nu(z^2/4).
ScaledValue g_entire(double nu, cd zeta);

// k-th derivative of the Airy function Ai at real x (k >= 0, x >= -41).
double airy(int k, double x);
ScaledValue airy_scaled(int k, double x);

// t^{(k+1)/3} sum_p C(k,p)(-1)^{k-p} J_{2t+s t^{1/3}+p}(2t): Airy-derivative
// approximant built from Bessel functions near the transition order.
double j_approx(int k, double s, double t);

// Squared Bessel transition density with index alpha > -1, extended to
// negative time and negative space arguments (limits from the upper half
// plane for the fractional powers); x=0 is the hard-edge limit.
ScaledValue transition_density_scaled(double alpha, double t, double x, double y);
cd transition_density(double alpha, double t, double x, double y);

// k-th derivative of exp(-x^2/2).
double gauss_b(int k, double x);

// int_sigma^inf Ai^{(k)}(x + lambda) exp(-v lambda) dlambda for x >= 0.
cd h_airy(int k, double x, cd v, double sigma);

}  // namespace hep
