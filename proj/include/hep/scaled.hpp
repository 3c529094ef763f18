#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace hep {

using cd = std::complex<double>;

// A complex value stored as mantissa * exp(log_scale), so that quantities with
// exponents far outside double range can be carried through products and sums.
struct ScaledValue {
    cd mantissa{0.0, 0.0};
    double log_scale = 0.0;

    ScaledValue() = default;
    ScaledValue(cd m, double ls = 0.0) : mantissa(m), log_scale(ls) {}

    // Renormalize so |mantissa| is O(1); zero mantissa resets the scale.
    ScaledValue normalized() const {
        double a = std::abs(mantissa);
        if (a == 0.0 || !std::isfinite(a)) return ScaledValue(mantissa, 0.0);
        double s = std::log(a);
        return ScaledValue(mantissa / a, log_scale + s);
    }

    // Collapse to an ordinary complex double (may under/overflow).
    cd value() const {
        if (mantissa == cd(0.0, 0.0)) return cd(0.0, 0.0);
        if (log_scale < -745.0) return cd(0.0, 0.0);
        if (log_scale > 700.0)
            throw std::overflow_error("ScaledValue::value overflow, log_scale=" +
                                      std::to_string(log_scale));
        return mantissa * std::exp(log_scale);
    }

    double log_abs() const {
        double a = std::abs(mantissa);
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a) + log_scale;
    }

    friend ScaledValue operator*(const ScaledValue& a, const ScaledValue& b) {
        return ScaledValue(a.mantissa * b.mantissa, a.log_scale + b.log_scale).normalized();
    }
    friend ScaledValue operator*(const ScaledValue& a, cd c) {
        return ScaledValue(a.mantissa * c, a.log_scale).normalized();
    }
    friend ScaledValue operator/(const ScaledValue& a, const ScaledValue& b) {
        return ScaledValue(a.mantissa / b.mantissa, a.log_scale - b.log_scale).normalized();
    }
    friend ScaledValue operator+(const ScaledValue& a, const ScaledValue& b) {
        if (a.mantissa == cd(0.0, 0.0)) return b;
        if (b.mantissa == cd(0.0, 0.0)) return a;
        if (a.log_scale >= b.log_scale) {
            double d = b.log_scale - a.log_scale;
            cd add = d < -745.0 ? cd(0.0, 0.0) : b.mantissa * std::exp(d);
            return ScaledValue(a.mantissa + add, a.log_scale).normalized();
        }
        return b + a;
    }
};

// exp(z) as a ScaledValue, valid for arbitrarily large |Re z|.
inline ScaledValue scaled_exp(cd z) {
    return ScaledValue(std::exp(cd(0.0, z.imag())), z.real());
}

// x^p for real x and real p with negative reals treated as limits from the
// upper half plane: x^p = exp(i*pi*p) |x|^p for x < 0.
inline cd cpow_above(double x, double p) {
    if (x > 0.0) return cd(std::pow(x, p), 0.0);
    if (x == 0.0) return cd(p == 0.0 ? 1.0 : 0.0, 0.0);
    return std::polar(std::pow(-x, p), M_PI * p);
}

}  // namespace hep
