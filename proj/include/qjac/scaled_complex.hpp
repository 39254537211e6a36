#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace qjac {

using cxd = std::complex<double>;

// Complex value stored as mantissa * exp(log_scale).  Products of many
// O(exp(+-hundreds)) factors (Q-function evaluations off the real axis,
// integrand assembly in the regularized pairings) overflow double range;
// all such chains go through this type and only the final, physically
// small combination is converted back to a plain complex.
struct scaled_c {
    cxd m{0.0, 0.0};    // mantissa, kept with |m| in [1,2) when normalized
    double e{0.0};      // natural-log scale

    static scaled_c zero() { return {cxd(0.0, 0.0), 0.0}; }

    static scaled_c from(cxd v) {
        scaled_c s{v, 0.0};
        s.normalize();
        return s;
    }

    void normalize() {
        double a = std::abs(m);
        if (a == 0.0 || !std::isfinite(a)) {
            e = (a == 0.0) ? 0.0 : e;
            return;
        }
        double k = std::log(a);
        m /= std::exp(k);
        e += k;
    }

    bool is_zero() const { return m == cxd(0.0, 0.0); }

    cxd value() const {
        if (is_zero()) return {0.0, 0.0};
        return m * std::exp(e);
    }

    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return e + std::log(std::abs(m));
    }

    friend scaled_c operator*(const scaled_c& a, const scaled_c& b) {
        scaled_c r{a.m * b.m, a.e + b.e};
        r.normalize();
        return r;
    }
    friend scaled_c operator*(const scaled_c& a, cxd b) {
        scaled_c r{a.m * b, a.e};
        r.normalize();
        return r;
    }
    friend scaled_c operator/(const scaled_c& a, const scaled_c& b) {
        scaled_c r{a.m / b.m, a.e - b.e};
        r.normalize();
        return r;
    }

    // Addition re-scales to the larger exponent; the smaller term may
    // underflow to zero, which is the right behaviour here.
    friend scaled_c operator+(const scaled_c& a, const scaled_c& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const scaled_c& big = (a.e >= b.e) ? a : b;
        const scaled_c& sml = (a.e >= b.e) ? b : a;
        double d = sml.e - big.e;
        scaled_c r{big.m + sml.m * std::exp(d), big.e};
        r.normalize();
        return r;
    }
    friend scaled_c operator-(const scaled_c& a, const scaled_c& b) {
        return a + scaled_c{-b.m, b.e};
    }
};

} // namespace qjac
