#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <string>

#include "qjac/errors.hpp"
#include "qjac/scaled_complex.hpp"

namespace qjac {

// Two exponential variables appear throughout: z = e^{2 zeta} and the
// dual Z = e^{2 pi zeta / gamma}.  A Laurent polynomial carries its tag so
// shifts in zeta pick the right phase per unit exponent.
enum class var_tag { z_var, Z_var };

inline constexpr double coeff_drop_rel = 1e-14;

// Finite Laurent polynomial, exponent -> complex coefficient.
struct laurent_poly {
    var_tag tag = var_tag::z_var;
    std::map<int, cxd> c;

    laurent_poly() = default;
    explicit laurent_poly(var_tag t) : tag(t) {}

    static laurent_poly monomial(var_tag t, int n, cxd a) {
        laurent_poly p(t);
        if (a != cxd(0.0, 0.0)) p.c[n] = a;
        return p;
    }

    bool empty() const { return c.empty(); }

    cxd coeff(int n) const {
        auto it = c.find(n);
        return it == c.end() ? cxd(0.0, 0.0) : it->second;
    }

    int min_exp() const { return c.empty() ? 0 : c.begin()->first; }
    int max_exp() const { return c.empty() ? 0 : c.rbegin()->first; }

    double max_abs() const {
        double m = 0.0;
        for (auto& [n, a] : c) m = std::max(m, std::abs(a));
        return m;
    }

    // Drop coefficients below the relative tolerance; keeps supports from
    // accreting numerical dust across long expression chains.
    laurent_poly& prune(double rel = coeff_drop_rel) {
        double cut = max_abs() * rel;
        for (auto it = c.begin(); it != c.end();) {
            if (std::abs(it->second) <= cut)
                it = c.erase(it);
            else
                ++it;
        }
        return *this;
    }

    laurent_poly& operator+=(const laurent_poly& o) {
        check_tag(o);
        for (auto& [n, a] : o.c) c[n] += a;
        return prune();
    }
    laurent_poly& operator-=(const laurent_poly& o) {
        check_tag(o);
        for (auto& [n, a] : o.c) c[n] -= a;
        return prune();
    }
    friend laurent_poly operator+(laurent_poly a, const laurent_poly& b) { return a += b; }
    friend laurent_poly operator-(laurent_poly a, const laurent_poly& b) { return a -= b; }

    friend laurent_poly operator*(const laurent_poly& a, const laurent_poly& b) {
        a.check_tag(b);
        laurent_poly r(a.tag);
        for (auto& [n, x] : a.c)
            for (auto& [m, y] : b.c) r.c[n + m] += x * y;
        return r.prune();
    }
    friend laurent_poly operator*(laurent_poly a, cxd s) {
        for (auto& [n, x] : a.c) x *= s;
        return a.prune();
    }
    friend laurent_poly operator*(cxd s, laurent_poly a) { return a * s; }

    // p(z * c): exponent-n coefficient picks c^n.
    laurent_poly scaled_argument(cxd s) const {
        laurent_poly r(tag);
        for (auto& [n, a] : c) r.c[n] = a * std::pow(s, n);
        return r.prune();
    }

    cxd eval(cxd var_value) const {
        cxd acc{0.0, 0.0};
        double lv = std::log(std::abs(var_value));
        for (auto& [n, a] : c) {
            if (std::abs(n * lv) > 690.0)
                throw eval_range_error("laurent_poly::eval: exponent overflow");
            acc += a * std::pow(var_value, n);
        }
        return acc;
    }

    void check_tag(const laurent_poly& o) const {
        if (tag != o.tag) throw contract_violation("laurent_poly: mixed variable tags");
    }
};

enum class truncate_mode { strictly_positive, non_negative };

// [.]_> and [.]_>= of Appendix B / section 3.
inline laurent_poly truncate(const laurent_poly& f, truncate_mode mode) {
    laurent_poly r(f.tag);
    for (auto& [n, a] : f.c) {
        if (mode == truncate_mode::strictly_positive ? n > 0 : n >= 0) r.c[n] = a;
    }
    return r;
}

enum class shift_mode { delta, Delta };

// f(zeta) = A(v) + zeta B(v) + zeta^2 C(v), v the tagged variable.  The
// quadratic slot exists for intermediates of the k=0 anti-difference; all
// public construction is degree <= 1 and the engine asserts that final
// results stay there.
struct log_laurent {
    laurent_poly A, B, C;

    log_laurent() = default;
    explicit log_laurent(var_tag t) : A(t), B(t), C(t) {}
    log_laurent(laurent_poly a) : A(std::move(a)), B(A.tag), C(A.tag) {}
    log_laurent(laurent_poly a, laurent_poly b) : A(std::move(a)), B(std::move(b)), C(A.tag) {
        A.check_tag(B);
    }

    var_tag tag() const { return A.tag; }
    bool zeta_free() const { return B.empty() && C.empty(); }
    bool zeta_linear() const { return C.empty(); }

    log_laurent& operator+=(const log_laurent& o) {
        A += o.A;
        B += o.B;
        C += o.C;
        return *this;
    }
    log_laurent& operator-=(const log_laurent& o) {
        A -= o.A;
        B -= o.B;
        C -= o.C;
        return *this;
    }
    friend log_laurent operator+(log_laurent a, const log_laurent& b) { return a += b; }
    friend log_laurent operator-(log_laurent a, const log_laurent& b) { return a -= b; }
    friend log_laurent operator*(const log_laurent& a, cxd s) {
        log_laurent r = a;
        r.A = r.A * s;
        r.B = r.B * s;
        r.C = r.C * s;
        return r;
    }

    // Multiplication by a plain Laurent polynomial.
    friend log_laurent operator*(const log_laurent& a, const laurent_poly& p) {
        log_laurent r(a.tag());
        r.A = a.A * p;
        r.B = a.B * p;
        r.C = a.C * p;
        return r;
    }
};

// Phase angle theta per unit exponent under zeta -> zeta + i xi.
// z-variables: z -> z e^{2 i xi}; Z-variables: Z -> Z e^{2 pi i xi / gamma}.
inline double shift_angle(var_tag tag, double xi, double gamma) {
    const double pi = 3.14159265358979323846;
    return tag == var_tag::z_var ? 2.0 * xi : 2.0 * pi * xi / gamma;
}

// f(zeta + i xi) as a log_laurent.
inline log_laurent translated(const log_laurent& f, double xi, double gamma) {
    double th = shift_angle(f.tag(), xi, gamma);
    auto phased = [&](const laurent_poly& p) {
        laurent_poly r(p.tag);
        for (auto& [n, a] : p.c) r.c[n] = a * std::polar(1.0, n * th);
        return r;
    };
    laurent_poly a = phased(f.A), b = phased(f.B), cc = phased(f.C);
    // (zeta + i xi)^2 = zeta^2 + 2 i xi zeta - xi^2
    cxd ix(0.0, xi);
    log_laurent r(f.tag());
    r.A = a + b * ix + cc * (ix * ix);
    r.B = b + cc * (2.0 * ix);
    r.C = cc;
    return r;
}

// delta_xi f = f(zeta+i xi) - f(zeta); Delta_xi f = f(zeta+i xi) - f(zeta-i xi).
inline log_laurent shift(const log_laurent& f, double xi, shift_mode mode, double gamma) {
    log_laurent up = translated(f, xi, gamma);
    if (mode == shift_mode::delta) return up - f;
    return up - translated(f, -xi, gamma);
}

struct anti_shift_options {
    // Public contract: any exponent-0 content is rejected.  The Appendix-B
    // engine inverts plain constants to zeta and zeta-linear constants to
    // zeta^2 instead.
    bool strict = true;
    double resonance_tolerance = 1e-12;
};

// Delta_xi^{-1}: per-monomial cascade.  Branch convention is fixed once
// and for all: the additive kernel constant is zero in every sector.
inline log_laurent anti_shift(const log_laurent& f, double xi, double gamma,
                              anti_shift_options opts = {}) {
    double th = shift_angle(f.tag(), xi, gamma);
    log_laurent r(f.tag());
    std::map<int, std::array<cxd, 3>> tgt; // n -> (c, b, a): c + b zeta + a zeta^2
    for (auto& [n, v] : f.A.c) tgt[n][0] += v;
    for (auto& [n, v] : f.B.c) tgt[n][1] += v;
    for (auto& [n, v] : f.C.c) tgt[n][2] += v;

    const cxd ixi(0.0, xi);
    for (auto& [n, abc] : tgt) {
        cxd cc = abc[0], b = abc[1], a = abc[2];
        if (n == 0) {
            if (opts.strict)
                throw not_invertible_error("anti_shift: constant term present");
            if (std::abs(a) > 0.0)
                throw not_invertible_error("anti_shift: zeta^2 z^0 target not representable");
            // Delta_xi(A zeta^2 + B zeta) = 4 i xi A zeta + 2 i xi B
            cxd A2 = b / (4.0 * ixi);
            cxd B1 = cc / (2.0 * ixi);
            if (A2 != cxd(0.0, 0.0)) r.C.c[0] += A2;
            if (B1 != cxd(0.0, 0.0)) r.B.c[0] += B1;
            continue;
        }
        double s = std::sin(n * th);
        if (std::abs(s) <= opts.resonance_tolerance)
            throw resonance_error(n, "anti_shift: resonant exponent " + std::to_string(n));
        cxd E = std::polar(1.0, n * th);
        cxd D = E - 1.0 / E; // 2 i sin(n theta)
        cxd S = E + 1.0 / E;
        cxd A2 = a / D;
        cxd B1 = (b - 2.0 * ixi * S * A2) / D;
        cxd C0 = (cc + A2 * xi * xi * D - ixi * S * B1) / D;
        if (A2 != cxd(0.0, 0.0)) r.C.c[n] += A2;
        if (B1 != cxd(0.0, 0.0)) r.B.c[n] += B1;
        if (C0 != cxd(0.0, 0.0)) r.A.c[n] += C0;
    }
    r.A.prune();
    r.B.prune();
    r.C.prune();
    return r;
}

// Numeric evaluation.  zeta is mapped to the tagged variable; gamma is
// needed for Z-variables.
inline cxd var_value(var_tag tag, cxd zeta, double gamma) {
    const double pi = 3.14159265358979323846;
    cxd ex = tag == var_tag::z_var ? 2.0 * zeta : 2.0 * pi * zeta / gamma;
    if (std::abs(ex.real()) > 690.0) throw eval_range_error("var_value: exponent overflow");
    return std::exp(ex);
}

inline cxd eval_at(const log_laurent& f, cxd zeta, double gamma) {
    cxd v = var_value(f.tag(), zeta, gamma);
    cxd acc = f.A.eval(v);
    if (!f.B.empty()) acc += zeta * f.B.eval(v);
    if (!f.C.empty()) acc += zeta * zeta * f.C.eval(v);
    return acc;
}

} // namespace qjac
