#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qjac/context.hpp"
#include "qjac/laurent.hpp"
#include "qjac/trace.hpp"

using namespace qjac;

namespace {

log_laurent random_constant_free(std::mt19937& rng, var_tag tag) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    log_laurent f(tag);
    for (int n = -4; n <= 4; ++n) {
        if (n == 0) continue;
        f.A.c[n] = cxd(U(rng), U(rng));
        if (n % 2 == 0) f.B.c[n] = cxd(U(rng), U(rng));
    }
    return f;
}

double rel_diff(const log_laurent& a, const log_laurent& b) {
    double num = 0.0, den = 1e-300;
    auto acc = [&](const laurent_poly& x, const laurent_poly& y) {
        for (auto& [n, v] : x.c) {
            num = std::max(num, std::abs(v - y.coeff(n)));
            den = std::max(den, std::abs(v));
        }
        for (auto& [n, v] : y.c) {
            num = std::max(num, std::abs(v - x.coeff(n)));
            den = std::max(den, std::abs(v));
        }
    };
    acc(a.A, b.A);
    acc(a.B, b.B);
    acc(a.C, b.C);
    return num / den;
}

} // namespace

TEST_CASE("Delta_gamma on monomials") {
    double gamma = 0.7;
    cxd q = std::polar(1.0, gamma);

    log_laurent z{laurent_poly::monomial(var_tag::z_var, 1, 1.0)};
    auto dz = shift(z, gamma, shift_mode::Delta, gamma);
    REQUIRE(dz.B.empty());
    REQUIRE(std::abs(dz.A.coeff(1) - (q * q - 1.0 / (q * q))) < 1e-15);

    // delta_xi of a constant vanishes
    log_laurent one{laurent_poly::monomial(var_tag::z_var, 0, 1.0)};
    auto d1 = shift(one, 0.33, shift_mode::delta, gamma);
    REQUIRE(d1.A.empty());
    REQUIRE(d1.B.empty());

    // Delta_gamma(zeta z) = zeta z (q^2 - q^-2) + i gamma z (q^2 + q^-2)
    log_laurent zz(laurent_poly(var_tag::z_var), laurent_poly::monomial(var_tag::z_var, 1, 1.0));
    auto dzz = shift(zz, gamma, shift_mode::Delta, gamma);
    cxd ig(0.0, gamma);
    REQUIRE(std::abs(dzz.B.coeff(1) - (q * q - 1.0 / (q * q))) < 1e-15);
    REQUIRE(std::abs(dzz.A.coeff(1) - ig * (q * q + 1.0 / (q * q))) < 1e-15);
}

TEST_CASE("anti_shift inverts Delta") {
    double gamma = 0.7;
    cxd q = std::polar(1.0, gamma);

    log_laurent z{laurent_poly::monomial(var_tag::z_var, 1, 1.0)};
    auto az = anti_shift(z, gamma, gamma);
    REQUIRE(std::abs(az.A.coeff(1) - 1.0 / (q * q - 1.0 / (q * q))) < 1e-15);

    std::mt19937 rng(12345);
    for (int rep = 0; rep < 20; ++rep) {
        // z-polynomials take gamma shifts, Z-polynomials pi shifts (a
        // gamma shift leaves Z itself invariant and is fully resonant).
        var_tag tag = rep % 2 ? var_tag::z_var : var_tag::Z_var;
        double xi = tag == var_tag::z_var ? gamma : pi_const;
        auto f = random_constant_free(rng, tag);
        auto g = anti_shift(f, xi, gamma);
        auto back = shift(g, xi, shift_mode::Delta, gamma);
        REQUIRE(rel_diff(back, f) < 1e-13);
    }

    log_laurent c{laurent_poly::monomial(var_tag::z_var, 0, 2.0)};
    REQUIRE_THROWS_AS(anti_shift(c, gamma, gamma), not_invertible_error);

    // engine mode: constants invert to zeta, and back
    anti_shift_options lax;
    lax.strict = false;
    auto ac = anti_shift(c, gamma, gamma, lax);
    REQUIRE(std::abs(ac.B.coeff(0) - 2.0 / cxd(0.0, 2.0 * gamma)) < 1e-15);
    auto rc = shift(ac, gamma, shift_mode::Delta, gamma);
    REQUIRE(rel_diff(rc, c) < 1e-14);

    // resonant gamma is rejected with the offending order named
    try {
        gamma_context bad(pi_const / 4.0);
        (void)bad;
        FAIL("resonance guard should have fired");
    } catch (const resonance_error& e) {
        REQUIRE(e.exponent >= 1);
    }
}

TEST_CASE("truncations") {
    laurent_poly f(var_tag::z_var);
    f.c[-1] = 1.0;
    f.c[0] = 1.0;
    f.c[1] = 1.0;
    auto gt = truncate(f, truncate_mode::strictly_positive);
    REQUIRE(gt.c.size() == 1);
    REQUIRE(std::abs(gt.coeff(1) - 1.0) < 1e-15);
    auto ge = truncate(f, truncate_mode::non_negative);
    REQUIRE(ge.c.size() == 2);

    // projection property
    auto gtt = truncate(gt, truncate_mode::strictly_positive);
    REQUIRE(gtt.c == gt.c);

    // [z^{k-g-1} t]_> for g=1, k=1, t = z^2-5z+2 is exactly z
    trace_data t(1, {cxd(-5.0, 0.0)});
    laurent_poly zm1 = laurent_poly::monomial(var_tag::z_var, -1, 1.0);
    auto br = truncate(zm1 * t.poly(), truncate_mode::strictly_positive);
    REQUIRE(br.c.size() == 1);
    REQUIRE(std::abs(br.coeff(1) - 1.0) < 1e-15);
}

TEST_CASE("evaluation and variable tags") {
    double gamma = 0.7;
    log_laurent z{laurent_poly::monomial(var_tag::z_var, 1, 1.0)};
    REQUIRE(std::abs(eval_at(z, cxd(0.0, 0.0), gamma) - 1.0) < 1e-15);

    log_laurent zz(laurent_poly(var_tag::z_var), laurent_poly::monomial(var_tag::z_var, 1, 1.0));
    cxd ipi(0.0, pi_const);
    REQUIRE(std::abs(eval_at(zz, ipi, gamma) - ipi) < 1e-13);

    log_laurent Z{laurent_poly::monomial(var_tag::Z_var, 1, 1.0)};
    cxd expect = std::exp(cxd(0.0, 2.0 * pi_const * pi_const / gamma));
    REQUIRE(std::abs(eval_at(Z, ipi, gamma) - expect) < 1e-13);

    gamma_context ctx(gamma);
    REQUIRE(std::abs(expect - ctx.q_dual * ctx.q_dual) < 1e-13);

    log_laurent big{laurent_poly::monomial(var_tag::z_var, 6, 1.0)};
    REQUIRE_THROWS_AS(eval_at(big, cxd(80.0, 0.0), gamma), eval_range_error);
}

TEST_CASE("shift commutes with fixed z-power times phase") {
    double gamma = 0.9;
    std::mt19937 rng(777);
    auto f = random_constant_free(rng, var_tag::z_var);
    int m = 3;
    laurent_poly zm = laurent_poly::monomial(var_tag::z_var, m, 1.0);
    double xi = 0.37;
    auto lhs = shift(f * zm, xi, shift_mode::Delta, gamma);
    // Delta_xi(z^m f) = z^m [e^{im theta} f(.+i xi) - e^{-im theta} f(.-i xi)]
    cxd ph = std::polar(1.0, m * shift_angle(var_tag::z_var, xi, gamma));
    auto rhs = (translated(f, xi, gamma) * ph - translated(f, -xi, gamma) * (1.0 / ph)) * zm;
    REQUIRE(rel_diff(lhs, rhs) < 1e-13);
}

TEST_CASE("trace polynomial pins t_{g+1}") {
    trace_data t(1, {cxd(-5.0, 0.0)});
    REQUIRE(std::abs(t.coeff(2) - cxd(2.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(t.eval(cxd(1.0, 0.0)) - cxd(-2.0, 0.0)) < 1e-15);
    trace_data t2(2, {cxd(1.0, 0.0), cxd(2.0, 0.0)});
    REQUIRE(std::abs(t2.coeff(3) - cxd(-2.0, 0.0)) < 1e-15);
    REQUIRE_THROWS_AS(trace_data(0, {}), contract_violation);
}
