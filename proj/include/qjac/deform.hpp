#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"
#include "qjac/laurent.hpp"
#include "qjac/qfunction.hpp"
#include "qjac/trace.hpp"

namespace qjac {

// ---------------------------------------------------------------------------
// One "side" of the deformed-differential machinery: the z-side shifts
// zeta by i gamma against the traces (t, t'); the Z-side is the same
// construction in the dual coupling pi^2/gamma with pi shifts and (T, T').
// ---------------------------------------------------------------------------
struct deform_side {
    int g;
    double eps; // (-1)^{g+1}
    var_tag tag;
    double xi;        // zeta-shift unit: gamma or pi
    double gamma_eff; // gamma or pi^2/gamma: sets the overall 1/(2i gamma) scale
    double gamma;     // physical coupling (variable maps need it)
    trace_data t, tp; // left/right traces of this side
    double res_tol = 1e-12;

    cxd q_eff() const { return std::polar(1.0, gamma_eff); }

    // overall scale of s_k/u/v; the -2 normalizes the classical limit of
    // z^{-1} s_k onto the mu_k numerators (up to a first-kind admixture)
    cxd prefactor() const { return -2.0 / (cxd(0.0, 2.0 * gamma_eff)); }
};

inline deform_side z_side(const gamma_context& ctx, const trace_data& t, const trace_data& tp) {
    if (t.tag != var_tag::z_var || tp.tag != var_tag::z_var)
        throw contract_violation("z_side: traces must be z-tagged");
    if (t.g != tp.g) throw contract_violation("z_side: genus mismatch");
    return {t.g, t.sign(), var_tag::z_var, ctx.gamma, ctx.gamma, ctx.gamma, t, tp,
            1e-12};
}

inline deform_side Z_side(const gamma_context& ctx, const trace_data& T, const trace_data& Tp) {
    if (T.tag != var_tag::Z_var || Tp.tag != var_tag::Z_var)
        throw contract_violation("Z_side: traces must be Z-tagged");
    if (T.g != Tp.g) throw contract_violation("Z_side: genus mismatch");
    return {T.g,       T.sign(), var_tag::Z_var, pi_const, ctx.gamma_dual, ctx.gamma, T, Tp,
            1e-12};
}

namespace detail {

inline log_laurent lift(const laurent_poly& p) { return log_laurent(p); }

inline anti_shift_options lax_opts(const deform_side& sd) {
    anti_shift_options o;
    o.strict = false;
    o.resonance_tolerance = sd.res_tol;
    return o;
}

// the seed function: z^{k-g-1} for k >= 1, zeta z^{-g-1} for k = 0
inline log_laurent seed_f(int k, const deform_side& sd) {
    if (k >= 1) return lift(laurent_poly::monomial(sd.tag, k - sd.g - 1, 1.0));
    if (k == 0)
        return log_laurent(laurent_poly(sd.tag),
                           laurent_poly::monomial(sd.tag, -sd.g - 1, 1.0));
    throw contract_violation("seed_f: k must be >= 0");
}

} // namespace detail

// Counterterm generator u[f]: polynomial (log-Laurent) part of the
// telescoping subtraction.  Exact for any f; zeta^2 intermediates cancel
// because both traces share the pinned constant term.
inline log_laurent u_func(const log_laurent& f, const deform_side& sd) {
    laurent_poly t = sd.t.poly(), tp = sd.tp.poly();
    auto lax = detail::lax_opts(sd);
    log_laurent A = anti_shift(f * t, sd.xi, sd.gamma, lax);
    log_laurent B = anti_shift(f * tp, sd.xi, sd.gamma, lax);
    log_laurent Am = translated(A, -sd.xi, sd.gamma);
    log_laurent Bm = translated(B, -sd.xi, sd.gamma);
    log_laurent fp = translated(f, sd.xi, sd.gamma);
    log_laurent fm = translated(f, -sd.xi, sd.gamma);
    log_laurent u = A * t + B * tp - Bm * t - Am * tp - (f * t) * tp + fp - fm;
    u.A.prune();
    u.B.prune();
    double scale = u.A.max_abs() + u.B.max_abs() + 1e-300;
    if (u.C.max_abs() > 1e-10 * scale)
        throw contract_violation("u_func: zeta^2 content failed to cancel");
    u.C = laurent_poly(u.A.tag); // drop cancellation dust
    return u * sd.prefactor();
}

// Deformed differential s_k.
//   k in [-g, 0]: z^{g+1+k}
//   k >= 1: assembled from truncated anti-differences of z^{k-g-1} t t'
// The trailing term is the truncated Delta_xi of the seed monomial (the
// printed source has a garbled exponent there; this reading is the one
// whose classical limit matches the exact-form numerators for k > g+1).
inline laurent_poly s_poly(int k, const deform_side& sd) {
    int g = sd.g;
    if (k < -g) throw contract_violation("s_poly: k < -g");
    if (k <= 0) return laurent_poly::monomial(sd.tag, g + 1 + k, 1.0);

    laurent_poly t = sd.t.poly(), tp = sd.tp.poly();
    laurent_poly f = laurent_poly::monomial(sd.tag, k - g - 1, 1.0);
    auto lax = detail::lax_opts(sd);
    auto tr = [&](const log_laurent& x) {
        log_laurent r = x;
        r.A = truncate(r.A, truncate_mode::strictly_positive);
        r.B = truncate(r.B, truncate_mode::strictly_positive);
        r.C = truncate(r.C, truncate_mode::strictly_positive);
        return r;
    };
    log_laurent ft = detail::lift(f * t), ftp = detail::lift(f * tp);
    log_laurent P1 = tr(ft), P2 = tr(ftp);
    log_laurent P3 = tr(translated(ftp, -sd.xi, sd.gamma));
    log_laurent P4 = tr(translated(ft, -sd.xi, sd.gamma));
    log_laurent acc = anti_shift(P1, sd.xi, sd.gamma, lax) * t +
                      anti_shift(P2, sd.xi, sd.gamma, lax) * tp -
                      anti_shift(P3, sd.xi, sd.gamma, lax) * t -
                      anti_shift(P4, sd.xi, sd.gamma, lax) * tp;
    acc -= (P1 * tp + P2 * t) * cxd(0.5, 0.0);
    acc += tr(shift(detail::lift(f), sd.xi, shift_mode::Delta, sd.gamma));
    acc = acc * sd.prefactor();
    acc.A.prune();
    if (acc.B.max_abs() + acc.C.max_abs() > 1e-10 * acc.A.max_abs())
        throw contract_violation("s_poly: unexpected zeta content");
    return acc.A;
}

// dual basis polynomial S_k(Z)
inline laurent_poly dual_S_poly(int k, const gamma_context& ctx, const trace_data& T,
                                const trace_data& Tp) {
    return s_poly(k, Z_side(ctx, T, Tp));
}

// s_k^-: the replacement integrand factor is sigma_k = -s_k^-.
//   k >= 1: -s_k + u[z^{k-g-1}]
//   k == 0: -s_0 + u[zeta z^{-g-1}]   (no extra constant; the printed
//            (-1)^{g+1} 2 breaks the lattice identity at k=0)
//   k <= -1: -z^{g+1+k}
inline log_laurent s_minus(int k, const deform_side& sd) {
    log_laurent s = detail::lift(s_poly(k, sd));
    if (k <= -1) return s * cxd(-1.0, 0.0);
    return u_func(detail::seed_f(k, sd), sd) - s;
}

// p_k as a pointwise evaluator against a Q Q' pair on this side's lattice
// direction: value = W_a(z) Q Q'_- + W_b(z) Q_- Q' + W_c Q_- Q'_- + W_d Q Q'.
struct p_evaluator {
    log_laurent W_a, W_b, W_c, W_d; // coefficients of QQ'_-, Q_-Q', Q_-Q'_-, QQ'
    double gamma = 0.0;
    double xi = 0.0;
    bool zero = true;

    cxd eval(cxd zeta, cxd Q, cxd Qm, cxd Qp, cxd Qpm) const {
        if (zero) return {0.0, 0.0};
        return eval_at(W_a, zeta, gamma) * Q * Qpm + eval_at(W_b, zeta, gamma) * Qm * Qp +
               eval_at(W_c, zeta, gamma) * Qm * Qpm + eval_at(W_d, zeta, gamma) * Q * Qp;
    }

    scaled_c eval_scaled(cxd zeta, scaled_c Q, scaled_c Qm, scaled_c Qp, scaled_c Qpm) const {
        if (zero) return scaled_c::zero();
        return Q * Qpm * eval_at(W_a, zeta, gamma) + Qm * Qp * eval_at(W_b, zeta, gamma) +
               Qm * Qpm * eval_at(W_c, zeta, gamma) + Q * Qp * eval_at(W_d, zeta, gamma);
    }
};

inline p_evaluator p_func(int k, const deform_side& sd) {
    p_evaluator ev;
    ev.gamma = sd.gamma;
    ev.xi = sd.xi;
    if (k <= -1) return ev;
    ev.zero = false;
    log_laurent f = detail::seed_f(k, sd);
    laurent_poly t = sd.t.poly(), tp = sd.tp.poly();
    auto lax = detail::lax_opts(sd);
    log_laurent A = anti_shift(f * t, sd.xi, sd.gamma, lax);
    log_laurent B = anti_shift(f * tp, sd.xi, sd.gamma, lax);
    log_laurent C = translated(A, -sd.xi, sd.gamma);
    log_laurent D = translated(B, -sd.xi, sd.gamma);
    cxd pe = sd.prefactor() * sd.eps;
    ev.W_a = (C - B) * pe;
    ev.W_b = (D - A) * pe;
    ev.W_c = f * sd.prefactor();
    ev.W_d = translated(f, -sd.xi, sd.gamma) * sd.prefactor();
    return ev;
}

// Max relative residual of
//   (s_k(z) + s_k^-(zeta)) Q(zeta) Q'(zeta) - [p_k(zeta+i xi) - p_k(zeta)]
// over the interior of a lattice pair generated by the matching recursion.
// This is an algebraic identity given only the recursions, so it holds at
// machine precision for arbitrary seeds.
inline double pk_identity_residual(int k, const deform_side& sd, const lattice_q& Q,
                                   const lattice_q& Qp) {
    if (Q.size() != Qp.size() || std::abs(Q.step_xi - sd.xi) > 1e-15 ||
        std::abs(Qp.step_xi - sd.xi) > 1e-15 || std::abs(Q.zeta0 - Qp.zeta0) > 1e-15)
        throw contract_violation("pk_identity_residual: mismatched lattices");
    laurent_poly sk = s_poly(k, sd);
    log_laurent sm = s_minus(k, sd);
    p_evaluator p = p_func(k, sd);
    double worst = 0.0;
    for (int m = 1; m + 2 < Q.size(); ++m) {
        cxd zeta = Q.zeta_at(m);
        cxd zeta_up = Q.zeta_at(m + 1);
        cxd v = var_value(sd.tag, zeta, sd.gamma);
        cxd lhs = (sk.eval(v) + eval_at(sm, zeta, sd.gamma)) * Q.value(m) * Qp.value(m);
        cxd p_here = p.eval(zeta, Q.value(m), Q.value(m - 1), Qp.value(m), Qp.value(m - 1));
        cxd p_up = p.eval(zeta_up, Q.value(m + 1), Q.value(m), Qp.value(m + 1), Qp.value(m));
        cxd rhs = p_up - p_here;
        double scale = std::abs(lhs) + std::abs(p_up) + std::abs(p_here) + 1e-30;
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

} // namespace qjac
