#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"
#include "qjac/laurent.hpp"
#include "qjac/scaled_complex.hpp"
#include "qjac/trace.hpp"

namespace qjac {

// ---------------------------------------------------------------------------
// Baxter eigenvalue Q(zeta) = prod_n (1 - z/z_n)(1 - Z/Z_n) over one shared
// family of real zeros, z = e^{2 zeta}, Z = e^{2 pi zeta/gamma}.  The first
// factor is invisible to i pi shifts and carries the gamma equation, the
// second is invisible to i gamma shifts and carries the dual equation; the
// shared zeros couple the two quantizations.  A frozen tail continues the
// zero density; past the seam the fitted asymptotic form takes over.
// ---------------------------------------------------------------------------
struct q_function {
    double gamma = 0.0;
    int g = 1;
    std::vector<double> zeros;     // solved zeros, ascending
    int tail_count = 0;            // density-extension zeros
    double amp_z = 0.0, phase_z = 0.0; // asymptotics of the z factor
    double amp_Z = 0.0, phase_Z = 0.0; // asymptotics of the Z factor
    double seam = 1e300;
    double asy_fit_residual = 1.0;

    // consecutive zeros of the asymptotic cosine: zeta^2 spacing gamma pi/(g+1)
    double zero_sq_spacing() const { return gamma * pi_const / (g + 1); }

    std::vector<double> extended_zeros() const {
        std::vector<double> zs = zeros;
        if (!zs.empty()) {
            double last_sq = zs.back() * zs.back();
            for (int j = 1; j <= tail_count; ++j)
                zs.push_back(std::sqrt(last_sq + zero_sq_spacing() * j));
        }
        return zs;
    }

    // one factor: prod (1 - e^{rate (zeta - zeta_n)}); factors far past
    // their zero are folded into the scale exponent directly
    scaled_c factor_scaled(cxd zeta, double rate) const {
        ensure_cache();
        scaled_c acc = scaled_c::from(cxd(1.0, 0.0));
        int k = 0;
        for (double zn : cache_) {
            cxd e = rate * (zeta - zn);
            if (e.real() > 40.0) {
                acc.m *= -std::polar(1.0, std::fmod(e.imag(), 2.0 * pi_const));
                acc.e += e.real();
            } else {
                acc.m *= cxd(1.0, 0.0) - std::exp(e);
            }
            if (((++k) & 7) == 0) acc.normalize();
        }
        acc.normalize();
        return acc;
    }

    scaled_c eval_z_factor(cxd zeta) const { return factor_scaled(zeta, 2.0); }
    scaled_c eval_Z_factor(cxd zeta) const {
        return factor_scaled(zeta, 2.0 * pi_const / gamma);
    }

    scaled_c eval_scaled(cxd zeta) const {
        if (zeta.real() > seam && amp_z != 0.0) return asy_branch(zeta);
        return eval_z_factor(zeta) * eval_Z_factor(zeta);
    }

    cxd eval(cxd zeta) const { return eval_scaled(zeta).value(); }

    // product of the two factor asymptotics:
    //   A_z e^{-(g+1) zeta}        cos((g+1) zeta^2/gamma + phi_z)
    // x A_Z e^{-(g+1)(pi/gamma) zeta} cos((g+1) zeta^2/gamma + phi_Z)
    scaled_c asy_branch(cxd zeta) const {
        auto one = [&](double amp, double phase, double lin_rate) {
            cxd w = static_cast<double>(g + 1) * zeta * zeta / gamma + cxd(phase, 0.0);
            cxd lin = -static_cast<double>(g + 1) * lin_rate * zeta;
            auto term = [&](double s) {
                double e = lin.real() - s * w.imag();
                double ph = lin.imag() + s * w.real();
                scaled_c t{0.5 * amp * std::polar(1.0, std::fmod(ph, 2.0 * pi_const)), e};
                t.normalize();
                return t;
            };
            return term(1.0) + term(-1.0);
        };
        return one(amp_z, phase_z, 1.0) * one(amp_Z, phase_Z, pi_const / gamma);
    }

    // zero-spacing consistency with the asymptotic density: last quartile
    // of stored zeros, max relative deviation of (g+1) d(zeta^2)/gamma from pi
    double tail_spacing_deviation() const {
        if (zeros.size() < 8) return 1.0;
        std::size_t from = zeros.size() - zeros.size() / 4;
        double worst = 0.0;
        for (std::size_t n = from; n + 1 < zeros.size(); ++n) {
            double d = (g + 1) * (zeros[n + 1] * zeros[n + 1] - zeros[n] * zeros[n]) / gamma;
            worst = std::max(worst, std::abs(d / pi_const - 1.0));
        }
        return worst;
    }

  private:
    void ensure_cache() const {
        if (cache_.size() != zeros.size() + static_cast<std::size_t>(tail_count))
            cache_ = extended_zeros();
    }
    mutable std::vector<double> cache_;
};

// callable Q pair handed to the pairing machinery
struct q_pair {
    std::function<scaled_c(cxd)> Q, Qp;
};

inline q_pair make_q_pair(const q_function& a, const q_function& b) {
    return {[a](cxd z) { return a.eval_scaled(z); }, [b](cxd z) { return b.eval_scaled(z); }};
}

// ---------------------------------------------------------------------------
// lattice Q: three-term recursion along an imaginary step, for identity
// testing with arbitrary seeds
// ---------------------------------------------------------------------------
struct lattice_q {
    cxd zeta0;
    double step_xi = 0.0; // gamma or pi
    std::vector<cxd> values;

    cxd zeta_at(int m) const { return zeta0 + cxd(0.0, step_xi * m); }
    cxd value(int m) const { return values.at(static_cast<std::size_t>(m)); }
    int size() const { return static_cast<int>(values.size()); }
};

// Forward recursion Q_{m+1} = (-1)^{g+1} t(var(zeta_m)) Q_m - Q_{m-1}.
// The variable (and the trace tag) decide whether this is the gamma-step
// equation in z or the pi-step dual in Z.
inline lattice_q lattice_extend(cxd seed0, cxd seed1, cxd zeta0, int n, const trace_data& t,
                                const gamma_context& ctx, double step_xi) {
    if (n < 2) throw contract_violation("lattice_extend: need n >= 2");
    lattice_q L;
    L.zeta0 = zeta0;
    L.step_xi = step_xi;
    L.values = {seed0, seed1};
    double eps = t.sign();
    for (int m = 1; m + 1 < n; ++m) {
        cxd var = var_value(t.tag, L.zeta_at(m), ctx.gamma);
        cxd next = eps * t.eval(var) * L.values.back() - L.values[L.values.size() - 2];
        if (!std::isfinite(std::abs(next)))
            throw eval_range_error("lattice_extend: overflow at step " + std::to_string(m));
        L.values.push_back(next);
    }
    return L;
}

} // namespace qjac
