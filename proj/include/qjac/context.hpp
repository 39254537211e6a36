#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "qjac/errors.hpp"
#include "qjac/scaled_complex.hpp"

namespace qjac {

inline constexpr double pi_const = 3.14159265358979323846;

// Coupling context.  gamma -> pi^2/gamma is an involution exchanging the
// two Baxter equations; both directions share one resonance guard because
// every Delta^{-1} denominator downstream is sin(2 n gamma) or its dual.
struct gamma_context {
    double gamma;
    cxd q;
    double gamma_dual;
    cxd q_dual;
    double resonance_tolerance;
    int resonance_order;

    explicit gamma_context(double g, double tol = 1e-3, int order = 8)
        : gamma(g),
          q(std::polar(1.0, g)),
          gamma_dual(pi_const * pi_const / g),
          q_dual(std::polar(1.0, pi_const * pi_const / g)),
          resonance_tolerance(tol),
          resonance_order(order) {
        if (!(g > 0.0)) throw contract_violation("gamma_context: gamma must be positive");
        for (int n = 1; n <= order; ++n) {
            if (std::abs(std::sin(2.0 * n * gamma)) <= tol)
                throw resonance_error(n, "gamma_context: sin(2n gamma) resonant at n=" +
                                             std::to_string(n));
            if (std::abs(std::sin(2.0 * n * gamma_dual)) <= tol)
                throw resonance_error(n, "gamma_context: dual resonance at n=" +
                                             std::to_string(n));
        }
    }

    gamma_context dual() const {
        return gamma_context(gamma_dual, resonance_tolerance, resonance_order);
    }
};

// Contour and truncation for the dilogarithm integral.
struct dilog_config {
    double contour_offset = 0.0; // delta: integration along Im k = delta
    double truncation = 0.0;     // K: |Re k| <= K
    int node_count = 0;

    static dilog_config standard(const gamma_context& ctx) {
        dilog_config c;
        double cap = std::min(1.0, pi_const / ctx.gamma) / 2.0;
        c.contour_offset = 0.5 * cap;
        // integrand tail ~ exp(-(gamma+pi)|x|)/|x|: pick K so the tail is
        // far below double precision even with |Im phi| near the strip edge.
        c.truncation = 42.0 / (ctx.gamma + pi_const) + 8.0;
        c.node_count = 600;
        return c;
    }

    void validate(const gamma_context& ctx) const {
        double cap = std::min(1.0, pi_const / ctx.gamma) / 2.0;
        if (!(contour_offset > 0.0 && contour_offset < cap))
            throw contract_violation("dilog_config: contour offset outside (0, min(1,pi/gamma)/2)");
    }
};

} // namespace qjac
