#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"

namespace qjac {

struct phi_result {
    cxd value;
    double err_estimate;
};

// Non-compact quantum dilogarithm
//   Phi(phi) = exp( int_{Im k = delta} e^{ik phi} / (4 sinh(gamma k) sinh(pi k)) dk/k ),
// evaluated by sinh-mapped trapezoid quadrature along the straight line
// Im k = delta (the third-order pole at k = 0 is passed above).  Outside
// the strip |Im phi| < pi + gamma the gamma-shift equation is applied
// first, then the pi-shift one, recursively.
class dilog_evaluator {
  public:
    dilog_evaluator(const gamma_context& ctx, dilog_config cfg)
        : ctx_(ctx), cfg_(cfg) {
        cfg_.validate(ctx);
    }

    explicit dilog_evaluator(const gamma_context& ctx)
        : dilog_evaluator(ctx, dilog_config::standard(ctx)) {}

    const gamma_context& context() const { return ctx_; }

    phi_result eval_with_error(cxd phi) const {
        double strip = pi_const + ctx_.gamma;
        // Continuation: gamma-shift equation first, then the pi-shift one
        // when a single pi step makes more progress, applied recursively
        // until the argument sits comfortably inside the strip.
        if (std::abs(phi.imag()) > 0.9 * strip) {
            double excess = std::abs(phi.imag()) - 0.9 * strip;
            bool use_pi = excess > 2.0 * pi_const;
            double step = use_pi ? 2.0 * pi_const : 2.0 * ctx_.gamma;
            double exp_scale = use_pi ? pi_const / ctx_.gamma : 1.0;
            double half = 0.5 * step;
            if (phi.imag() > 0.0) {
                phi_result inner = eval_with_error(phi - cxd(0.0, step));
                cxd den = 1.0 + std::exp(exp_scale * (phi - cxd(0.0, half)));
                return {inner.value / den, inner.err_estimate};
            }
            phi_result inner = eval_with_error(phi + cxd(0.0, step));
            cxd num = 1.0 + std::exp(exp_scale * (phi + cxd(0.0, half)));
            return {inner.value * num, inner.err_estimate};
        }

        cxd i1 = log_phi_quad(phi, cfg_.node_count);
        cxd i2 = log_phi_quad(phi, (3 * cfg_.node_count) / 2);
        double err = std::abs(i2 - i1);
        return {std::exp(i2), err};
    }

    cxd eval(cxd phi, double requested_precision = 1e-10) const {
        phi_result r = eval_with_error(phi);
        if (r.err_estimate > requested_precision)
            throw precision_loss_error(r.err_estimate, "phi_eval: quadrature not converged");
        return r.value;
    }

    // lambda(zeta | psi) = e^{-zeta psi / (2 i gamma)} Phi(psi - zeta)
    //                      e^{(pi+gamma)/gamma (psi - zeta)}
    cxd lambda(cxd zeta, cxd psi) const {
        const cxd i(0.0, 1.0);
        cxd g(ctx_.gamma, 0.0);
        cxd pref = std::exp(-zeta * psi / (2.0 * i * g));
        cxd tail = std::exp(((pi_const + ctx_.gamma) / ctx_.gamma) * (psi - zeta));
        return pref * eval(psi - zeta) * tail;
    }

    // <phi|psi> = e^{(2 phi psi - phi^2)/(4 i gamma)}
    cxd bra_ket(cxd phi, cxd psi) const {
        const cxd i(0.0, 1.0);
        return std::exp((2.0 * phi * psi - phi * phi) / (4.0 * i * ctx_.gamma));
    }

    // Q-operator kernel on 2g+2 sites, psi_0 == psi_{2g+2}.
    cxd qkernel(const std::vector<cxd>& phi, cxd zeta, const std::vector<cxd>& psi) const {
        if (phi.size() != psi.size() || phi.empty() || phi.size() % 2 != 0)
            throw contract_violation("qkernel: need equal-length lists of 2g+2 sites");
        const cxd i(0.0, 1.0);
        cxd pref = std::exp(0.5 * (1.0 + pi_const / ctx_.gamma) * zeta +
                            zeta * zeta / (4.0 * i * ctx_.gamma));
        cxd acc = pref;
        std::size_t n = phi.size();
        for (std::size_t k = 0; k < n; ++k) {
            const cxd& prev_psi = psi[(k + n - 1) % n];
            acc *= lambda(zeta, phi[k] - psi[k]) * bra_ket(phi[k], prev_psi);
        }
        return acc;
    }

  private:
    // log Phi by quadrature: k = x + i delta, x = K tanh(sinh(u)) would
    // over-compress; plain x = sinh(u) already gives double-exponential
    // tail decay against the e^{-(gamma+pi)|x|} integrand envelope.
    cxd log_phi_quad(cxd phi, int n) const {
        double strip_room = pi_const + ctx_.gamma - std::abs(phi.imag());
        if (strip_room < 0.05 * (pi_const + ctx_.gamma))
            strip_room = 0.05 * (pi_const + ctx_.gamma);
        double K = 42.0 / strip_room + 8.0;
        double U = std::asinh(K);
        // Resolve the e^{i k Re(phi)} oscillation everywhere the envelope
        // is non-negligible.
        int n_osc = static_cast<int>(std::ceil(K * (std::abs(phi.real()) + 6.0)));
        int N = std::max(n, n_osc);
        double h = 2.0 * U / N;
        const cxd idelta(0.0, cfg_.contour_offset);
        cxd acc{0.0, 0.0};
        for (int j = 0; j <= N; ++j) {
            double u = -U + j * h;
            double x = std::sinh(u);
            double jac = std::cosh(u);
            cxd k = cxd(x, 0.0) + idelta;
            cxd val = std::exp(-cxd(0.0, 1.0) * k * phi) /
                      (4.0 * std::sinh(ctx_.gamma * k) * std::sinh(pi_const * k) * k);
            double wt = (j == 0 || j == N) ? 0.5 : 1.0;
            acc += wt * val * jac;
        }
        return acc * h;
    }

    gamma_context ctx_;
    dilog_config cfg_;
};

} // namespace qjac
