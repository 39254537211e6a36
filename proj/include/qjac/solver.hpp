#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"
#include "qjac/qfunction.hpp"
#include "qjac/trace.hpp"

namespace qjac {

struct residual_summary {
    double baxter_res = 1.0;
    double dual_res = 1.0;
    double asym_res = 1.0;
    double realness_res = 1.0;
};

struct spectral_point {
    double gamma = 0.0;
    int g = 1;
    std::string state_label = "ground";
    trace_data t;  // z-tagged
    trace_data T;  // Z-tagged dual
    q_function Q;
    residual_summary residuals;
    double t_spread = 0.0, T_spread = 0.0; // trace-extraction consistency
};

struct solve_options {
    int zero_count = 150;      // solved zeros
    int tail_count = 600;      // frozen density-extension zeros
    int max_iterations = 200;
    double tolerance = 1e-10;  // max Bethe phase defect (radians)
    int extra_low_zeros = 0;   // 0 = ground state
};

struct solve_outcome {
    bool converged = false;
    double bethe_residual = 1.0;
    int iterations = 0;
    spectral_point point;
};

// WKB zero seeds from the asymptotic cosine phase; extra_low squeezes
// additional zeros into the low region (excited-state exploration).
inline std::vector<double> wkb_zero_seeds(int g, double gamma, int count, int extra_low) {
    std::vector<double> zs;
    for (int m = 0; m < extra_low; ++m) zs.push_back(0.25 + 0.3 * m);
    for (int n = 1; n <= count - extra_low; ++n)
        zs.push_back(std::sqrt(gamma * pi_const * (n - 0.25) / (g + 1)));
    std::sort(zs.begin(), zs.end());
    return zs;
}

// Fit per-factor asymptotic amplitude/phase on a window inside the solved
// range: factor = e^L (P cos w + R sin w) is linear in (P, R).
inline void fit_asy_tail(q_function& qf) {
    if (qf.zeros.size() < 24) return;
    double zN = qf.zeros.back();
    double lo = 0.55 * zN, hi = 0.85 * zN;
    int g = qf.g;
    double gamma = qf.gamma;
    double total_rms = 0.0;
    for (int side = 0; side < 2; ++side) {
        double lin_rate = side == 0 ? 1.0 : pi_const / gamma;
        Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        std::vector<std::pair<double, double>> samples; // (w, y)
        for (std::size_t n = 0; n + 1 < qf.zeros.size(); ++n) {
            double mid = 0.5 * (qf.zeros[n] + qf.zeros[n + 1]);
            if (mid < lo || mid > hi) continue;
            scaled_c v = side == 0 ? qf.eval_z_factor(cxd(mid, 0.0))
                                   : qf.eval_Z_factor(cxd(mid, 0.0));
            double L = -(g + 1) * lin_rate * mid;
            double w = (g + 1) * mid * mid / gamma;
            double y = v.m.real() * std::exp(v.e - L);
            samples.emplace_back(w, y);
            Eigen::Vector2d row(std::cos(w), std::sin(w));
            M += row * row.transpose();
            rhs += row * y;
        }
        if (samples.size() < 6) return;
        Eigen::Vector2d pr = M.ldlt().solve(rhs);
        double rms = 0.0, scale = 0.0;
        for (auto& [w, y] : samples) {
            double fit = pr(0) * std::cos(w) + pr(1) * std::sin(w);
            rms += (y - fit) * (y - fit);
            scale += y * y;
        }
        total_rms = std::max(total_rms, std::sqrt(rms / (scale + 1e-300)));
        double amp = std::hypot(pr(0), pr(1));
        double phase = std::atan2(-pr(1), pr(0));
        if (side == 0) {
            qf.amp_z = amp;
            qf.phase_z = phase;
        } else {
            qf.amp_Z = amp;
            qf.phase_Z = phase;
        }
    }
    qf.asy_fit_residual = total_rms;
    qf.seam = std::min(0.9 * zN, zN - 4.0);
}

// Read the trace polynomials off a Q function through the difference
// equations at probe points below the first zero; the least-squares
// residual across probes is the consistency diagnostic.
inline void extract_traces(spectral_point& pt) {
    int g = pt.g;
    double gamma = pt.gamma;
    double eps = (g % 2 == 0) ? -1.0 : 1.0;
    const cxd ig(0.0, gamma), ip(0.0, pi_const);

    auto probe_fit = [&](bool dual) {
        std::vector<double> probes;
        double top = pt.Q.zeros.empty() ? 1.0 : 0.85 * pt.Q.zeros.front();
        for (int i = 0; i < g + 3; ++i) probes.push_back(top - 0.13 * i);
        cxd ixi = dual ? ip : ig;
        Eigen::MatrixXcd A(static_cast<int>(probes.size()), g);
        Eigen::VectorXcd b(static_cast<int>(probes.size()));
        for (std::size_t i = 0; i < probes.size(); ++i) {
            cxd zeta(probes[i], 0.0);
            scaled_c up = pt.Q.eval_scaled(zeta + ixi);
            scaled_c dn = pt.Q.eval_scaled(zeta - ixi);
            scaled_c at = pt.Q.eval_scaled(zeta);
            cxd tau = eps * ((up + dn) / at).value();
            cxd var = dual ? std::exp(2.0 * pi_const * zeta / gamma) : std::exp(2.0 * zeta);
            cxd rem = tau - std::pow(var, g + 1) - eps * 2.0;
            for (int j = 1; j <= g; ++j) A(static_cast<int>(i), j - 1) = std::pow(var, g + 1 - j);
            b(static_cast<int>(i)) = rem;
        }
        Eigen::VectorXcd coef = A.colPivHouseholderQr().solve(b);
        double spread = (A * coef - b).norm() / (b.norm() + 1e-300);
        return std::make_pair(coef, spread);
    };

    auto [tc, ts] = probe_fit(false);
    auto [Tc, Ts] = probe_fit(true);
    std::vector<cxd> ti(static_cast<std::size_t>(g)), Ti(static_cast<std::size_t>(g));
    for (int j = 0; j < g; ++j) {
        ti[static_cast<std::size_t>(j)] = tc(j);
        Ti[static_cast<std::size_t>(j)] = Tc(j);
    }
    pt.t = trace_data(g, ti, var_tag::z_var);
    pt.T = trace_data(g, Ti, var_tag::Z_var);
    pt.t_spread = ts;
    pt.T_spread = Ts;
}

// Damped Levenberg-Marquardt on the factorized Bethe system.  With the
// shared-zero representation Q = Q_z Q_Z the gamma equation constrains
// the z factor and the dual equation the Z factor:
//   Im log Q_z(zeta_j + i gamma) = pi/2 + m_j pi
//   Im log Q_Z(zeta_j + i pi)    = pi/2 + m'_j pi
// with integer modes frozen at the seed configuration.
inline solve_outcome solve_spectrum(int g, const gamma_context& ctx, solve_options opts = {}) {
    const double gamma = ctx.gamma;
    const double dsq = gamma * pi_const / (g + 1);
    std::vector<double> zeros = wkb_zero_seeds(g, gamma, opts.zero_count, opts.extra_low_zeros);
    const std::size_t N = zeros.size();

    auto count_low = [&](const std::vector<double>& zs) {
        double ref = std::sqrt(gamma * pi_const * 0.75 / (g + 1)) * 0.9;
        return static_cast<int>(
            std::count_if(zs.begin(), zs.end(), [&](double x) { return x < ref; }));
    };
    const int label0 = count_low(zeros);

    auto extend = [&](const std::vector<double>& zs) {
        std::vector<double> all = zs;
        double last_sq = zs.back() * zs.back();
        for (int j = 1; j <= opts.tail_count; ++j)
            all.push_back(std::sqrt(last_sq + dsq * j));
        return all;
    };

    Eigen::VectorXd r(2 * static_cast<int>(N));
    Eigen::MatrixXd J(2 * static_cast<int>(N), static_cast<int>(N));
    std::vector<int> modes(2 * N, 0);

    auto fill = [&](const std::vector<double>& zs, Eigen::VectorXd& rr, Eigen::MatrixXd* jac,
                    bool set_modes) {
        std::vector<double> all = extend(zs);
        for (int half = 0; half < 2; ++half) {
            double rate = half == 0 ? 2.0 : 2.0 * pi_const / gamma;
            double xi = half == 0 ? gamma : pi_const;
            double ph0 = rate * xi; // Im of rate*(zeta_j + i xi - zeta_n)
            for (std::size_t j = 0; j < N; ++j) {
                int row = static_cast<int>(j + half * N);
                double th = 0.0;
                cxd dsum{0.0, 0.0};
                for (std::size_t n = 0; n < all.size(); ++n) {
                    cxd e(rate * (zs[j] - all[n]), ph0);
                    if (e.real() > 40.0) {
                        th += std::remainder(pi_const + e.imag(), 2.0 * pi_const);
                        if (jac) {
                            dsum += cxd(rate, 0.0);
                            if (n < N) (*jac)(row, static_cast<int>(n)) = 0.0;
                        }
                        continue;
                    }
                    cxd w = std::exp(e);
                    cxd f = cxd(1.0, 0.0) - w;
                    th += std::arg(f);
                    if (jac) {
                        cxd d = rate * w / f; // -d log f/d zeta_n; Im is the phase slope
                        dsum += d;
                        if (n < N) (*jac)(row, static_cast<int>(n)) = d.imag();
                    }
                }
                if (jac) (*jac)(row, static_cast<int>(j)) -= dsum.imag();
                if (set_modes)
                    modes[static_cast<std::size_t>(row)] =
                        static_cast<int>(std::lround((th - 0.5 * pi_const) / pi_const));
                rr(row) =
                    th - 0.5 * pi_const - pi_const * modes[static_cast<std::size_t>(row)];
            }
        }
    };

    double lambda = 1e-4;
    int it = 0;
    bool converged = false;
    bool first = true;
    for (it = 0; it < opts.max_iterations; ++it) {
        fill(zeros, r, &J, first);
        first = false;
        double cost = r.squaredNorm();
        if (r.lpNorm<Eigen::Infinity>() < opts.tolerance) {
            converged = true;
            break;
        }
        bool accepted = false;
        for (int attempt = 0; attempt < 18 && !accepted; ++attempt) {
            Eigen::MatrixXd A = J.transpose() * J;
            A.diagonal().array() += lambda * A.diagonal().array().maxCoeff();
            Eigen::VectorXd step = A.ldlt().solve(-J.transpose() * r);
            std::vector<double> trial = zeros;
            for (std::size_t n = 0; n < N; ++n) trial[n] += step(static_cast<int>(n));
            bool ordered = std::is_sorted(trial.begin(), trial.end()) && trial.front() > 0.0;
            if (ordered) {
                Eigen::VectorXd rt(2 * static_cast<int>(N));
                fill(trial, rt, nullptr, false);
                if (rt.squaredNorm() < cost) {
                    if (count_low(trial) != label0)
                        throw degeneracy_error("solve_spectrum: state label changed (mixing)");
                    zeros = trial;
                    lambda = std::max(lambda * 0.35, 1e-14);
                    accepted = true;
                }
            }
            if (!accepted) lambda *= 6.0;
        }
        if (!accepted) break; // stalled
    }

    solve_outcome out;
    out.iterations = it;
    fill(zeros, r, nullptr, false);
    out.bethe_residual = r.lpNorm<Eigen::Infinity>();
    out.converged = converged || out.bethe_residual < 10.0 * opts.tolerance;

    q_function qf;
    qf.gamma = gamma;
    qf.g = g;
    qf.zeros = zeros;
    qf.tail_count = opts.tail_count;
    fit_asy_tail(qf);

    spectral_point pt;
    pt.gamma = gamma;
    pt.g = g;
    pt.state_label =
        opts.extra_low_zeros == 0 ? "ground" : ("excited" + std::to_string(opts.extra_low_zeros));
    pt.Q = qf;
    extract_traces(pt);
    out.point = pt;
    return out;
}

// Max relative residuals of both difference equations on a real grid,
// plus asymptotics-fit and realness diagnostics.
inline residual_summary residual_report(const spectral_point& pt,
                                        const std::vector<double>& grid) {
    residual_summary rs;
    rs.baxter_res = 0.0;
    rs.dual_res = 0.0;
    rs.realness_res = 0.0;
    double gamma = pt.gamma;
    double eps = (pt.g % 2 == 0) ? -1.0 : 1.0;
    const cxd ig(0.0, gamma), ip(0.0, pi_const);
    for (double x : grid) {
        cxd zeta(x, 0.0);
        scaled_c at = pt.Q.eval_scaled(zeta);
        for (int half = 0; half < 2; ++half) {
            cxd ixi = half == 0 ? ig : ip;
            const trace_data& tr = half == 0 ? pt.t : pt.T;
            scaled_c up = pt.Q.eval_scaled(zeta + ixi);
            scaled_c dn = pt.Q.eval_scaled(zeta - ixi);
            cxd var =
                half == 0 ? std::exp(2.0 * zeta) : std::exp(2.0 * pi_const * zeta / gamma);
            scaled_c tq = at * (eps * tr.eval(var));
            scaled_c num = tq - up - dn;
            double denom_log = std::max(tq.log_abs(), std::max(up.log_abs(), dn.log_abs()));
            double rel = std::exp(num.log_abs() - denom_log);
            if (half == 0)
                rs.baxter_res = std::max(rs.baxter_res, rel);
            else
                rs.dual_res = std::max(rs.dual_res, rel);
        }
        rs.realness_res =
            std::max(rs.realness_res, std::abs(at.m.imag()) / (std::abs(at.m) + 1e-300));
    }
    rs.asym_res = pt.Q.asy_fit_residual;
    return rs;
}

inline std::vector<double> default_residual_grid(const q_function& qf, int points = 200) {
    std::vector<double> grid;
    double lo = -8.0, hi = (qf.zeros.empty() ? 4.0 : qf.zeros.back()) + 2.0;
    for (int i = 0; i < points; ++i) grid.push_back(lo + (hi - lo) * i / (points - 1));
    return grid;
}

} // namespace qjac
