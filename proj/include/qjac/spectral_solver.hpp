#pragma once

// Collocation solver for the pair of difference equations
//   (-1)^{g+1} t(z) Q(zeta) = Q(zeta+i gamma) + Q(zeta-i gamma),  z = e^{2 zeta}
//   (-1)^{g+1} T(Z) Q(zeta) = Q(zeta+i pi)    + Q(zeta-i pi),     Z = e^{2 pi zeta/gamma}
//
// Both equations are imposed at real collocation points on the panel
// representation of panelq.hpp.  Everything is linear in the panel
// coefficients, so one column-scaled QR solve per trace pair yields the
// global least-squares defect rho(t, T); the spectrum is where rho dips
// to the representation floor.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"
#include "qjac/panelq.hpp"
#include "qjac/scaled_complex.hpp"
#include "qjac/trace.hpp"

namespace qjac {

struct collocation_options {
    double x_lo = -10.0;
    double x_hi = 13.0;
    double banded_from = 1.0;
    int banded_degree = 14;
    double point_factor = 1.7; // collocation points per coefficient
    int series_order = 8;      // left-boundary double-series truncation
    int max_plain_degree = 76;
    bool dual_rows = true;         // impose the pi-shift equation too
    bool dc_band = true;           // include the s = 0 band
    std::vector<int> band_set = {2}; // positive chirp multipliers
};

namespace detail {

struct layout {
    std::vector<panel_rep> panels;
    std::vector<int> offset;
    int n = 0;
};

inline layout make_layout(const collocation_options& o, double gamma, int g) {
    layout L;
    double x = o.x_lo;
    while (x < o.x_hi - 1e-9) {
        panel_rep P;
        P.lo = x;
        bool band = x >= o.banded_from - 1e-9;
        P.hi = std::min(x + 2.0, band ? o.x_hi : o.banded_from);
        P.center = 0.5 * (P.lo + P.hi);
        P.half = 0.5 * (P.hi - P.lo);
        P.banded = band;
        if (band) {
            P.degree = o.banded_degree;
            P.has_dc = o.dc_band;
            P.band_s = o.band_set;
        } else {
            // the chirp rate grows with the zero density, zero left of the
            // first oscillation; resolve it over the shifted radius
            double freq = 2.0 * (g + 1) * std::max(0.0, P.hi) / gamma;
            double R = P.half + pi_const;
            P.degree = std::min(static_cast<int>(std::ceil(1.2 * freq * R / 2.0 + 16.0)),
                                o.max_plain_degree);
        }
        L.panels.push_back(P);
        x = P.hi;
    }
    L.offset.resize(L.panels.size());
    int n = 0;
    for (std::size_t i = 0; i < L.panels.size(); ++i) {
        L.offset[i] = n;
        const panel_rep& P = L.panels[i];
        if (!P.banded) {
            n += P.degree + 1;
        } else {
            if (P.has_dc) n += P.degree + 1;
            n += 2 * (P.degree + 1) * static_cast<int>(P.band_s.size());
        }
    }
    L.n = n;
    return L;
}

// double-series coefficients c_{ab} of Q near zeta -> -infinity; exact
// consequence of the two recursions for any trace pair
inline std::vector<std::vector<cxd>> series_cab(const trace_data& t, const trace_data& T,
                                                double gamma, int order) {
    int g = t.g;
    double eps = t.sign();
    double gd = pi_const * pi_const / gamma;
    std::vector<std::vector<cxd>> c(static_cast<std::size_t>(order + 1),
                                    std::vector<cxd>(static_cast<std::size_t>(order + 1),
                                                     cxd(0.0, 0.0)));
    c[0][0] = 1.0;
    auto at = [&](int a, int b) {
        if (a < 0 || b < 0) return cxd(0.0, 0.0);
        return c[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    };
    for (int b = 1; b <= order; ++b) {
        cxd num{0.0, 0.0};
        for (int j = 0; j <= g; ++j) num += T.coeff(j) * at(0, b - g - 1 + j);
        c[0][static_cast<std::size_t>(b)] = eps * num / (2.0 * std::cos(2.0 * b * gd) - 2.0);
    }
    for (int a = 1; a <= order; ++a)
        for (int b = 0; b <= order; ++b) {
            cxd num{0.0, 0.0};
            for (int j = 0; j <= g; ++j) num += t.coeff(j) * at(a - g - 1 + j, b);
            c[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                eps * num / (2.0 * std::cos(2.0 * a * gamma) - 2.0);
        }
    return c;
}

struct srow {
    std::map<int, scaled_c> w;
    scaled_c rhs = scaled_c::zero();
    double wlog = -1e300; // log of the row normalization (solution scale)

    void add(int idx, scaled_c v) {
        if (v.is_zero()) return;
        auto it = w.find(idx);
        if (it == w.end())
            w.emplace(idx, v);
        else
            it->second = it->second + v;
    }
};

class assembler {
  public:
    assembler(const layout& L, const gamma_context& ctx, int g, const collocation_options& opts)
        : L_(L), ctx_(ctx), g_(g), opts_(opts) {}

    int panel_of(double x) const {
        for (std::size_t i = 0; i < L_.panels.size(); ++i)
            if (x <= L_.panels[i].hi + 1e-12) return static_cast<int>(i);
        return static_cast<int>(L_.panels.size()) - 1;
    }

    // a-priori magnitude of Q at zeta: O(1) left of the oscillation, the
    // envelope times the dominant band off the axis to the right
    double log_qscale(cxd zeta) const {
        double x = std::max(0.0, zeta.real());
        double er = (g_ + 1) * (1.0 + pi_const / ctx_.gamma);
        return -er * x + 4.0 * (g_ + 1) * x * std::abs(zeta.imag()) / ctx_.gamma;
    }

    // weights of Q(zeta) against the unknowns of panel p
    void add_at_panel(srow& row, int p, cxd zeta, scaled_c mult) const {
        if (mult.is_zero()) return;
        const panel_rep& P = L_.panels[static_cast<std::size_t>(p)];
        cxd u = (zeta - P.center) / P.half;
        std::vector<cxd> T;
        cheb_values(u, P.degree, T);
        int base = L_.offset[static_cast<std::size_t>(p)];
        if (!P.banded) {
            for (int m = 0; m <= P.degree; ++m)
                row.add(base + m, mult * scaled_c::from(T[static_cast<std::size_t>(m)]));
            return;
        }
        double er = (g_ + 1) * (1.0 + pi_const / ctx_.gamma);
        cxd W = static_cast<double>(g_ + 1) * zeta * zeta / ctx_.gamma;
        cxd Lam = -er * zeta;
        auto pref = [&](double s) {
            return scaled_c{std::polar(1.0, std::fmod(Lam.imag() + s * W.real(),
                                                      2.0 * pi_const)),
                            Lam.real() - s * W.imag()};
        };
        int off = base;
        if (P.has_dc) {
            scaled_c p0 = pref(0.0);
            for (int m = 0; m <= P.degree; ++m)
                row.add(off + m, mult * p0 * scaled_c::from(T[static_cast<std::size_t>(m)]));
            off += P.degree + 1;
        }
        for (std::size_t k = 0; k < P.band_s.size(); ++k) {
            double sv = static_cast<double>(P.band_s[k]);
            scaled_c pu = pref(sv), pd = pref(-sv);
            for (int m = 0; m <= P.degree; ++m) {
                scaled_c tm = scaled_c::from(T[static_cast<std::size_t>(m)]);
                row.add(off + 2 * m, mult * tm * (pu + pd));
                row.add(off + 2 * m + 1, mult * tm * (pu - pd) * cxd(0.0, 1.0));
            }
            off += 2 * (P.degree + 1);
        }
    }

    void add_q(srow& row, cxd zeta, scaled_c mult) const {
        row.wlog = std::max(row.wlog, log_qscale(zeta) + mult.log_abs());
        add_at_panel(row, panel_of(zeta.real()), zeta, mult);
    }

    void build(const trace_data& t, const trace_data& T, Eigen::MatrixXd& A,
               Eigen::VectorXd& b) const {
        std::vector<srow> rows;
        std::vector<bool> cplx;
        double eps = t.sign();
        const double gamma = ctx_.gamma;

        // the equations are imposed along several horizontal lines: real
        // collocation alone leaves polynomial freedom off the axis that can
        // fake solutions for any trace pair
        const double ylev_g[3] = {0.0, 0.35 * pi_const, 0.7 * pi_const};
        const double ylev_p[2] = {0.0, 0.35 * pi_const};
        for (auto& P : L_.panels) {
            int pts = static_cast<int>(std::ceil(opts_.point_factor * (P.degree + 1))) +
                      (P.banded ? 8 : 2);
            for (int i = 0; i < pts; ++i) {
                double x = P.center + P.half * std::cos(pi_const * (i + 0.5) / pts);
                for (int half = 0; half < 2; ++half) {
                    if (half == 1 && !opts_.dual_rows) continue;
                    double xi = half == 0 ? gamma : pi_const;
                    const trace_data& tr = half == 0 ? t : T;
                    int nlev = half == 0 ? 3 : 2;
                    const double* ylev = half == 0 ? ylev_g : ylev_p;
                    for (int lv = 0; lv < nlev; ++lv) {
                        cxd zeta(x, ylev[lv]);
                        srow r;
                        cxd var = half == 0
                                      ? std::exp(2.0 * zeta)
                                      : std::exp(2.0 * pi_const * zeta / gamma);
                        add_q(r, zeta, scaled_c::from(eps * tr.eval(var)));
                        add_q(r, zeta + cxd(0.0, xi), scaled_c::from(cxd(-1.0, 0.0)));
                        add_q(r, zeta - cxd(0.0, xi), scaled_c::from(cxd(-1.0, 0.0)));
                        rows.push_back(std::move(r));
                        cplx.push_back(ylev[lv] != 0.0);
                    }
                }
            }
        }

        // interface smoothness: value matching at three heights plus the
        // real-axis derivative (symmetric differences within each panel)
        for (std::size_t i = 0; i + 1 < L_.panels.size(); ++i) {
            double xe = L_.panels[i].hi;
            for (double y : {0.0, 0.45 * pi_const, 0.9 * pi_const}) {
                srow r;
                r.wlog = log_qscale(cxd(xe, y));
                add_at_panel(r, static_cast<int>(i), cxd(xe, y), scaled_c::from(cxd(1.0, 0.0)));
                add_at_panel(r, static_cast<int>(i + 1), cxd(xe, y),
                             scaled_c::from(cxd(-1.0, 0.0)));
                rows.push_back(std::move(r));
                cplx.push_back(y != 0.0);
            }
            srow rd;
            double h = 5e-4;
            rd.wlog = log_qscale(cxd(xe, 0.0)) + std::log(1.0 / h);
            add_at_panel(rd, static_cast<int>(i), cxd(xe, 0.0),
                         scaled_c::from(cxd(1.0 / h, 0.0)));
            add_at_panel(rd, static_cast<int>(i), cxd(xe - h, 0.0),
                         scaled_c::from(cxd(-1.0 / h, 0.0)));
            add_at_panel(rd, static_cast<int>(i + 1), cxd(xe + h, 0.0),
                         scaled_c::from(cxd(-1.0 / h, 0.0)));
            add_at_panel(rd, static_cast<int>(i + 1), cxd(xe, 0.0),
                         scaled_c::from(cxd(1.0 / h, 0.0)));
            rows.push_back(std::move(rd));
            cplx.push_back(false);
        }

        // left boundary: match the double series deep in the flat region
        auto cab = series_cab(t, T, gamma, opts_.series_order);
        for (double dx : {0.25, 0.7, 1.15, 1.6}) {
            for (double y : {0.0, 0.5 * pi_const}) {
                cxd zeta(opts_.x_lo + dx, y);
                cxd z = std::exp(2.0 * zeta), Z = std::exp(2.0 * pi_const * zeta / gamma);
                cxd val{0.0, 0.0};
                for (int a2 = 0; a2 <= opts_.series_order; ++a2)
                    for (int b2 = 0; b2 + a2 <= opts_.series_order; ++b2)
                        val += cab[static_cast<std::size_t>(a2)][static_cast<std::size_t>(b2)] *
                               std::pow(z, a2) * std::pow(Z, b2);
                srow r;
                add_q(r, zeta, scaled_c::from(cxd(1.0, 0.0)));
                r.rhs = scaled_c::from(val);
                rows.push_back(std::move(r));
                cplx.push_back(y != 0.0);
            }
        }

        int nr = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) nr += cplx[i] ? 2 : 1;
        A.setZero(nr, L_.n);
        b.setZero(nr);
        int out = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double lmax = rows[i].wlog;
            if (lmax < -1e290) lmax = 0.0;
            for (auto& [idx, v] : rows[i].w) {
                cxd w = v.m * std::exp(v.e - lmax);
                A(out, idx) = w.real();
                if (cplx[i]) A(out + 1, idx) = w.imag();
            }
            if (!rows[i].rhs.is_zero()) {
                cxd rv = rows[i].rhs.m * std::exp(rows[i].rhs.e - lmax);
                b(out) = rv.real();
                if (cplx[i]) b(out + 1) = rv.imag();
            }
            out += cplx[i] ? 2 : 1;
        }
    }

  private:
    const layout& L_;
    const gamma_context& ctx_;
    int g_;
    collocation_options opts_;
};

} // namespace detail

struct collocation_result {
    double defect = 1e300; // relative least-squares defect
    panel_q q;
};

inline collocation_result collocation_solve(const gamma_context& ctx, const trace_data& t,
                                            const trace_data& T,
                                            collocation_options opts = {}) {
    int g = t.g;
    detail::layout L = detail::make_layout(opts, ctx.gamma, g);
    detail::assembler as(L, ctx, g, opts);
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    as.build(t, T, A, b);
    Eigen::VectorXd cs(L.n);
    for (int j = 0; j < L.n; ++j) {
        double n2 = A.col(j).norm();
        cs(j) = n2 > 1e-290 ? 1.0 / n2 : 1.0;
        A.col(j) *= cs(j);
    }
    Eigen::VectorXd sol = A.householderQr().solve(b);
    collocation_result R;
    R.defect = (A * sol - b).norm() / b.norm();
    sol = sol.cwiseProduct(cs);
    R.q.gamma = ctx.gamma;
    R.q.g = g;
    R.q.x_lo = opts.x_lo;
    R.q.x_hi = opts.x_hi;
    R.q.panels = L.panels;
    for (std::size_t p = 0; p < L.panels.size(); ++p) {
        panel_rep& P = R.q.panels[p];
        int off = L.offset[p];
        if (!P.banded || P.has_dc) {
            P.a0.assign(static_cast<std::size_t>(P.degree + 1), 0.0);
            for (int m = 0; m <= P.degree; ++m)
                P.a0[static_cast<std::size_t>(m)] = sol(off + m);
            off += P.degree + 1;
        }
        if (P.banded) {
            P.bands.assign(P.band_s.size(),
                           std::vector<cxd>(static_cast<std::size_t>(P.degree + 1)));
            for (std::size_t k = 0; k < P.band_s.size(); ++k) {
                for (int m = 0; m <= P.degree; ++m)
                    P.bands[k][static_cast<std::size_t>(m)] =
                        cxd(sol(off + 2 * m), sol(off + 2 * m + 1));
                off += 2 * (P.degree + 1);
            }
        }
    }
    return R;
}

} // namespace qjac
