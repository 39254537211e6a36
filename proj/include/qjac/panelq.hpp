#pragma once

#include <cmath>
#include <vector>

#include "qjac/context.hpp"
#include "qjac/errors.hpp"
#include "qjac/scaled_complex.hpp"

namespace qjac {

// One panel of the solved Q representation.  Plain panels store Q as a
// real-coefficient Chebyshev expansion; banded panels store the slow
// band functions against the known envelope and chirp prefactors,
//   Q = e^{Lam}[ B0(u) + e^{2iW} Bp(u) + e^{-2iW} Bp~(u) ],
// where Bp~ carries the conjugated coefficients (Q real on the axis).
struct panel_rep {
    double lo = 0.0, hi = 0.0, center = 0.0, half = 1.0;
    bool banded = false;
    int degree = 0;
    std::vector<double> a0;          // plain coefficients, or the s = 0 band
    std::vector<int> band_s;         // positive band multipliers (e.g. {2} or {1,2})
    std::vector<std::vector<cxd>> bands; // complex coefficients per band_s entry
    bool has_dc = true;              // whether the s = 0 band is present
};

namespace detail {

inline void cheb_values(cxd u, int d, std::vector<cxd>& out) {
    out.resize(static_cast<std::size_t>(d + 1));
    out[0] = cxd(1.0, 0.0);
    if (d >= 1) out[1] = u;
    for (int m = 2; m <= d; ++m)
        out[static_cast<std::size_t>(m)] =
            2.0 * u * out[static_cast<std::size_t>(m - 1)] - out[static_cast<std::size_t>(m - 2)];
}

} // namespace detail

struct panel_q {
    double gamma = 0.0;
    int g = 1;
    double x_lo = 0.0, x_hi = 0.0;
    std::vector<panel_rep> panels;

    double env_rate() const { return (g + 1) * (1.0 + pi_const / gamma); }

    const panel_rep& find(double x) const {
        for (auto& P : panels)
            if (x <= P.hi + 1e-12) return P;
        return panels.back();
    }

    scaled_c eval_scaled(cxd zeta) const {
        double x = zeta.real();
        if (x < x_lo - 1e-9 || x > x_hi + 1e-9)
            throw eval_range_error("panel_q: evaluation outside the solved window");
        const panel_rep& P = find(x);
        cxd u = (zeta - P.center) / P.half;
        std::vector<cxd> T;
        detail::cheb_values(u, P.degree, T);
        if (!P.banded) {
            cxd acc{0.0, 0.0};
            for (int m = 0; m <= P.degree; ++m)
                acc += P.a0[static_cast<std::size_t>(m)] * T[static_cast<std::size_t>(m)];
            return scaled_c::from(acc);
        }
        cxd W = static_cast<double>(g + 1) * zeta * zeta / gamma;
        cxd Lam = -env_rate() * zeta;
        auto band = [&](cxd bb, double s) {
            scaled_c r{bb * std::polar(1.0, std::fmod(Lam.imag() + s * W.real(),
                                                      2.0 * pi_const)),
                       Lam.real() - s * W.imag()};
            r.normalize();
            return r;
        };
        scaled_c acc = scaled_c::zero();
        if (P.has_dc) {
            cxd b0{0.0, 0.0};
            for (int m = 0; m <= P.degree; ++m)
                b0 += P.a0[static_cast<std::size_t>(m)] * T[static_cast<std::size_t>(m)];
            acc = acc + band(b0, 0.0);
        }
        for (std::size_t k = 0; k < P.band_s.size(); ++k) {
            cxd bp{0.0, 0.0}, bm{0.0, 0.0};
            for (int m = 0; m <= P.degree; ++m) {
                bp += P.bands[k][static_cast<std::size_t>(m)] * T[static_cast<std::size_t>(m)];
                bm += std::conj(P.bands[k][static_cast<std::size_t>(m)]) *
                      T[static_cast<std::size_t>(m)];
            }
            double sv = static_cast<double>(P.band_s[k]);
            acc = acc + band(bp, sv) + band(bm, -sv);
        }
        return acc;
    }

    cxd eval(cxd zeta) const { return eval_scaled(zeta).value(); }

    // real-axis zeros by sign scan plus bisection
    std::vector<double> real_zeros(double lo, double hi, int scan = 6000) const {
        std::vector<double> zs;
        double prev_x = lo;
        double prev_v = eval(cxd(lo, 0.0)).real();
        for (int i = 1; i <= scan; ++i) {
            double x = lo + (hi - lo) * i / scan;
            double v = eval(cxd(x, 0.0)).real();
            if (prev_v * v < 0.0) {
                double a = prev_x, bnd = x, fa = prev_v;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (a + bnd);
                    double fm = eval(cxd(mid, 0.0)).real();
                    if (fa * fm <= 0.0)
                        bnd = mid;
                    else {
                        a = mid;
                        fa = fm;
                    }
                }
                zs.push_back(0.5 * (a + bnd));
            }
            prev_x = x;
            prev_v = v;
        }
        return zs;
    }
};

} // namespace qjac
