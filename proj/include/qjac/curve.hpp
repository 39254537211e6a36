#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "qjac/errors.hpp"
#include "qjac/laurent.hpp"
#include "qjac/quadrature.hpp"
#include "qjac/context.hpp"
#include "qjac/trace.hpp"

namespace qjac {

// ---------------------------------------------------------------------------
// small dense power series in the local parameter xi = 1/z at infinity^+
// ---------------------------------------------------------------------------
struct xi_series {
    int start = 0;            // exponent of the first stored coefficient
    std::vector<cxd> a;       // a[i] multiplies xi^{start+i}

    cxd coeff(int n) const {
        int i = n - start;
        if (i < 0 || i >= static_cast<int>(a.size())) return {0.0, 0.0};
        return a[static_cast<std::size_t>(i)];
    }

    static xi_series mul(const xi_series& x, const xi_series& y, int keep_up_to) {
        xi_series r;
        r.start = x.start + y.start;
        int n = keep_up_to - r.start + 1;
        if (n < 0) n = 0;
        r.a.assign(static_cast<std::size_t>(n), cxd(0.0, 0.0));
        for (std::size_t i = 0; i < x.a.size(); ++i)
            for (std::size_t j = 0; j < y.a.size(); ++j) {
                int e = x.start + static_cast<int>(i) + y.start + static_cast<int>(j);
                if (e <= keep_up_to) r.a[static_cast<std::size_t>(e - r.start)] += x.a[i] * y.a[j];
            }
        return r;
    }
};

// ---------------------------------------------------------------------------
// curve  w^2 - t(z) w + 1 = 0,  y = 2w - t(z),  y^2 = t(z)^2 - 4
// ---------------------------------------------------------------------------
struct hyperelliptic_curve {
    trace_data trace;
    laurent_poly discriminant;       // t^2 - 4
    std::vector<cxd> branch_points;  // roots of t^2-4, sorted by real part
    bool admissible = false;         // all real, >= 0, distinct, smallest at 0
    bool degenerate = false;

    explicit hyperelliptic_curve(const trace_data& t) : trace(t), discriminant(t.tag) {
        laurent_poly tp = t.poly();
        laurent_poly four = laurent_poly::monomial(t.tag, 0, 4.0);
        discriminant = tp * tp - four;
        // t^2 - 4 = (t-2)(t+2): solve the two degree-(g+1) factors.
        for (double s : {-2.0, 2.0}) {
            laurent_poly f = tp - laurent_poly::monomial(t.tag, 0, s);
            auto roots = poly_roots(f);
            branch_points.insert(branch_points.end(), roots.begin(), roots.end());
        }
        std::sort(branch_points.begin(), branch_points.end(), [](cxd a, cxd b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        double sep = 1e300;
        for (std::size_t i = 0; i + 1 < branch_points.size(); ++i)
            sep = std::min(sep, std::abs(branch_points[i + 1] - branch_points[i]));
        degenerate = sep < 1e-10;

        bool all_real_nonneg = true;
        for (auto& r : branch_points)
            if (std::abs(r.imag()) > 1e-9 || r.real() < -1e-9) all_real_nonneg = false;
        admissible = all_real_nonneg && !degenerate &&
                     std::abs(branch_points.front()) < 1e-8;
    }

    int genus() const { return trace.g; }

    cxd disc_at(cxd z) const { return discriminant.eval(z); }

    // companion-matrix roots plus one Newton polish
    static std::vector<cxd> poly_roots(const laurent_poly& f) {
        int lo = f.min_exp(), hi = f.max_exp();
        if (lo < 0) throw contract_violation("poly_roots: negative exponents");
        int n = hi;
        std::vector<cxd> c(static_cast<std::size_t>(n + 1), cxd(0.0, 0.0));
        for (auto& [e, v] : f.c) c[static_cast<std::size_t>(e)] = v;
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) M(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) M(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
        std::vector<cxd> roots;
        for (int i = 0; i < n; ++i) {
            cxd r = es.eigenvalues()(i);
            // one Newton step
            cxd fv{0.0, 0.0}, dv{0.0, 0.0};
            for (int k = n; k >= 0; --k) {
                dv = dv * r + fv;
                fv = fv * r + c[static_cast<std::size_t>(k)];
            }
            if (std::abs(dv) > 0.0) r -= fv / dv;
            if (std::abs(r.imag()) < 1e-11 * (1.0 + std::abs(r.real()))) r = cxd(r.real(), 0.0);
            roots.push_back(r);
        }
        return roots;
    }
};

inline std::vector<cxd> branch_points(const trace_data& t) {
    return hyperelliptic_curve(t).branch_points;
}

// differential  numerator(z) dz / y
struct differential {
    laurent_poly numerator;
};

// mu_k basis: z^{g+k} dz/y for -g <= k <= 0, [y d/dz(z^{k-g-1} y)]_{>=} dz/y
// for k >= 1 (expanded through y^2 = t^2 - 4).
inline differential mu_differential(int k, const hyperelliptic_curve& cv) {
    const trace_data& t = cv.trace;
    int g = t.g;
    if (k < -g) throw contract_violation("mu_differential: k < -g");
    if (k <= 0) return {laurent_poly::monomial(t.tag, g + k, 1.0)};
    // y (z^{k-g-1} y)' = z^{k-g-1} t t' + (k-g-1) z^{k-g-2} (t^2-4)
    laurent_poly tp = t.poly();
    laurent_poly td(t.tag); // dt/dz
    for (auto& [n, a] : tp.c)
        if (n != 0) td.c[n - 1] = a * static_cast<double>(n);
    laurent_poly term1 = laurent_poly::monomial(t.tag, k - g - 1, 1.0) * tp * td;
    laurent_poly term2 =
        laurent_poly::monomial(t.tag, k - g - 2, static_cast<double>(k - g - 1)) * cv.discriminant;
    return {truncate(term1 + term2, truncate_mode::non_negative)};
}

// ---------------------------------------------------------------------------
// contours and periods
// ---------------------------------------------------------------------------
struct cycle {
    enum class kind_t { a_cycle, b_cycle, infinity_cycle };
    kind_t kind;
    int index; // k in [-g, g]: a-cycles k<0, b-cycles k>0, k=0 around inf^+
};

inline cycle a_cycle(int j) { return {cycle::kind_t::a_cycle, -j}; }
inline cycle b_cycle(int j) { return {cycle::kind_t::b_cycle, j}; }
inline cycle infinity_cycle() { return {cycle::kind_t::infinity_cycle, 0}; }

namespace detail {

// Analytic continuation of y = sqrt(t^2-4) along a polyline; the branch
// never jumps more than 90 degrees per step (step size halved until true).
class y_tracker {
  public:
    y_tracker(const hyperelliptic_curve& cv, cxd z0, cxd y0) : cv_(cv), z_(z0), y_(y0) {}

    cxd z() const { return z_; }
    cxd y() const { return y_; }

    void walk_to(cxd z1) {
        int steps = 1;
        for (;;) {
            cxd zs = z_, ys = y_;
            bool ok = true;
            for (int i = 1; i <= steps; ++i) {
                cxd zn = z_ + (z1 - z_) * (static_cast<double>(i) / steps);
                cxd s = std::sqrt(cv_.disc_at(zn));
                cxd pick = (std::abs(s - ys) <= std::abs(-s - ys)) ? s : -s;
                if (std::abs(pick - ys) > 0.9 * std::abs(ys) + 1e-14) {
                    ok = false;
                    break;
                }
                zs = zn;
                ys = pick;
            }
            if (ok) {
                z_ = zs;
                y_ = ys;
                return;
            }
            steps *= 2;
            if (steps > (1 << 18)) throw contour_error("y continuation failed to resolve branch");
        }
    }

  private:
    const hyperelliptic_curve& cv_;
    cxd z_, y_;
};

// y on the upper lip (z + i0) of the real axis at x, continued from the
// base point right of all branch points where y = +sqrt.
inline cxd upper_lip_y(const hyperelliptic_curve& cv, double x) {
    double xmax = 0.0, xmin = 0.0;
    for (auto& q : cv.branch_points) {
        xmax = std::max(xmax, q.real());
        xmin = std::min(xmin, q.real());
    }
    double base = xmax + 1.0 + 0.2 * (xmax - xmin);
    double lift = 0.5 + 0.1 * (xmax - xmin);
    y_tracker tr(cv, cxd(base, 0.0), std::sqrt(cv.disc_at(cxd(base, 0.0))));
    tr.walk_to(cxd(base, lift));
    tr.walk_to(cxd(x, lift));
    tr.walk_to(cxd(x, 1e-9));
    return tr.y();
}

// Integral of numerator dz/y from branch point a to branch point b along
// the upper lip; the Chebyshev substitution z = mid + rad cos(theta)
// absorbs the endpoint inverse square roots:
//   int_a^b N dz / y  =  int_0^pi N(z(theta)) / W(z(theta)) dtheta
// with y(z+i0) = W(z) sqrt((z-a)(b-z)), W smooth and nonvanishing.
inline cxd lip_integral(const hyperelliptic_curve& cv, const laurent_poly& num, double a,
                        double b, int order) {
    double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    const auto& gl = gauss_legendre::order(order);

    // Branch seed: one continuation walk down to the lip at the midpoint.
    cxd y_mid = upper_lip_y(cv, mid);
    cxd W_mid = y_mid / std::sqrt(cxd(rad * rad, 0.0));

    // Nodes in increasing z; propagate the smooth sign of W from the
    // midpoint outward through W^2 = disc / ((z-a)(b-z)).
    std::size_t n = gl.x.size();
    std::vector<double> zs(n), th(n);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = 0.5 * pi_const * (gl.x[i] + 1.0);
        zs[i] = mid + rad * std::cos(th[i]);
    }
    // theta decreasing <-> z increasing; find the node closest to mid
    std::vector<cxd> W(n);
    auto w2 = [&](double z) {
        cxd v = cv.disc_at(cxd(z, 0.0)) / cxd((z - a) * (b - z), 0.0);
        return v;
    };
    std::size_t i_mid = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(zs[i] - mid) < std::abs(zs[i_mid] - mid)) i_mid = i;
    auto pick = [&](cxd s, cxd ref) { return (std::abs(s - ref) <= std::abs(-s - ref)) ? s : -s; };
    W[i_mid] = pick(std::sqrt(w2(zs[i_mid])), W_mid);
    for (std::size_t i = i_mid + 1; i < n; ++i) W[i] = pick(std::sqrt(w2(zs[i])), W[i - 1]);
    for (std::size_t i = i_mid; i-- > 0;) W[i] = pick(std::sqrt(w2(zs[i])), W[i + 1]);

    cxd acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
        acc += gl.w[i] * num.eval(cxd(zs[i], 0.0)) / W[i];
    return acc * (0.5 * pi_const);
}

// series of 1/y at infinity^+ in xi = 1/z up to xi^keep
inline xi_series inv_y_series(const hyperelliptic_curve& cv, int keep) {
    int g = cv.genus();
    // P(xi) = xi^{2g+2} (t(1/xi)^2 - 4), P(0) = 1
    std::vector<cxd> P(static_cast<std::size_t>(keep + 2 * g + 4), cxd(0.0, 0.0));
    for (auto& [n, a] : cv.discriminant.c) {
        int e = 2 * g + 2 - n;
        if (e >= 0 && e < static_cast<int>(P.size())) P[static_cast<std::size_t>(e)] = a;
    }
    // S = sqrt(P) by Newton on series, S(0)=1
    std::size_t len = P.size();
    std::vector<cxd> S(len, cxd(0.0, 0.0));
    S[0] = 1.0;
    for (std::size_t n = 1; n < len; ++n) {
        cxd acc = P[n];
        for (std::size_t j = 1; j < n; ++j) acc -= S[j] * S[n - j];
        S[n] = acc / (2.0 * S[0]);
    }
    // 1/S
    std::vector<cxd> R(len, cxd(0.0, 0.0));
    R[0] = 1.0;
    for (std::size_t n = 1; n < len; ++n) {
        cxd acc{0.0, 0.0};
        for (std::size_t j = 1; j <= n; ++j) acc += S[j] * R[n - j];
        R[n] = -acc;
    }
    // 1/y = xi^{g+1} / S
    xi_series r;
    r.start = g + 1;
    r.a.assign(R.begin(), R.end());
    return r;
}

// series of the 1-form nu(xi) with  diff = nu(xi) d xi  at infinity^+
inline xi_series form_series(const hyperelliptic_curve& cv, const differential& d, int keep) {
    xi_series invy = inv_y_series(cv, keep + 4 * (cv.genus() + 2));
    xi_series numer;
    numer.start = -d.numerator.max_exp();
    int lo = numer.start, hi = -d.numerator.min_exp();
    numer.a.assign(static_cast<std::size_t>(hi - lo + 1), cxd(0.0, 0.0));
    for (auto& [n, a] : d.numerator.c) numer.a[static_cast<std::size_t>(-n - lo)] = a;
    // dz = -xi^{-2} d xi
    xi_series dz;
    dz.start = -2;
    dz.a = {cxd(-1.0, 0.0)};
    return xi_series::mul(xi_series::mul(numer, dz, keep + 2), invy, keep);
}

} // namespace detail

// Period of a differential over a canonical cycle.  a-cycles are
// 2x(cut integrals), b-cycles telescoped chains of gap crossings, the
// infinity cycle is 2 pi i times the residue at infinity^+.
inline cxd cycle_period(const differential& d, const cycle& cyc, const hyperelliptic_curve& cv,
                        int order = 96) {
    if (cv.degenerate) throw degeneracy_error("cycle_period: coinciding branch points");
    if (!cv.admissible) throw contour_error("cycle_period: curve not in the admissible region");
    int g = cv.genus();
    const auto& q = cv.branch_points;
    switch (cyc.kind) {
        case cycle::kind_t::a_cycle: {
            int j = -cyc.index;
            if (j < 1 || j > g) throw contract_violation("cycle_period: bad a index");
            double a = q[static_cast<std::size_t>(2 * j - 2)].real();
            double b = q[static_cast<std::size_t>(2 * j - 1)].real();
            // loop around the cut = 2 x (top-lip crossing); orientation
            // fixed so the normalized period matrix lands in Im B > 0
            return 2.0 * detail::lip_integral(cv, d.numerator, a, b, order);
        }
        case cycle::kind_t::b_cycle: {
            int j = cyc.index;
            if (j < 1 || j > g) throw contract_violation("cycle_period: bad b index");
            cxd acc{0.0, 0.0};
            for (int m = j; m <= g; ++m) {
                double a = q[static_cast<std::size_t>(2 * m - 1)].real();
                double b = q[static_cast<std::size_t>(2 * m)].real();
                acc += 2.0 * detail::lip_integral(cv, d.numerator, a, b, order);
            }
            return acc;
        }
        case cycle::kind_t::infinity_cycle: {
            auto s = detail::form_series(cv, d, 0);
            return 2.0 * pi_const * cxd(0.0, 1.0) * s.coeff(-1);
        }
    }
    throw contract_violation("cycle_period: unreachable");
}

// Generic closed-contour integral with explicit branch tracking; used by
// tests for additivity/orientation properties.  The polyline must avoid
// branch points; y0 seeds the sheet at points[0].
inline cxd contour_integral(const differential& d, const std::vector<cxd>& points, cxd y0,
                            const hyperelliptic_curve& cv, int order = 64) {
    if (points.size() < 2) throw contour_error("contour_integral: need at least two points");
    cxd acc{0.0, 0.0};
    detail::y_tracker tr(cv, points[0], y0);
    for (std::size_t s = 0; s + 1 < points.size(); ++s) {
        const auto& gl = gauss_legendre::order(order);
        cxd p0 = points[s], p1 = points[s + 1];
        cxd mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            cxd z = mid + half * gl.x[i];
            tr.walk_to(z);
            acc += gl.w[i] * d.numerator.eval(z) / tr.y() * half;
        }
        tr.walk_to(p1);
    }
    return acc;
}

// Normalized holomorphic basis: omega_j = sum_m C[m][j] mu_{-m} with
// a_i(omega_j) = delta_ij; B_ij = b_i(omega_j).
struct normalized_basis {
    Eigen::MatrixXcd coeffs; // g x g, column j = omega_j in the mu_{-1..-g} basis
    Eigen::MatrixXcd B;      // period matrix
};

inline normalized_basis normalized_periods(const hyperelliptic_curve& cv, int order = 96) {
    int g = cv.genus();
    Eigen::MatrixXcd A(g, g), Bmu(g, g);
    for (int i = 1; i <= g; ++i)
        for (int m = 1; m <= g; ++m) {
            differential mu = mu_differential(-m, cv);
            A(i - 1, m - 1) = cycle_period(mu, a_cycle(i), cv, order);
            Bmu(i - 1, m - 1) = cycle_period(mu, b_cycle(i), cv, order);
        }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) throw degeneracy_error("normalized_periods: singular a-period matrix");
    normalized_basis nb;
    nb.coeffs = lu.solve(Eigen::MatrixXcd::Identity(g, g));
    nb.B = Bmu * nb.coeffs;
    return nb;
}

// res_{infinity^+}( d1 * int d2 ): local expansion pairing.
inline cxd residue_pairing(const differential& d1, const differential& d2,
                           const hyperelliptic_curve& cv) {
    int keep = 4 * (cv.genus() + 2) + 8;
    auto s1 = detail::form_series(cv, d1, keep);
    auto s2 = detail::form_series(cv, d2, keep);
    cxd res2 = s2.coeff(-1);
    // antiderivative of s2, constant term zero
    xi_series anti;
    anti.start = s2.start + 1;
    anti.a.assign(s2.a.size(), cxd(0.0, 0.0));
    for (std::size_t i = 0; i < s2.a.size(); ++i) {
        int n = s2.start + static_cast<int>(i);
        if (n == -1) continue;
        anti.a[i] = s2.a[i] / static_cast<double>(n + 1);
    }
    auto prod = xi_series::mul(s1, anti, 0);
    cxd base = prod.coeff(-1);
    if (std::abs(res2) > 1e-10) {
        cxd res1 = s1.coeff(-1);
        bool d1_has_pole = s1.start < -1 || std::abs(res1) > 1e-10;
        if (d1_has_pole) {
            cxd delta = 2.0 * pi_const * cxd(0.0, 1.0) * res2 * res1;
            throw ambiguity_error(base, base + delta,
                                  "residue_pairing: log antiderivative against a pole");
        }
    }
    return base;
}

} // namespace qjac
