#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qjac/scaled_complex.hpp"

namespace qjac {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order by
// Newton iteration on P_n and cached.
struct gauss_legendre {
    std::vector<double> x, w;

    explicit gauss_legendre(int n) : x(n), w(n) {
        const double pi = 3.14159265358979323846;
        for (int i = 0; i < n; ++i) {
            double t = std::cos(pi * (i + 0.75) / (n + 0.5));
            double p0 = 0.0, p1 = 0.0;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0;
                p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
                }
                double dp = n * (t * p0 - p1) / (t * t - 1.0);
                double dt = p0 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double dp = n * (t * p0 - p1) / (t * t - 1.0);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }

    static const gauss_legendre& order(int n) {
        static std::vector<gauss_legendre*> cache(129, nullptr);
        if (n < 1 || n >= static_cast<int>(cache.size()))
            throw std::invalid_argument("gauss_legendre: unsupported order");
        if (!cache[n]) cache[n] = new gauss_legendre(n);
        return *cache[n];
    }
};

// Fixed-order panel integral of a complex function over [a,b] in the
// complex plane (straight segment).
inline cxd integrate_segment(const std::function<cxd(cxd)>& f, cxd a, cxd b, int order = 16) {
    const auto& gl = gauss_legendre::order(order);
    cxd mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cxd acc{0.0, 0.0};
    for (std::size_t i = 0; i < gl.x.size(); ++i)
        acc += gl.w[i] * f(mid + half * gl.x[i]);
    return acc * half;
}

// Same but the integrand is produced in scaled form; the accumulation is
// done in scaled arithmetic so huge intermediate magnitudes are safe.
inline scaled_c integrate_segment_scaled(const std::function<scaled_c(cxd)>& f, cxd a, cxd b,
                                         int order = 16) {
    const auto& gl = gauss_legendre::order(order);
    cxd mid = 0.5 * (a + b), half = 0.5 * (b - a);
    scaled_c acc = scaled_c::zero();
    for (std::size_t i = 0; i < gl.x.size(); ++i)
        acc = acc + f(mid + half * gl.x[i]) * cxd(gl.w[i], 0.0);
    return acc * half;
}

// Doubling refinement over a list of panel edges until two successive
// levels agree to tol (absolute, against the running scale).  Returns the
// refined value; *achieved reports the last difference.
inline cxd integrate_panels_refined(const std::function<cxd(cxd)>& f,
                                    const std::vector<double>& edges, double tol,
                                    double* achieved = nullptr, int max_doublings = 6) {
    auto pass = [&](int order) {
        cxd acc{0.0, 0.0};
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            acc += integrate_segment(f, cxd(edges[i], 0.0), cxd(edges[i + 1], 0.0), order);
        return acc;
    };
    int order = 16;
    cxd prev = pass(order);
    for (int d = 0; d < max_doublings; ++d) {
        order *= 2;
        if (order > 128) order = 128;
        cxd cur = pass(order);
        double diff = std::abs(cur - prev);
        if (achieved) *achieved = diff;
        prev = cur;
        if (diff < tol || order == 128) break;
    }
    return prev;
}

} // namespace qjac
