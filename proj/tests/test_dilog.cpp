#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qjac/dilog.hpp"

using namespace qjac;

TEST_CASE("Phi functional equation seeds at phi = 0") {
    gamma_context ctx(0.7);
    dilog_evaluator phi(ctx);
    cxd ig(0.0, ctx.gamma);
    cxd r1 = phi.eval(ig) / phi.eval(-ig);
    REQUIRE(std::abs(r1 - 0.5) < 1e-11);
    cxd ip(0.0, pi_const);
    cxd r2 = phi.eval(ip) / phi.eval(-ip);
    REQUIRE(std::abs(r2 - 0.5) < 1e-11);
}

TEST_CASE("Phi(0) independent of contour offset") {
    gamma_context ctx(0.7);
    dilog_config a = dilog_config::standard(ctx);
    dilog_config b = a;
    b.contour_offset = 0.31 * std::min(1.0, pi_const / ctx.gamma);
    dilog_evaluator pa(ctx, a), pb(ctx, b);
    cxd va = pa.eval(cxd(0.0, 0.0));
    cxd vb = pb.eval(cxd(0.0, 0.0));
    REQUIRE(std::abs(va - vb) < 1e-10);
}

TEST_CASE("Phi functional equations on a real grid") {
    for (double gamma : {0.5, 0.7, 1.3}) {
        gamma_context ctx(gamma);
        dilog_evaluator phi(ctx);
        cxd ig(0.0, gamma), ip(0.0, pi_const);
        for (int i = 0; i <= 24; ++i) {
            double x = -6.0 + 12.0 * i / 24.0;
            cxd p(x, 0.0);
            cxd up = phi.eval(p + ig), dn = phi.eval(p - ig);
            double res = std::abs(up - dn / (1.0 + std::exp(p))) / std::abs(dn);
            REQUIRE(res < 1e-10);
            cxd upp = phi.eval(p + ip), dnp = phi.eval(p - ip);
            double resd =
                std::abs(upp - dnp / (1.0 + std::exp(pi_const / gamma * p))) / std::abs(dnp);
            REQUIRE(resd < 1e-10);
        }
    }
}

TEST_CASE("Phi conjugation symmetry (unitary convention)") {
    // The functional equation with 1/(1+e^phi) forces |Phi| = 1 on the
    // real axis and conj(Phi(phi)) Phi(conj phi) = 1; a real-on-axis
    // normalization cannot satisfy the same equation.
    gamma_context ctx(0.9);
    dilog_evaluator phi(ctx);
    cxd p(1.3, 0.8);
    cxd a = phi.eval(p);
    cxd b = phi.eval(std::conj(p));
    REQUIRE(std::abs(std::conj(a) * b - 1.0) < 1e-10);
    cxd r = phi.eval(cxd(2.2, 0.0));
    REQUIRE(std::abs(std::abs(r) - 1.0) < 1e-11);
    // Phi -> 1 far to the left
    cxd far = phi.eval(cxd(-25.0, 0.0));
    REQUIRE(std::abs(far - 1.0) < 1e-9);
}

TEST_CASE("Phi asymptotics: log Phi curvature matches phi^2/(4 i gamma)") {
    gamma_context ctx(0.8);
    dilog_evaluator phi(ctx);
    // second central difference of log Phi at phi ~ 20, computed from the
    // ratio so no log branch is crossed
    double h = 0.5;
    cxd p0 = phi.eval(cxd(20.0 - h, 0.0));
    cxd p1 = phi.eval(cxd(20.0, 0.0));
    cxd p2 = phi.eval(cxd(20.0 + h, 0.0));
    cxd second = std::log(p2 * p0 / (p1 * p1));
    cxd expect = cxd(0.0, 1.0) * 2.0 * h * h / (4.0 * ctx.gamma);
    REQUIRE(std::abs(second - expect) < 1e-6);
}

TEST_CASE("continuation outside the primary strip") {
    gamma_context ctx(0.7);
    dilog_evaluator phi(ctx);
    // value far above the strip must satisfy the gamma equation against a
    // direct in-strip evaluation chain
    cxd p(0.4, pi_const + 3.0 * ctx.gamma);
    cxd up = phi.eval(p);
    cxd ref = phi.eval(p - cxd(0.0, 2.0 * ctx.gamma)) /
              (1.0 + std::exp(p - cxd(0.0, ctx.gamma)));
    REQUIRE(std::abs(up - ref) < 1e-10 * std::abs(ref));
}

TEST_CASE("lambda weight") {
    gamma_context ctx(0.7);
    dilog_evaluator phi(ctx);
    cxd zeta(0.3, 0.1);
    // psi = zeta collapses to the prefactor times Phi(0)
    cxd v = phi.lambda(zeta, zeta);
    cxd expect = std::exp(-zeta * zeta / (2.0 * cxd(0.0, ctx.gamma))) * phi.eval(cxd(0.0, 0.0));
    REQUIRE(std::abs(v - expect) < 1e-10 * std::abs(expect));

    // lambda(zeta|psi+i gamma)/lambda(zeta|psi-i gamma)
    //   = e^{-zeta} e^{2i(pi+gamma)} / (1+e^{psi-zeta})
    cxd psi(0.8, 0.0);
    cxd ig(0.0, ctx.gamma);
    cxd lhs = phi.lambda(zeta, psi + ig) / phi.lambda(zeta, psi - ig);
    cxd rhs = std::exp(-zeta) * std::exp(cxd(0.0, 2.0 * (pi_const + ctx.gamma))) /
              (1.0 + std::exp(psi - zeta));
    REQUIRE(std::abs(lhs - rhs) < 1e-9 * std::abs(rhs));
}

TEST_CASE("lambda and kernel are self-dual under gamma -> pi^2/gamma") {
    gamma_context ctx(0.9);
    gamma_context dual = ctx.dual();
    REQUIRE(std::abs(dual.gamma_dual - ctx.gamma) < 1e-12);
    dilog_evaluator phi(ctx), phid(dual);
    double r = pi_const / ctx.gamma;
    cxd zeta(0.21, 0.05), psi(-0.4, 0.02);
    cxd a = phi.lambda(zeta, psi);
    cxd b = phid.lambda(r * zeta, r * psi);
    REQUIRE(std::abs(a - b) < 1e-9 * std::abs(a));

    std::vector<cxd> ph = {cxd(0.1, 0.0), cxd(-0.2, 0.0), cxd(0.3, 0.0), cxd(0.05, 0.0)};
    std::vector<cxd> ps = {cxd(0.2, 0.0), cxd(0.0, 0.0), cxd(-0.1, 0.0), cxd(0.15, 0.0)};
    cxd k1 = phi.qkernel(ph, zeta, ps);
    std::vector<cxd> phr = ph, psr = ps;
    for (auto& v : phr) v *= r;
    for (auto& v : psr) v *= r;
    cxd k2 = phid.qkernel(phr, r * zeta, psr);
    REQUIRE(std::abs(k1 - k2) < 1e-8 * std::abs(k1));
}

TEST_CASE("kernel at the trivial point and boundedness") {
    gamma_context ctx(0.7);
    dilog_evaluator phi(ctx);
    std::vector<cxd> zeros(2, cxd(0.0, 0.0)); // g = 0: two sites
    cxd k = phi.qkernel(zeros, cxd(0.0, 0.0), zeros);
    cxd p0 = phi.eval(cxd(0.0, 0.0));
    REQUIRE(std::abs(k - p0 * p0) < 1e-9 * std::abs(p0 * p0));

    REQUIRE_THROWS_AS(phi.qkernel({cxd(0.0, 0.0)}, cxd(0.0, 0.0), zeros), contract_violation);

    // |kernel| stays finite on random real arguments (oscillatory weight)
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<cxd> a(4), b(4);
        for (int i = 0; i < 4; ++i) {
            a[i] = cxd(U(rng), 0.0);
            b[i] = cxd(U(rng), 0.0);
        }
        cxd v = phi.qkernel(a, cxd(U(rng), 0.0), b);
        REQUIRE(std::isfinite(std::abs(v)));
    }
}

TEST_CASE("gamma context invariants") {
    gamma_context ctx(1.3);
    REQUIRE(std::abs(std::abs(ctx.q) - 1.0) < 1e-15);
    REQUIRE(std::abs(std::abs(ctx.q_dual) - 1.0) < 1e-15);
    gamma_context dd = ctx.dual().dual();
    REQUIRE(std::abs(dd.gamma - ctx.gamma) < 1e-12);
}
