#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "dclab/oracle.hpp"
#include "dclab/second_order.hpp"

using namespace dclab;

namespace {

const cplx I(0.0, 1.0);
const cplx LAM(1.0, 0.5);

const SecondOrderSpec& p_free() {  // beta = 0: P = L Lbar, c = 0
    static SecondOrderSpec p = build_P(LAM, PeriodicFunction::zero());
    return p;
}
const SecondOrderSpec& p_rad() {  // beta = -i: the rotating radial case
    static SecondOrderSpec p =
        build_P(LAM, PeriodicFunction::constant(cplx(0.0, -1.0)));
    return p;
}
const KernelContext& ctx_free() {
    static KernelContext ctx = make_kernel_context(p_free().assoc, 12);
    return ctx;
}
const KernelContext& ctx_rad() {
    static KernelContext ctx = make_kernel_context(p_rad().assoc, 12);
    return ctx;
}

// analytic manufactured profile (smooth, concentrated inside the annulus)
double gb(double s) {
    double x = (s + 1.15) / 0.35;
    return std::exp(-x * x);
}
double gdb(double s) {
    double x = (s + 1.15) / 0.35;
    return -2.0 * x / 0.35 * std::exp(-x * x);
}
double gd2b(double s) {
    double x = (s + 1.15) / 0.35;
    return (4.0 * x * x - 2.0) / (0.35 * 0.35) * std::exp(-x * x);
}

}  // namespace

TEST_CASE("reduction data from the angular coefficient") {
    const SecondOrderSpec& p0 = p_free();
    CHECK(p0.k == 0);
    CHECK(std::abs(p0.B.eval(1.3) - 1.0) < 1e-12);
    CHECK(p0.c.sup_norm() < 1e-12);
    CHECK(p0.assoc.a == doctest::Approx(LAM.real()));
    CHECK(p0.assoc.b == doctest::Approx(LAM.imag()));

    const SecondOrderSpec& pr = p_rad();
    CHECK(pr.k == -1);
    // B = e^{it}: a single winding, so the index of B is +1
    for (double t : {0.0, 1.1, 4.4})
        CHECK(std::abs(pr.B.eval(t) - std::exp(I * t)) < 1e-10);
    CHECK(std::abs(pr.c.coef(2) - I * std::conj(LAM)) < 1e-10);
    CHECK(std::abs(pr.c.coef(0)) < 1e-12);

    // both displayed equations for B, sampled independently
    for (const SecondOrderSpec* p : {&p0, &pr}) {
        PeriodicFunction dB = p->B.derivative();
        for (int k = 0; k < 32; ++k) {
            double t = TWO_PI * k / 32.0;
            cplx LB = p->lambda * dB.eval(t);
            cplx Bv = p->B.eval(t);
            CHECK(std::abs(LB - p->lambda * std::conj(p->beta.eval(t)) * Bv) <
                  1e-9);
            CHECK(std::abs(LB + std::conj(p->c.eval(t)) * Bv * Bv /
                                    std::conj(Bv)) < 1e-9);
        }
    }

    // a non-integer average makes B aperiodic: rejected
    CHECK_THROWS_AS(build_P(LAM, PeriodicFunction::constant(cplx(0.0, 0.3))),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_P(cplx(-1.0, 0.0), PeriodicFunction::zero()),
                    std::invalid_argument);
}

TEST_CASE("potential of a field and its reconstruction") {
    const SecondOrderSpec& p = p_rad();
    auto radii = CylinderFunction::log_radii(0.1, 1.0, 48);
    const int M = 24;
    const double e = 2.0 * LAM.real();

    // a constant has no potential
    CylinderFunction c1 = CylinderFunction::from_function(
        radii, M, [](double, double) { return cplx(2.0, 0.0); });
    CHECK(l_potential(p, c1).max_abs() < 1e-10);

    // the radial solution r^{2a} has the closed-form potential 2ia r^{2a} B
    CylinderFunction ur = CylinderFunction::from_function(
        radii, M, [&](double r, double) { return cplx(std::pow(r, e), 0.0); });
    CylinderFunction wr = l_potential(p, ur);
    double werr = 0.0;
    for (int i = 2; i < 46; ++i)
        for (int k = 0; k < M; ++k) {
            cplx expect = I * e * std::pow(radii[(size_t)i], e) *
                          p.B.eval(wr.t(k));
            werr = std::max(werr, std::abs(wr.at(i, k) - expect));
        }
    CHECK(werr < 1e-4 * wr.max_abs());

    // reconstruction of the radial pair recovers r^{2a} up to the constant
    CylinderFunction wexact = CylinderFunction::from_function(
        radii, M, [&](double r, double t) {
            return I * e * std::pow(r, e) * p.B.eval(t);
        });
    CylinderFunction urec = reconstruct_u(p, wexact, 0.1, 0.0);
    double rerr = 0.0;
    for (int i = 0; i < 48; ++i)
        for (int k = 0; k < M; ++k) {
            double expect = std::pow(radii[(size_t)i], e) - std::pow(0.1, e);
            rerr = std::max(rerr,
                            std::abs(urec.at(i, k) - cplx(expect, 0.0)));
        }
    CHECK(rerr < 1e-4);

    // round trip through an arbitrary smooth real field
    auto g = [](double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); };
    CylinderFunction u = CylinderFunction::from_function(
        radii, M, [&](double r, double t) {
            return cplx(gb(std::log(r)) * g(t), 0.0);
        });
    // the difference-stencil error of the potential dominates the loop defect
    CylinderFunction w = l_potential(p, u);
    CylinderFunction ur2 = reconstruct_u(p, w, 0.1, 0.0, 1e-3);
    double base = u.at(0, 0).real();
    double derr = 0.0;
    for (int i = 0; i < 48; ++i)
        for (int k = 0; k < M; ++k)
            derr = std::max(derr, std::abs(ur2.at(i, k) -
                                           (u.at(i, k) - cplx(base, 0.0))));
    CHECK(derr < 1e-3 * u.max_abs());
    CHECK(l_potential(p, ur2).max_diff(w) < 1e-2 * w.max_abs());

    // a field that is not curl-free in the path sense is rejected
    CylinderFunction notpot = CylinderFunction::from_function(
        radii, M, [&](double r, double t) {
            return p.B.eval(t) * I * std::log(r) * std::sin(t);
        });
    CHECK_THROWS_AS(reconstruct_u(p, notpot, 0.1, 0.0), std::runtime_error);

    // the zero potential reconstructs the zero function
    CylinderFunction z = CylinderFunction::zeros(radii, M);
    CHECK(reconstruct_u(p, z, 0.1, 0.0).max_abs() == 0.0);
}

TEST_CASE("angular factors of the series representation") {
    // with c = 0 and B = 1 the factor collapses to e^{ijt} / (i a j)
    const SecondOrderSpec& p0 = p_free();
    const double a = LAM.real();
    for (int j : {1, 3, -2}) {
        PeriodicFunction q = q_function(p0, ctx_free(), j, +1);
        double err = 0.0;
        for (int k = 0; k < 32; ++k) {
            double t = TWO_PI * k / 32.0;
            err = std::max(err, std::abs(q.eval(t) -
                                         std::exp(I * double(j) * t) /
                                             (I * a * double(j))));
        }
        CHECK(err < 1e-8);
    }

    // the exponent-zero level has no series factor
    CHECK_THROWS_AS(q_function(p0, ctx_free(), 0, +1), std::domain_error);
    CHECK_THROWS_AS(q_function(p_rad(), ctx_rad(), 1, -1), std::domain_error);

    // asymptotic form e^{ijt} / (i a j B) with an O(j^-2) gap
    auto gap = [&](int j) {
        PeriodicFunction q = q_function(p_rad(), ctx_rad(), j, +1);
        double err = 0.0;
        for (int k = 0; k < 64; ++k) {
            double t = TWO_PI * k / 64.0;
            err = std::max(err,
                           std::abs(q.eval(t) -
                                    std::exp(I * double(j) * t) /
                                        (I * a * double(j) *
                                         p_rad().B.eval(t))));
        }
        return err;
    };
    double g6 = gap(6), g12 = gap(12);
    CHECK(g12 < 0.05);
    CHECK(g6 > 2.5 * g12);

    // the radial level reproduces a pure power of r
    const SecondOrderSpec& pr = p_rad();
    int br = std::abs(ctx_rad().at(1).w_plus.sigma.real() - 2.0 * a) < 1e-6
                 ? +1
                 : -1;
    double v1 = p_series(pr, ctx_rad(), 0.3, {{1, br, 0.7}}, 0.5, 1.0);
    double v2 = p_series(pr, ctx_rad(), 0.3, {{1, br, 0.7}}, 0.5, 2.7);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-10));  // radial: t-independent
    double w1 = p_series(pr, ctx_rad(), 0.3, {{1, br, 0.7}}, 0.25, 1.0);
    CHECK((w1 - 0.3) / (v1 - 0.3) ==
          doctest::Approx(std::pow(0.5, 2.0 * a)).epsilon(1e-8));
    // positive-order terms vanish on the circle itself
    CHECK(p_series(pr, ctx_rad(), 0.3, {{1, br, 0.7}}, 0.0, 1.0) ==
          doctest::Approx(0.3));

    // coefficients below the admissible orders are rejected
    CHECK_THROWS_AS(p_series(p0, ctx_free(), 0.0, {{-1, +1, 1.0}}, 0.5, 0.0),
                    std::invalid_argument);

    // an evaluated series is annihilated by the operator
    auto radii = CylinderFunction::log_radii(0.2, 1.0, 48);
    PeriodicFunction q1 = q_function(p0, ctx_free(), 1, +1);
    PeriodicFunction q2 = q_function(p0, ctx_free(), 2, -1);
    cplx s1 = ctx_free().at(1).w_plus.sigma;
    cplx s2 = ctx_free().at(2).w_minus.sigma;
    CylinderFunction us = CylinderFunction::from_function(
        radii, 24, [&](double r, double t) {
            cplx acc = 0.2;
            acc += 0.6 * (std::exp(s1 * std::log(r)) * q1.eval(t)).real();
            acc += 0.4 * (std::exp(s2 * std::log(r)) * q2.eval(t)).real();
            return cplx(acc.real(), 0.0);
        });
    CylinderFunction Pu = apply_P(p0, us);
    double presid = 0.0;
    for (int i = 2; i < 46; ++i)
        for (int k = 0; k < 24; ++k)
            presid = std::max(presid, std::abs(Pu.at(i, k)));
    CHECK(presid < 1e-3 * us.max_abs());

    // the potential of a single-term series carries a single level
    CylinderFunction u1 = CylinderFunction::from_function(
        CylinderFunction::log_radii(0.25, 1.0, 24), 32,
        [&](double r, double t) {
            return cplx(
                0.8 * (std::exp(s2 * std::log(r)) * q2.eval(t)).real(), 0.0);
        });
    CylinderFunction w2 = l_potential(p0, u1);
    LaurentExpansion ex = laurent_coefficients(ctx_free(), w2, 0.5, 4, 1e-3);
    double c2 = std::max(std::abs(ex.coef(2, +1)), std::abs(ex.coef(2, -1)));
    CHECK(c2 > 1e-3);
    for (int j = -4; j <= 4; ++j) {
        if (j == 2) continue;
        CHECK(std::abs(ex.coef(j, +1)) < 1e-3 * c2);
        CHECK(std::abs(ex.coef(j, -1)) < 1e-3 * c2);
    }
}

TEST_CASE("closed-form radial solutions") {
    // beta = 0: the logarithmic pair
    auto f0 = radial_solutions(p_free());
    REQUIRE(f0.has_value());
    CHECK(f0->k == 0);
    CHECK(f0->log_form);
    CHECK(f0->u(0.5) == doctest::Approx(std::log(0.5)));
    CHECK(std::abs(f0->w(0.5, 1.0) - I) < 1e-10);

    // beta = -i: the power pair, matching the closed-form reference
    auto fr = radial_solutions(p_rad());
    REQUIRE(fr.has_value());
    CHECK(fr->k == 1);
    CHECK_FALSE(fr->log_form);
    RadialOracle ro = radial_oracle(LAM, 1);
    for (double r : {0.3, 0.8})
        for (double t : {0.5, 2.0}) {
            CHECK(std::abs(fr->u(r) - ro.u(r, t)) < 1e-10);
            CHECK(std::abs(fr->w(r, t) - ro.w(r, t)) < 1e-10);
        }

    // the power is genuinely a null solution of P
    auto radii = CylinderFunction::log_radii(0.1, 1.0, 32);
    CylinderFunction ur = CylinderFunction::from_function(
        radii, 16, [&](double r, double) { return cplx(fr->u(r), 0.0); });
    CylinderFunction Pu = apply_P(p_rad(), ur);
    double resid = 0.0;
    for (int i = 2; i < 30; ++i)
        for (int k = 0; k < 16; ++k)
            resid = std::max(resid, std::abs(Pu.at(i, k)));
    // the two nested radial difference stencils compound: second order overall
    CHECK(resid < 2e-3 * ur.max_abs());

    // a real multiple of lambda plus the winding term also qualifies
    SecondOrderSpec pp = build_P(
        LAM, PeriodicFunction::from_function([&](double t) {
            return LAM / LAM.real() * std::cos(t) - I;
        }));
    auto fp = radial_solutions(pp);
    REQUIRE(fp.has_value());
    CHECK(fp->k == 1);

    // an angular coefficient outside the radial family yields nothing
    SecondOrderSpec pn = build_P(LAM, PeriodicFunction::from_function([](double t) {
                              return I * std::cos(t);
                          }));
    CHECK_FALSE(radial_solutions(pn).has_value());
}

TEST_CASE("spectral hypothesis verdicts") {
    // c == 0 with a fractional winding offset: every exponent obeys both parts
    static KernelContext ctx_nu = [] {
        OperatorSpec s;
        s.a = LAM.real();
        s.b = LAM.imag();
        s.nu = 0.3;
        s.epsilon = 1.0;
        return make_kernel_context(s, 8);
    }();
    HReport ok = hypothesis_H_check(p_free(), ctx_nu);
    CHECK(ok.verdict == HVerdict::satisfied);

    // the rotating radial case: a negative-order exponent at a high winding
    HReport bad = hypothesis_H_check(p_rad(), ctx_rad());
    CHECK(bad.verdict == HVerdict::violated);
    CHECK(bad.witness.find("H1") != std::string::npos);

    // a window too small for the asymptotic tail certificate stays open:
    // strong coupling keeps the 1/j correction comparable to the level gap
    SecondOrderSpec pk = build_P(LAM, PeriodicFunction::constant(cplx(0, 2)));
    KernelContext narrow =
        make_kernel_context(example3_spec(LAM, cplx(1.2, 0.4), 2, 0.7), 2);
    HReport ind = hypothesis_H_check(pk, narrow);
    CHECK(ind.verdict == HVerdict::indeterminate);
    CHECK_FALSE(ind.witness.empty());
}

TEST_CASE("inverting the second-order operator") {
    const SecondOrderSpec& p = p_rad();
    const double aa = LAM.real(), bi = LAM.imag(), l2 = std::norm(LAM);
    auto g = [](double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); };
    auto gp = [](double t) {
        return -2.0 * std::sin(2.0 * t) + 0.3 * std::cos(t);
    };
    auto gpp = [](double t) {
        return -4.0 * std::cos(2.0 * t) - 0.3 * std::sin(t);
    };
    auto uf = [&](double r, double t) {
        return cplx(gb(std::log(r)) * g(t), 0.0);
    };
    // P u for beta = -i, expanded in s = log r
    auto Ff = [&](double r, double t) {
        double s = std::log(r);
        return cplx(l2 * gb(s) * gpp(t) - 2.0 * bi * gdb(s) * gp(t) +
                        gd2b(s) * g(t) - 2.0 * aa * gdb(s) * g(t),
                    0.0);
    };

    double e32 = 0.0, e64 = 0.0;
    for (int P : {32, 64}) {
        auto radii = CylinderFunction::log_radii(0.1, 1.0, P);
        CylinderFunction u = CylinderFunction::from_function(radii, 24, uf);
        CylinderFunction F = CylinderFunction::from_function(radii, 24, Ff);
        SolveReport rep = solve_K(p, ctx_rad(), F, 1.0, {});
        double rel = rep.solution.max_diff(u) / u.max_abs();
        (P == 32 ? e32 : e64) = rel;
        CHECK(rep.residual < 2e-2 * F.max_abs());
        CHECK_FALSE(rep.flagged);
        for (cplx v : rep.value_at_S0) CHECK(std::abs(v) == 0.0);
        // the solution vanishes toward the characteristic circle
        double bot = 0.0;
        for (int k = 0; k < 24; ++k)
            bot = std::max(bot, std::abs(rep.solution.at(0, k)));
        CHECK(bot < 1e-3 * u.max_abs());
    }
    CHECK(e32 < 1.5e-2);
    CHECK(e64 < 6e-3);
    CHECK(e32 > 1.5 * e64);

    // zero data
    auto radii = CylinderFunction::log_radii(0.1, 1.0, 16);
    SolveReport z =
        solve_K(p, ctx_rad(), CylinderFunction::zeros(radii, 12), 1.0, {});
    CHECK(z.solution.max_abs() == 0.0);
}

TEST_CASE("similarity for the perturbed second-order equation") {
    const SecondOrderSpec& p = p_rad();
    const double e = 2.0 * LAM.real();
    auto radii = CylinderFunction::log_radii(0.02, 0.4, 32);
    CylinderFunction u0 = CylinderFunction::from_function(
        radii, 16, [&](double r, double) { return cplx(std::pow(r, e), 0.0); });

    SolveOptions mo;
    mo.mode = TMode::modified;
    mo.j0 = 1;
    mo.branch =
        std::abs(ctx_rad().at(1).w_plus.sigma.real() - e) < 1e-6 ? +1 : -1;

    // vanishing right side returns the seed
    PSemilinearData H0;
    SolveReport r0 = p_semilinear_solve(p, ctx_rad(), H0, 0.5, u0, 0.4, mo);
    CHECK(r0.iterations == 1);
    CHECK(r0.solution.max_diff(u0) == 0.0);

    // a bounded linear term: the iterate stays similar to the seed
    PSemilinearData H;
    H.f0 = [](double, double) { return cplx(1.0, 0.0); };
    SolveReport r1 = p_semilinear_solve(p, ctx_rad(), H, 0.5, u0, 0.4, mo);
    CHECK(r1.iterations < 40);
    CHECK_FALSE(r1.flagged);
    CHECK(r1.residual < 1e-3);
    CHECK(r1.solution.max_diff(u0) > 0.0);
    CHECK(r1.sim_lo > 0.3);
    CHECK(r1.sim_hi < 2.0);
    CHECK(r1.sim_lo <= r1.sim_hi);

    // guard rails
    CHECK_THROWS_AS(p_semilinear_solve(p, ctx_rad(), H, 0.0, u0, 0.4, mo),
                    std::invalid_argument);
    PSemilinearData Hb = H;
    Hb.alpha = 0.0;
    CHECK_THROWS_AS(p_semilinear_solve(p, ctx_rad(), Hb, 0.5, u0, 0.4, mo),
                    std::invalid_argument);
    SolveOptions plain;
    CHECK_THROWS_AS(p_semilinear_solve(p, ctx_rad(), H, 0.5, u0, 0.4, plain),
                    std::invalid_argument);
}

TEST_CASE("series solutions respect the maximum principle") {
    // with the hypothesis satisfied, extreme values sit on the outer circle
    const SecondOrderSpec& p0 = p_free();
    PeriodicFunction q1 = q_function(p0, ctx_free(), 1, +1);
    PeriodicFunction q2 = q_function(p0, ctx_free(), 2, -1);
    cplx s1 = ctx_free().at(1).w_plus.sigma;
    cplx s2 = ctx_free().at(2).w_minus.sigma;
    const double u0 = 0.2;

    auto radii = CylinderFunction::log_radii(1e-3, 1.0, 32);
    double gmin = 1e300, gmax = -1e300, omin = 1e300, omax = -1e300;
    for (int i = 0; i < 32; ++i)
        for (int k = 0; k < 24; ++k) {
            double r = radii[(size_t)i], t = TWO_PI * k / 24.0;
            double v = u0 +
                       0.6 * (std::exp(s1 * std::log(r)) * q1.eval(t)).real() +
                       0.4 * (std::exp(s2 * std::log(r)) * q2.eval(t)).real();
            gmin = std::min(gmin, v);
            gmax = std::max(gmax, v);
            if (i == 31) {
                omin = std::min(omin, v);
                omax = std::max(omax, v);
            }
        }
    CHECK(gmax == doctest::Approx(omax));
    CHECK(gmin == doctest::Approx(omin));
    // the circle value is strictly inside the range
    CHECK(u0 > gmin + 1e-3);
    CHECK(u0 < gmax - 1e-3);
}

TEST_CASE("potentials of continuous solutions vanish on the circle") {
    const SecondOrderSpec& p0 = p_free();
    PeriodicFunction q2 = q_function(p0, ctx_free(), 2, +1);
    cplx s2 = ctx_free().at(2).w_plus.sigma;
    auto radii = CylinderFunction::log_radii(1e-3, 0.5, 48);
    CylinderFunction u = CylinderFunction::from_function(
        radii, 16, [&](double r, double t) {
            return cplx(
                (std::exp(s2 * std::log(r)) * q2.eval(t)).real(), 0.0);
        });
    CylinderFunction w = l_potential(p0, u);
    double bot = 0.0;
    for (int k = 0; k < 16; ++k) bot = std::max(bot, std::abs(w.at(0, k)));
    CHECK(bot < 1e-2 * w.max_abs());
}
