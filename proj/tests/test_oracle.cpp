#include "doctest.h"

#include <cmath>

#include "dclab/floquet.hpp"
#include "dclab/oracle.hpp"

using namespace dclab;

TEST_CASE("closed-form exponent solves its quadratic") {
    cplx lambda(1.0, 1.0);
    for (int k : {0, 1, 2, 3}) {
        for (cplx c0 : {cplx(0.3), cplx(1.0), cplx(2.0, 1.0)}) {
            for (double eps : {0.0, 0.5, 1.0}) {
                for (int j = -6; j <= 6; ++j) {
                    for (int sgn : {+1, -1}) {
                        auto d = example3(lambda, c0, k, eps, j, sgn);
                        cplx le(1.0, eps);
                        cplx sum = (le - std::conj(le)) * double(j) +
                                   double(k) * std::conj(le);
                        cplx prod = -(double(j) * double(j - k) * std::norm(le) +
                                      std::norm(c0));
                        cplx res = d.sigma * d.sigma - sum * d.sigma + prod;
                        CHECK(std::abs(res) < 1e-10 * std::max(1.0, std::norm(d.sigma)));
                    }
                }
            }
        }
    }
}

TEST_CASE("specific values: j=0, k=0, c0=1, lambda=1+i") {
    auto d = example3(cplx(1.0, 1.0), cplx(1.0), 0, 1.0, 0);
    CHECK(std::abs(d.sigma - cplx(1.0)) < 1e-14);
    CHECK(std::abs(d.D - cplx(-1.0)) < 1e-14);
}

TEST_CASE("k odd keeps |D_j| away from 1") {
    for (int k : {1, 3}) {
        for (int j = -8; j <= 8; ++j) {
            auto d = example3(cplx(1.0, 1.0), cplx(1.0), k, 1.0, j);
            CHECK(std::abs(std::abs(d.D) - 1.0) > 1e-8);
        }
    }
}

TEST_CASE("k = 2 j0 level formula") {
    cplx lambda(1.0, 0.5);
    cplx c0(0.9, 0.0);
    int j0 = 1;
    double eps = 1.0;
    auto d = example3(lambda, c0, 2 * j0, eps, j0);
    double b = lambda.imag();
    cplx expect = lambda.real() * double(j0) +
                  std::sqrt(cplx(-b * b * eps * eps * j0 * j0 + std::norm(c0)));
    CHECK(std::abs(d.sigma - expect) < 1e-12);
    CHECK(d.char_index == j0);
}

TEST_CASE("eigen-pair satisfies the periodic system") {
    cplx lambda(1.0, 1.0);
    auto spec = example3_spec(lambda, cplx(0.8, 0.3), 2, 0.7);
    auto d = example3(lambda, cplx(0.8, 0.3), 2, 0.7, 1);
    // (phi, psi)' = M(t) (phi, psi)
    PeriodicFunction dphi = d.phi.derivative(), dpsi = d.psi.derivative();
    for (double t : {0.0, 1.1, 3.9}) {
        Eigen::Matrix2cd M = coefficient_matrix(spec, d.sigma, t);
        cplx r1 = dphi.eval(t) - M(0, 0) * d.phi.eval(t) - M(0, 1) * d.psi.eval(t);
        cplx r2 = dpsi.eval(t) - M(1, 0) * d.phi.eval(t) - M(1, 1) * d.psi.eval(t);
        CHECK(std::abs(r1) < 1e-10);
        CHECK(std::abs(r2) < 1e-10);
    }
}

TEST_CASE("decoupled spectrum families") {
    auto vals = decoupled_spectrum(cplx(1.0, 1.0), 0.0, 1.0, -3, 3);
    CHECK(vals.size() == 14);
    for (auto& v : vals) {
        CHECK(std::abs(v.char_sigma - cplx(1.0, 1.0) * double(v.j)) < 1e-14);
    }
    // generic nu: families disjoint as roots
    auto vg = decoupled_spectrum(cplx(1.0, 1.0), 0.3, 1.0, -3, 3);
    for (auto& v1 : vg)
        for (auto& v2 : vg)
            if (v1.psi_family != v2.psi_family)
                CHECK(std::abs(v1.sigma - v2.sigma) > 1e-10);
}

TEST_CASE("radial oracle closed forms") {
    auto r0 = radial_oracle(cplx(1.0, 1.0), 0);
    CHECK(std::abs(r0.u(std::exp(1.0), 0.3) - cplx(1.0)) < 1e-14);
    auto r1 = radial_oracle(cplx(1.0, 1.0), 1);
    CHECK(std::abs(r1.u(2.0, 0.0) - cplx(4.0)) < 1e-12);
    CHECK(std::abs(r1.w(2.0, 0.5) -
                   cplx(0.0, 2.0) * 4.0 * std::exp(cplx(0.0, 0.5))) < 1e-12);
}
