#pragma once

#include "dclab/grid.hpp"
#include "dclab/periodic.hpp"

namespace dclab {

// Data of the first-order operator
//   Lop u = lambda_eps u_t - i r u_r + i lambda_eps nu u - c(t) conj(u),
// with lambda = a + i b (a > 0) and lambda_eps = a + i b eps.
struct OperatorSpec {
    double a = 1.0;
    double b = 0.0;
    double nu = 0.0;
    double epsilon = 1.0;
    PeriodicFunction c;

    cplx lambda() const { return cplx(a, b); }
    cplx lambda_eps() const { return cplx(a, b * epsilon); }
    void validate() const;
};

struct NormalFormResult {
    double nu = 0.0;
    PeriodicFunction m;
    PeriodicFunction c;
};

// Reduction of  lambda w_t - i r w_r + A(t) w + B(t) conj(w) = 0  to the
// normalized data (nu, m, c): the substitution w = m(t) u yields
//   lambda u_t - i r u_r + i lambda nu u + (Re A0 / ...) ... - c(t) conj(u),
// with nu in [0,1) (integer-average case mapped to nu = 0) and
// m(t) = exp(i(1+n)t + (1/lambda) int_0^t (A - A0)).
NormalFormResult reduce_to_normal_form(const PeriodicFunction& A,
                                       const PeriodicFunction& B, cplx lambda);

// first integral z_eps = r^{lambda_eps} e^{it}
cplx first_integral_map(const OperatorSpec& spec, double r, double t);
// inverse of the first-integral map (principal determination of t in [0,2*pi))
std::pair<double, double> first_integral_inverse(const OperatorSpec& spec, cplx z);

// grid application of the operator and its adjoint
CylinderFunction apply_Lop(const OperatorSpec& spec, const CylinderFunction& u);
// Lop* v = -(lambda_eps v_t - i r v_r - i lambda_eps nu v + conj(c) conj(v))
CylinderFunction apply_Lop_star(const OperatorSpec& spec, const CylinderFunction& v);
// plain vector fields L = lambda d_t - i r d_r and conj(L)
CylinderFunction apply_L(cplx lambda, const CylinderFunction& u);
CylinderFunction apply_Lbar(cplx lambda, const CylinderFunction& u);

// pairing <f,g> = Re double-int f g dr dt / r over the annulus rows [i0, i1]
double pairing(const CylinderFunction& f, const CylinderFunction& g, int i0,
               int i1);

// |Re contour-int_{dU} u v dz_eps/z_eps - (<u, Lop* v> - <Lop u, v>)|
// on the annulus r in [domain.r_min, domain.r_max] (grid rows inside)
double green_residual(const CylinderFunction& u, const CylinderFunction& v,
                      const OperatorSpec& spec, const CylinderDomain& domain);

}  // namespace dclab
