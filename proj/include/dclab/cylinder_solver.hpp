#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dclab/kernels.hpp"

namespace dclab {

// Real coefficients of the series u = sum a_j^± w_j^± recovered from the
// circle pairing with the dual-normalized adjoint solutions.
struct LaurentExpansion {
    int J = 0;
    std::vector<double> a_plus, a_minus;  // index j + J
    // max coefficient discrepancy between the two probe radii; small for
    // genuine solutions of the homogeneous equation
    double r0_dependence = 0.0;
    bool solution_like = true;

    double coef(int j, int branch) const;
};

// a_j^± = (-1/2pi) Re int w*_{-j}^±(R0, theta) u(R0, theta) i dtheta,
// trapezoid on the grid row closest to R0 (and re-checked on a second row)
LaurentExpansion laurent_coefficients(const KernelContext& ctx,
                                      const CylinderFunction& u, double R0,
                                      int J, double tol = 1e-8);

// sum a_j^± w_j^±(r, t); bounded_only restricts to Re sigma >= 0 terms.
// r = 0 demands every carried exponent to have Re sigma >= 0 (pole error
// otherwise); terms with Re sigma > 0 vanish there.
cplx laurent_evaluate(const KernelContext& ctx, const LaurentExpansion& ex,
                      double r, double t, bool bounded_only = false);

// boundary circle rho = const sampled at M uniform angles; outer selects the
// orientation (outer boundary counterclockwise)
struct BoundaryCircle {
    double rho = 1.0;
    bool outer = true;
    std::vector<cplx> u;
};

// u(r,t) = (-1/2pi) int_{boundary} Omega_1 u dzeta/zeta
//   + conj(Omega_2) conj(u) dconj(zeta)/conj(zeta)
cplx cauchy_integral(const KernelContext& ctx,
                     const std::vector<BoundaryCircle>& boundary, double r,
                     double t);

enum class TMode { plain, hat, modified };

struct SolveOptions {
    TMode mode = TMode::plain;
    int j0 = 0;       // modified mode: level of the shift
    int branch = +1;  // modified mode: branch of the shift
    int band_cells = 4;  // half-width (in cells) of the near-diagonal band
    int polar_angular = 32;
    int polar_radial = 64;
    bool parallel = true;   // separable fast path (serial reference otherwise)
    double p_exponent = 0;  // 0 = max(2/(1-nu) + 1, 3)
    double tol = 1e-8;
    int max_iter = 40;
};

struct SolveReport {
    CylinderFunction solution;
    double residual = 0.0;  // interior max of |L u - F| (or the semilinear rhs)
    int iterations = 0;
    double bound_check = 0.0;  // observed max|u| / ||F||_{p,a}
    double norm_pa = 0.0;
    std::vector<cplx> value_at_S0;  // limit values on the characteristic circle
    double sim_lo = 0.0, sim_hi = 0.0;  // similarity ratio range (semilinear)
    bool flagged = false;
    std::string message;
};

// ||F||_{p,a} = (integral |F/r^a|^p r^{2a-1} dr dt)^{1/p} on the grid
double norm_pa(const OperatorSpec& spec, const CylinderFunction& F, double p);

// TF(r,t) = (-1/2pi) integral [Omega_1(r,t,zeta) F(zeta)
//   + conj(Omega_2(r,t,zeta)) conj(F(zeta))] drho dtheta / rho
// over the annulus carried by the grid of F (understood as A(0, R) with the
// part below the lowest grid radius carrying no mass). Solves L TF = F.
SolveReport solve_T(const KernelContext& ctx, const CylinderFunction& F,
                    double R, const SolveOptions& opt = {});

// Picard iteration v <- u0 + T(r^tau |v| G(v, r, t)); in modified mode uses
// the level-shifted kernels of opt.j0 and reports the similarity ratio
// |v / u0| range
SolveReport semilinear_solve(const KernelContext& ctx,
                             const std::function<cplx(cplx, double, double)>& G,
                             double tau, const CylinderFunction& u0, double R,
                             const SolveOptions& opt = {});

// Continuity across the characteristic circle for solutions on both sides:
// Re int g^±(theta) u(delta, theta) dtheta must agree between the two sides,
// with g^± the exponent-zero adjoint solutions. True with no test when the
// spectrum misses i R entirely.
bool patch_check(const KernelContext& ctx, const CylinderFunction& u_minus,
                 const CylinderFunction& u_plus, double delta,
                 double tol = 1e-8);

}  // namespace dclab
