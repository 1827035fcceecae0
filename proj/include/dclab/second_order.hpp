#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dclab/cylinder_solver.hpp"

namespace dclab {

// The second-order operator
//   P = L Lbar + conj(lambda) beta(t) L + lambda conj(beta(t)) Lbar,
// with L = lambda d_t - i r d_r, together with the data of its first-order
// reduction: B = exp int_0^t conj(beta), periodic with Ind(B) = -k where
// k = (1/2 pi i) int beta dt, and the coefficient c = -conj(lambda) beta B /
// conj(B) of the associated operator  assoc w = L w - c(t) conj(w).
struct SecondOrderSpec {
    cplx lambda{1.0, 0.0};
    PeriodicFunction beta;
    int k = 0;
    PeriodicFunction B;
    PeriodicFunction c;
    OperatorSpec assoc;
};

// Builds all derived fields and verifies L B = lambda conj(beta) B and the
// equivalent form L B = -conj(c) B^2 / conj(B). Throws when the average of
// beta is not an integer multiple of i (the periodicity requirement on B).
SecondOrderSpec build_P(cplx lambda, const PeriodicFunction& beta,
                        double tol = 1e-8);

// grid application of P (spectral in t, finite differences in r)
CylinderFunction apply_P(const SecondOrderSpec& p, const CylinderFunction& u);

// L-potential w = B(t) Lbar u of a real-valued u
CylinderFunction l_potential(const SecondOrderSpec& p,
                             const CylinderFunction& u);

// Path integral u(r,t) = Re int w / B dzeta / (i a zeta) from the basepoint
// (snapped to the nearest grid node), taken along the t-segment first and the
// r-segment second. Path independence is verified against the swapped path;
// a closed-loop defect above tol * sup|w| throws (w is not an L-potential of
// any real function). The result recovers u up to an additive constant.
CylinderFunction reconstruct_u(const SecondOrderSpec& p,
                               const CylinderFunction& w, double r0, double t0,
                               double tol = 1e-4);

// The periodic functions entering the series representation of solutions of
// P u = 0: for a real exponent, q = (lambda / (i a sigma)) f / B; for a
// complex exponent the two real-independent combinations of phi / B and
// conj(psi) / conj(B). Throws for the exponent-zero level (its contribution
// is the additive constant of the series).
PeriodicFunction q_function(const SecondOrderSpec& p, const KernelContext& ctx,
                            int j, int branch);

struct PSeriesTerm {
    int j = 0;
    int branch = +1;
    double coef = 0.0;
};

// u0 + sum coef * Re[r^sigma q_{j}^{branch}(t)]; only terms with Re sigma > 0
// are admissible (anything else throws)
double p_series(const SecondOrderSpec& p, const KernelContext& ctx, double u0,
                const std::vector<PSeriesTerm>& terms, double r, double t);

// Closed-form radial solutions, present exactly when beta has the form
// (lambda / a) p(t) - i k with p real-valued of zero average. u carries the
// normalization C1 = 1, C2 = 0; w is the corresponding L-potential.
struct RadialSolutionForm {
    int k = 0;  // the radial-form integer (equals -spec.k)
    bool log_form = false;
    PeriodicFunction B;
    std::function<double(double)> u;        // u(r)
    std::function<cplx(double, double)> w;  // w(r, t)
};

std::optional<RadialSolutionForm> radial_solutions(const SecondOrderSpec& p,
                                                   double tol = 1e-8);

// Spectral hypothesis behind the maximum principle:
//   H1: Re sigma_j <= 0 implies j <= -k,
//   H2: the real parts of the spectrum are injective (equal real parts only
//       for equal exponents).
// The window is checked exhaustively; outside it the asymptotic form of the
// exponents is used with a safety factor 2 on the observed 1/j correction.
// Anything that cannot be certified yields `indeterminate`, never a pass.
enum class HVerdict { satisfied, violated, indeterminate };

struct HReport {
    HVerdict verdict = HVerdict::indeterminate;
    std::string witness;  // offending exponent(s), or the uncertified claim
};

HReport hypothesis_H_check(const SecondOrderSpec& p, const KernelContext& ctx,
                           double tol = 1e-9);

// Solves P u = F (F real-valued) through the reduction: the inner solve
// produces W with assoc W = B F and W(0,t) = 0 (neutral levels trimmed, or
// the level-shifted kernels when opt.mode == modified), and
//   u(r,t) = Re[(lambda / i a) int_0^1 W(s r, t) / B(t) ds / s].
// The report's solution vanishes on the characteristic circle; residual is
// the interior grid maximum of |P u - F|.
SolveReport solve_K(const SecondOrderSpec& p, const KernelContext& ctx,
                    const CylinderFunction& F, double R,
                    const SolveOptions& opt = {});

// Right side data of the semilinear problem
//   P v = r^eps Re[ v f0 + (Lv) f1 + conj(Lv) f2
//                   + |v|^{1+alpha} g1 + |Lv|^{1+alpha} g2 ],
// with f* bounded functions of (r, t) and g* bounded functions of
// (r, t, v, Lv).
struct PSemilinearData {
    std::function<cplx(double, double)> f0, f1, f2;
    std::function<cplx(double, double, double, cplx)> g1, g2;
    double alpha = 1.0;
};

// Picard iteration v <- u0 + K_j(r^eps Re H(r,t,v,Lv)) with the level-shifted
// kernels at the order of the seed (opt.mode must be `modified` with opt.j0 /
// opt.branch set accordingly). Reports the similarity ratio range
// sim_lo <= |v / u0| <= sim_hi over the grid.
SolveReport p_semilinear_solve(const SecondOrderSpec& p,
                               const KernelContext& ctx,
                               const PSemilinearData& H, double eps,
                               const CylinderFunction& u0, double R,
                               const SolveOptions& opt = {});

}  // namespace dclab
