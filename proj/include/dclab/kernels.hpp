#pragma once

#include <vector>

#include "dclab/basic_solutions.hpp"

namespace dclab {

// One level of the kernel series: the two real-independent basic solutions
// of the level together with their adjoint partners, the latter recombined
// (real coefficients) so that the pairing
//     Re \int_0^{2pi} w_a(1, t) w*_b(1, t) i dt = -2 pi delta_ab
// holds exactly. The kernel sums are invariant under a real change of basis
// with dually adjusted adjoints, so this normalization pins them down.
struct BasicPair {
    int j = 0;
    BasicSolution w_plus, w_minus;    // forward solutions
    BasicSolution ws_plus, ws_minus;  // dual-normalized adjoints
    bool real_pair = false;           // two distinct real exponents
};

struct KernelContext {
    OperatorSpec spec;
    SpectrumWindow window;  // covers |j| <= J completely
    int J = 0;              // truncation order
    double eta = 1e-3;      // half-width of the diagonal band |log(r/rho)|
    double tail_tol = 1e-8;
    std::vector<BasicPair> pairs;  // j = -J .. J
    PeriodicFunction k_phase;      // cached phase correction k(t)

    const BasicPair& at(int j) const;
};

// Builds the spectrum window on [-J, J], solves all basic solutions and
// adjoints, and dual-normalizes the adjoints. Throws if the window is
// incomplete or a pairing Gram matrix is singular.
KernelContext make_kernel_context(const OperatorSpec& spec, int J,
                                  double tol = 1e-10, double eta = 1e-3);

struct KernelValue {
    cplx omega1{}, omega2{};
    cplx singular_part{};   // singular part of omega1 (decomposed path)
    cplx remainder{};       // C1 = omega1 - singular_part
    cplx singular_part2{};  // singular part of omega2
    cplx remainder2{};      // C2 = omega2 - singular_part2
    bool r_less = true;     // regime r < rho
    bool decomposed = false;
    double tail_bound = 0.0;
    bool tail_warning = false;
};

// Raw series evaluation: half the sum of the branch products over the levels
// with Re sigma >= 0 (r < rho) resp. minus the sum over Re sigma < 0
// (r > rho). Throws inside the diagonal band |log(r/rho)| < eta.
KernelValue kernel_omega(const KernelContext& ctx, double r, double t,
                         double rho, double theta);

// Singular-part decomposition: omega1 = i (r/rho)^{lambda nu} [zeta/(zeta-z)
// + i K(t,theta) L(z,zeta)] + C1 and the analogous split of omega2, with the
// remainders summed as termwise differences of order j^{-2}; stable near the
// diagonal. Throws only at z = zeta exactly.
KernelValue kernel_decomposed(const KernelContext& ctx, double r, double t,
                              double rho, double theta);

// Modified kernels: the level sums split at Re sigma_j >= Re sigma_{j0} of
// the chosen branch, decomposed with the prefactor
// i (r/rho)^{sigma_{j0}} e^{i j0 (t-theta)} on the singular part.
KernelValue modified_kernels(const KernelContext& ctx, int j0, int branch,
                             double r, double t, double rho, double theta);

// Raw kernels with the finitely many terms whose exponents lie on the
// imaginary axis removed; well defined (and zero) at r = 0.
KernelValue hat_kernels(const KernelContext& ctx, double r, double t,
                        double rho, double theta);

// K(t, theta) = k(t) - k(theta) and the principal-branch logarithm
// L = log(zeta/(zeta-z)) (r < rho) resp. log(z/(z-zeta)) (r > rho)
cplx kernel_K(const KernelContext& ctx, double t, double theta);
cplx kernel_L(const OperatorSpec& spec, double r, double t, double rho,
              double theta);

// pairing Re \int_0^{2pi} w(1,t) v(1,t) i dt of two basic solutions
double solution_pairing(const BasicSolution& w, const BasicSolution& v);

}  // namespace dclab
