#pragma once

#include <utility>
#include <vector>

#include "dclab/spectrum.hpp"

namespace dclab {

// Periodic eigen-pair of the 2x2 system at exponent sigma, labeled by the
// winding index of the dominant component. For complex sigma the stored pair
// is always the phi-dominant representation (the conjugate root carries the
// same real solution space through (phi, psi) -> (conj psi, conj phi)), so
// character() is simply (sigma, j). For real sigma the one-real-dimensional
// solution is carried by f = phi + conj(psi), and w(r,t) = r^sigma f(t).
struct BasicSolution {
    cplx sigma;       // exponent of the stored representation
    int branch = +1;  // +1 or -1 (sets the normalization at t = 0)
    PeriodicFunction phi, psi;
    PeriodicFunction f;  // real-sigma case only: phi + conj(psi)
    int j = 0;           // winding index of the character
    bool phi_dominant = true;
    bool real_sigma = false;
    bool adjoint = false;  // pair solves the adjoint system (X, Z)
    double residual = 0.0;

    // w(r, t) (for the adjoint pair, the analogous v(r, t))
    cplx eval(double r, double t) const;
};

// Smallest-singular-direction extraction of the periodic eigen-pair from the
// band-limited Fourier collocation of the system, centered at the expected
// winding index. Normalization: branch + has phi(0) = 1, branch - has
// phi(0) = i (adjoint: X(0) = i resp. X(0) = 1). Double roots yield the two
// null directions split by the two normalizations.
BasicSolution basic_solution(const OperatorSpec& spec, const SpectralValue& sv,
                             int branch, double tol = 1e-10);

// total continuous argument increment / 2 pi, rounded; throws if some sample
// is below the threshold or the rounding defect exceeds 0.1
int winding_number(const PeriodicFunction& f, double threshold = 1e-10);

// (sigma, Ind of the dominant component); checks that the dominance is strict
// at every node when sigma is not real
std::pair<cplx, int> character(const BasicSolution& w);

// adjoint eigen-pair (X, Z) with character (-sigma, -j)
BasicSolution adjoint_basic_solution(const OperatorSpec& spec,
                                     const BasicSolution& w,
                                     double tol = 1e-10);

// large-|j| forms phi_j = e^{ijt}(1 + i k(t)/j), psi_j = -e^{ijt} conj(c)/(2aj)
std::pair<PeriodicFunction, PeriodicFunction> asymptotic_forms(
    const OperatorSpec& spec, int j);
// adjoint forms X_{-j} = e^{-ijt}(1 - i k(t)/j), Z_{-j} = -i e^{-ijt} c/(2aj)
std::pair<PeriodicFunction, PeriodicFunction> asymptotic_adjoint_forms(
    const OperatorSpec& spec, int j);
// the periodic phase correction k(t) entering the asymptotic forms
PeriodicFunction phase_correction(const OperatorSpec& spec);

// --- internal building block shared with the spectrum search ---

struct NullPair {
    PeriodicFunction phi, psi;
    double rel_singular_value = 0.0;
};

// null directions (up to 2) of the Fourier-collocated system at exponent
// sigma, window centered at j_center with half-width N (0 = automatic)
std::vector<NullPair> solve_null_pairs(const OperatorSpec& spec, cplx sigma,
                                       int j_center, int N = 0,
                                       bool adjoint = false);

// automatic window placement from the near-resonant frequencies of the two
// diagonal symbols (handles both the phi- and psi-dominant sides)
std::vector<NullPair> solve_null_pairs_auto(const OperatorSpec& spec,
                                            cplx sigma, bool adjoint = false);

}  // namespace dclab
