#pragma once

#include <functional>
#include <vector>

#include "dclab/operator_core.hpp"
#include "dclab/periodic.hpp"

namespace dclab {

// Closed-form reference data for the single-harmonic coefficient
// c(t) = i c0 e^{ikt} with nu = 0: the exponents solve
//   sigma^2 - [(l_eps - conj(l_eps)) j + k conj(l_eps)] sigma
//            - [j (j-k) |l_eps|^2 + |c0|^2] = 0,
// with l_eps = a + i b eps, and the eigen-pair is
// phi = e^{ijt}, psi = D_j e^{i(j-k)t}, D_j = (l_eps j - sigma_j)/c0.
struct Example3Data {
    cplx sigma;  // selected root
    cplx D;
    PeriodicFunction phi, psi;
    cplx char_sigma;  // character exponent per the |D| rule
    int char_index;   // character winding index
    bool phi_dominant;
};

// branch_sign +1: principal (+sqrt) root; -1: the partner root
Example3Data example3(cplx lambda, cplx c0, int k, double epsilon, int j,
                      int branch_sign = +1);

// the OperatorSpec carrying c(t) = i c0 e^{ikt}, nu = 0
OperatorSpec example3_spec(cplx lambda, cplx c0, int k, double epsilon);

struct DecoupledValue {
    cplx sigma;        // root of the spectral function
    cplx char_sigma;   // character exponent (= lambda_eps (j + nu))
    int j;             // character index
    bool psi_family;   // true for the conj(psi)-dominant representation
};

// c == 0: roots lambda_eps (j+nu) (phi family) and conj values (psi family);
// both represent the same real solution space per index.
std::vector<DecoupledValue> decoupled_spectrum(cplx lambda, double nu,
                                               double epsilon, int j_min,
                                               int j_max);

// Radial solutions of P for beta = -ik_r (k_r the radial-form integer):
// u = log r (k_r = 0) or r^{2 a k_r}; the associated potential
// w = i B(t) or 2 i a k_r r^{2 a k_r} B(t), with B = e^{i k_r t}.
struct RadialOracle {
    int k = 0;
    PeriodicFunction B;
    std::function<cplx(double, double)> u;  // (r, t), real-valued
    std::function<cplx(double, double)> w;
};

RadialOracle radial_oracle(cplx lambda, int k);

}  // namespace dclab
