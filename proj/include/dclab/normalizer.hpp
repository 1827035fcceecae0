#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dclab/periodic.hpp"

namespace dclab {

// Planar second-order operator with a point degeneracy at the origin:
//   D u = a11 u_xx + 2 a12 u_xy + a22 u_yy + a1 u_x + a2 u_y,
// real coefficients vanishing at 0, a11 >= 0 near 0, and discriminant
// a11 a22 - a12^2 comparable to (x^2 + y^2)^2 from above and below.
struct PlaneOperator {
    std::function<double(double, double)> a11, a12, a22;
    std::function<double(double, double)> a1, a2;  // null means zero
};

// Coefficients of D in polar coordinates,
//   D u = P u_tt + 2 N u_rt + M u_rr + Q u_r + T u_t,
// together with the normalized ratios after division by P.
struct PolarCoefficients {
    double P = 0, N = 0, M = 0, Q = 0, T = 0;
    double N1 = 0;  // N / (rho P)
    double M1 = 0;  // M / (rho^2 P)
    double Q1 = 0;  // Q / (rho P)
    double T1 = 0;  // T / P
};

// Evaluates the polar coefficients at a point. Throws when the angular
// coefficient P falls below the positivity floor (degeneracy bound violated).
PolarCoefficients polar_reduce(const PlaneOperator& op, double rho,
                               double theta);

// min / max over the sampled annulus of (a11 a22 - a12^2) / (x^2 + y^2)^2.
// Throws when the minimum is not positive.
std::pair<double, double> ellipticity_bounds(const PlaneOperator& op,
                                             double rho_min, double rho_max,
                                             int n_rho = 9, int n_theta = 64);

struct MuReport {
    cplx mu{0.0, 0.0};
    cplx lambda{0.0, 0.0};           // 1 / mu
    std::vector<cplx> circle_means;  // raw circle averages at rho0 / 2^m
    double drift = 0.0;              // gap between the last two extrapolants
};

// The invariant mu: the limit over shrinking circles of the average of
// A - iB, where A and B are the two coefficient ratios of the operator.
// Circle averages are taken at rho0 / 2^m, m = 0..levels-1, and extrapolated
// to rho -> 0 by a Richardson table. Throws when the sequence does not
// settle within tol, or when Re mu fails to be positive.
MuReport invariant_mu(const PlaneOperator& op, double rho0 = 0.1,
                      int levels = 4, int n_theta = 256, double tol = 1e-4);

// Data of the first-order factorization at one point:
//   X = d_theta - rho g d_rho,  g = N1 + i sqrt(M1 - N1^2),
//   f = -|g|^2 + X(conj g),
// and the coefficient Bcoef of the real symmetric form
//   2 D u / P = X Xbar u + Xbar X u + Bcoef X u + conj(Bcoef) Xbar u.
// Throws when M1 - N1^2 is not positive at the sample.
struct FirstOrderData {
    cplx g{0.0, 0.0};
    cplx f{0.0, 0.0};
    cplx Bcoef{0.0, 0.0};
};

FirstOrderData first_order_data(const PlaneOperator& op, double rho,
                                double theta);

// Full pipeline result: the invariant, the ellipticity constants, and the
// reduced polar / first-order data sampled on a (rho, theta) grid.
struct NormalizationReport {
    cplx mu{0.0, 0.0};
    cplx lambda{0.0, 0.0};
    double C1_est = 0.0, C2_est = 0.0;
    std::vector<double> rho_nodes;
    std::vector<double> theta_nodes;
    // [i][k] indexed by (rho_nodes[i], theta_nodes[k])
    std::vector<std::vector<double>> M1, N1, Q1, T1;
    std::vector<std::vector<cplx>> g, f, B;
    std::string notes;  // orientation / sign-convention observations
};

NormalizationReport normalize(const PlaneOperator& op, double rho_min,
                              double rho_max, int n_rho = 8, int n_theta = 32,
                              double rho0 = 0.1);

}  // namespace dclab
