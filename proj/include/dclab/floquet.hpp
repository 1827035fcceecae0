#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dclab/operator_core.hpp"

namespace dclab {

// Fundamental matrix of the periodic 2x2 system V' = M(t) V (V(0) = I)
// together with its sigma-derivative, integrated jointly. Stored matrices are
// rescaled: the true values are V[i] * exp(log_scale[i]) (renormalization
// keeps huge Floquet growth representable).
struct FundamentalMatrix {
    cplx sigma;
    double epsilon = 0.0;
    bool adjoint = false;
    std::vector<double> nodes;
    std::vector<Eigen::Matrix2cd> V;
    std::vector<Eigen::Matrix2cd> V_sigma;
    std::vector<double> log_scale;
};

struct Monodromy {
    cplx sigma;
    double epsilon = 0.0;
    Eigen::Matrix2cd B;        // rescaled; true B = B * exp(log_scale)
    Eigen::Matrix2cd B_sigma;  // same scaling
    double log_scale = 0.0;
    bool representable() const { return log_scale == 0.0; }
    Eigen::Matrix2cd B_plain() const { return std::exp(log_scale) * B; }
    Eigen::Matrix2cd B_sigma_plain() const { return std::exp(log_scale) * B_sigma; }
};

// M(t, sigma) of the direct system, or the adjoint-system matrix when
// adjoint = true (then sigma plays the role of the adjoint parameter mu)
Eigen::Matrix2cd coefficient_matrix(const OperatorSpec& spec, cplx sigma,
                                    double t, bool adjoint = false);

// integrate V and V_sigma over [0, 2*pi], reporting values at n_nodes
// equispaced nodes (n_nodes >= 2 includes both endpoints)
FundamentalMatrix fundamental_matrix(const OperatorSpec& spec, cplx sigma,
                                     double tol = 1e-10, int n_nodes = 129,
                                     bool adjoint = false);

Monodromy monodromy(const OperatorSpec& spec, cplx sigma, double tol = 1e-10,
                    bool adjoint = false);

// exact relation: the adjoint-system fundamental matrix at
// (mu, eps) = (-conj(sigma), -epsilon) is D conj(V) D with D = diag(1,-1)
FundamentalMatrix adjoint_transform(const FundamentalMatrix& V);

}  // namespace dclab
