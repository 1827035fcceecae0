#include "dclab/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace dclab {

Example3Data example3(cplx lambda, cplx c0, int k, double epsilon, int j,
                      int branch_sign) {
    if (c0 == cplx(0.0)) throw std::invalid_argument("example3: c0 must be nonzero");
    const double a = lambda.real();
    const cplx le(a, lambda.imag() * epsilon);
    const cplx half_sum =
        cplx(0.0, 1.0) * le.imag() * static_cast<double>(j) +
        std::conj(le) * (static_cast<double>(k) / 2.0);
    const cplx root_arg =
        std::pow(a * j - std::conj(le) * (static_cast<double>(k) / 2.0), 2) +
        std::norm(c0);
    const cplx sq = std::sqrt(root_arg);
    Example3Data out;
    out.sigma = half_sum + (branch_sign >= 0 ? sq : -sq);
    out.D = (le * static_cast<double>(j) - out.sigma) / c0;
    out.phi = PeriodicFunction::harmonic(cplx(1.0), j);
    out.psi = PeriodicFunction::harmonic(out.D, j - k);
    out.phi_dominant = std::abs(out.D) < 1.0;
    if (out.phi_dominant) {
        out.char_sigma = out.sigma;
        out.char_index = j;
    } else {
        out.char_sigma = std::conj(out.sigma);
        out.char_index = k - j;
    }
    if (k % 2 != 0 && std::abs(std::abs(out.D) - 1.0) < 1e-10)
        throw std::runtime_error("example3: |D_j| = 1 with k odd (inconsistent)");
    return out;
}

OperatorSpec example3_spec(cplx lambda, cplx c0, int k, double epsilon) {
    OperatorSpec spec;
    spec.a = lambda.real();
    spec.b = lambda.imag();
    spec.nu = 0.0;
    spec.epsilon = epsilon;
    spec.c = PeriodicFunction::harmonic(cplx(0.0, 1.0) * c0, k);
    spec.validate();
    return spec;
}

std::vector<DecoupledValue> decoupled_spectrum(cplx lambda, double nu,
                                               double epsilon, int j_min,
                                               int j_max) {
    const cplx le(lambda.real(), lambda.imag() * epsilon);
    std::vector<DecoupledValue> out;
    for (int j = j_min; j <= j_max; ++j) {
        cplx s = le * (static_cast<double>(j) + nu);
        out.push_back({s, s, j, false});
        // psi family: root sigma = conj(le)(nu - m) has character
        // (le (nu - m), -m); with m = -j it lands on the same index
        out.push_back({std::conj(le) * (nu + static_cast<double>(j)), s, j, true});
    }
    return out;
}

RadialOracle radial_oracle(cplx lambda, int k) {
    RadialOracle out;
    out.k = k;
    const double a = lambda.real();
    out.B = PeriodicFunction::harmonic(cplx(1.0), k);
    if (k == 0) {
        out.u = [](double r, double) { return cplx(std::log(r), 0.0); };
        out.w = [B = out.B](double, double t) { return cplx(0.0, 1.0) * B.eval(t); };
    } else {
        const double p = 2.0 * a * k;
        out.u = [p](double r, double) { return cplx(std::pow(r, p), 0.0); };
        out.w = [p, B = out.B](double r, double t) {
            return cplx(0.0, p) * std::pow(r, p) * B.eval(t);
        };
    }
    return out;
}

}  // namespace dclab
