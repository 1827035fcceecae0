#pragma once

#include <functional>
#include <vector>

#include "dclab/periodic.hpp"

namespace dclab {

// Complex samples on a tensor grid (r_i, t_k), r in (0, R], t_k = 2*pi*k/M.
// Radii are expected strictly increasing; most solvers build them log-spaced.
struct CylinderFunction {
    std::vector<double> radii;  // size P
    int M = 0;
    std::vector<cplx> values;  // row-major P x M

    int P() const { return static_cast<int>(radii.size()); }
    cplx& at(int i, int k) { return values[static_cast<size_t>(i) * M + k]; }
    const cplx& at(int i, int k) const {
        return values[static_cast<size_t>(i) * M + k];
    }
    double t(int k) const { return TWO_PI * k / M; }

    static std::vector<double> log_radii(double rmin, double rmax, int P);
    static CylinderFunction zeros(std::vector<double> radii, int M);
    static CylinderFunction from_function(
        std::vector<double> radii, int M,
        const std::function<cplx(double, double)>& f);

    // spectral derivative in t, row by row
    CylinderFunction dt() const;
    // derivative in s = log r (equals r * d/dr), 5-point finite differences
    CylinderFunction ds() const;
    CylinderFunction conjugated() const;
    double max_abs() const;
    // max |difference| on common grid
    double max_diff(const CylinderFunction& o) const;

    CylinderFunction& operator+=(const CylinderFunction& o);
    CylinderFunction& operator-=(const CylinderFunction& o);
    CylinderFunction& operator*=(cplx z);
    friend CylinderFunction operator+(CylinderFunction a, const CylinderFunction& b) {
        a += b;
        return a;
    }
    friend CylinderFunction operator-(CylinderFunction a, const CylinderFunction& b) {
        a -= b;
        return a;
    }
    friend CylinderFunction operator*(cplx z, CylinderFunction a) {
        a *= z;
        return a;
    }
};

// Annular domain (r_min, r_max) x S^1; r_min == 0 means the domain touches
// the characteristic circle. Optional excluded sub-annuli make U multiply
// connected.
struct CylinderDomain {
    double r_min = 0.0;
    double r_max = 1.0;
    std::vector<std::pair<double, double>> exclusions;
};

// finite-difference weights for the m-th derivative at x0 from nodes x
// (Fornberg's algorithm)
std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m);

// integral of samples on a uniform grid (spacing h), composite Simpson with a
// 3/8 tail when the panel count is odd; O(h^4)
double integrate_uniform(const std::vector<double>& f, double h);
cplx integrate_uniform(const std::vector<cplx>& f, double h);

// trapezoid over one period for samples at t_k = 2*pi*k/M (spectral accuracy)
cplx integrate_periodic(const std::vector<cplx>& f);

// cumulative integral F_i = int_{x_0}^{x_i} f on a uniform grid, local cubic
// interpolation (O(h^4)); F_0 = 0
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double h);

}  // namespace dclab
