#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace dclab {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr double TWO_PI = 2.0 * PI;

// A 2*pi-periodic complex-valued function stored as a centered, band-limited
// Fourier series c_l, |l| <= N (an odd number 2N+1 of modes). This is the
// canonical representation for all periodic coefficient data (c, beta, m, B,
// k, ...). Sample and Fourier views agree through the discrete transform.
class PeriodicFunction {
public:
    PeriodicFunction() : coef_(1, cplx(0.0, 0.0)), N_(0) {}

    static PeriodicFunction zero() { return PeriodicFunction(); }
    static PeriodicFunction constant(cplx v);
    // amp * e^{i l t}
    static PeriodicFunction harmonic(cplx amp, int l);
    // samples at t_k = 2*pi*k/M, M odd and >= 3 (or M == 1 for a constant)
    static PeriodicFunction from_samples(const std::vector<cplx>& s);
    // centered coefficients (c_{-N}, ..., c_N), size odd
    static PeriodicFunction from_fourier(std::vector<cplx> coef);
    // Sample f on successively finer odd grids until the spectral tail is
    // negligible; M > 0 forces a fixed (odd) sampling size.
    static PeriodicFunction from_function(const std::function<cplx(double)>& f,
                                          int M = 0);

    int half_bandwidth() const { return N_; }
    const std::vector<cplx>& fourier() const { return coef_; }
    cplx coef(int l) const;

    cplx eval(double t) const;
    std::vector<cplx> sample(int M) const;

    cplx mean() const { return coef_[N_]; }
    bool is_zero(double tol = 0.0) const;
    double sup_norm() const;

    PeriodicFunction derivative() const;
    // F(t) = int_0^t (f(s) - mean(f)) ds  (periodic primitive, F(0) = 0)
    PeriodicFunction primitive0() const;
    PeriodicFunction conjugated() const;
    PeriodicFunction truncated(int N) const;
    // drop a negligible coefficient tail (relative threshold)
    PeriodicFunction& trim(double rel_tol = 1e-14);

    PeriodicFunction& operator+=(const PeriodicFunction& o);
    PeriodicFunction& operator-=(const PeriodicFunction& o);
    PeriodicFunction& operator*=(cplx z);

    friend PeriodicFunction operator+(PeriodicFunction a, const PeriodicFunction& b) {
        a += b;
        return a;
    }
    friend PeriodicFunction operator-(PeriodicFunction a, const PeriodicFunction& b) {
        a -= b;
        return a;
    }
    friend PeriodicFunction operator*(cplx z, PeriodicFunction a) {
        a *= z;
        return a;
    }
    // pointwise product (Fourier convolution)
    friend PeriodicFunction operator*(const PeriodicFunction& a,
                                      const PeriodicFunction& b);

private:
    explicit PeriodicFunction(std::vector<cplx> coef);

    std::vector<cplx> coef_;  // coef_[l + N_] = c_l
    int N_;
};

}  // namespace dclab
