#include "dclab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dclab {

PeriodicFunction::PeriodicFunction(std::vector<cplx> coef)
    : coef_(std::move(coef)), N_(static_cast<int>(coef_.size() / 2)) {
    if (coef_.empty() || coef_.size() % 2 == 0)
        throw std::invalid_argument("PeriodicFunction: coefficient count must be odd");
}

PeriodicFunction PeriodicFunction::constant(cplx v) {
    return PeriodicFunction(std::vector<cplx>{v});
}

PeriodicFunction PeriodicFunction::harmonic(cplx amp, int l) {
    int N = std::abs(l);
    std::vector<cplx> c(2 * N + 1, cplx(0.0));
    c[l + N] = amp;
    return PeriodicFunction(std::move(c));
}

PeriodicFunction PeriodicFunction::from_samples(const std::vector<cplx>& s) {
    const int M = static_cast<int>(s.size());
    if (M < 1 || M % 2 == 0)
        throw std::invalid_argument("PeriodicFunction: sample count must be odd");
    const int N = M / 2;
    std::vector<cplx> c(M);
    for (int l = -N; l <= N; ++l) {
        cplx acc(0.0);
        for (int k = 0; k < M; ++k) {
            double ang = -TWO_PI * l * k / M;
            acc += s[k] * cplx(std::cos(ang), std::sin(ang));
        }
        c[l + N] = acc / static_cast<double>(M);
    }
    return PeriodicFunction(std::move(c));
}

PeriodicFunction PeriodicFunction::from_fourier(std::vector<cplx> coef) {
    return PeriodicFunction(std::move(coef));
}

PeriodicFunction PeriodicFunction::from_function(
    const std::function<cplx(double)>& f, int M) {
    if (M > 0) {
        if (M % 2 == 0) ++M;
        std::vector<cplx> s(M);
        for (int k = 0; k < M; ++k) s[k] = f(TWO_PI * k / M);
        PeriodicFunction p = from_samples(s);
        return p.trim();
    }
    // adaptive: refine until the spectral tail is negligible
    for (int m = 33; m <= 4097; m = 2 * m - 1) {
        std::vector<cplx> s(m);
        for (int k = 0; k < m; ++k) s[k] = f(TWO_PI * k / m);
        PeriodicFunction p = from_samples(s);
        double mx = 0.0;
        for (const cplx& c : p.coef_) mx = std::max(mx, std::abs(c));
        int N = p.N_;
        double tail = 0.0;
        int nt = std::max(2, N / 8);
        for (int l = N - nt + 1; l <= N; ++l)
            tail = std::max({tail, std::abs(p.coef(l)), std::abs(p.coef(-l))});
        if (mx == 0.0 || tail <= 1e-13 * mx) return p.trim();
    }
    throw std::runtime_error(
        "PeriodicFunction::from_function: spectral tail did not converge "
        "(function may not be smooth/periodic)");
}

cplx PeriodicFunction::coef(int l) const {
    if (l < -N_ || l > N_) return cplx(0.0);
    return coef_[l + N_];
}

cplx PeriodicFunction::eval(double t) const {
    // sum c_l e^{ilt} via two Horner recurrences in e^{±it}
    cplx e = cplx(std::cos(t), std::sin(t));
    cplx pos(0.0), neg(0.0);
    for (int l = N_; l >= 1; --l) {
        pos = (pos + coef_[l + N_]) * e;
        neg = (neg + coef_[-l + N_]) * std::conj(e);
    }
    return pos + neg + coef_[N_];
}

std::vector<cplx> PeriodicFunction::sample(int M) const {
    std::vector<cplx> s(M);
    for (int k = 0; k < M; ++k) s[k] = eval(TWO_PI * k / M);
    return s;
}

bool PeriodicFunction::is_zero(double tol) const {
    for (const cplx& c : coef_)
        if (std::abs(c) > tol) return false;
    return true;
}

double PeriodicFunction::sup_norm() const {
    int M = std::max(64, 8 * N_ + 1);
    double mx = 0.0;
    for (int k = 0; k < M; ++k) mx = std::max(mx, std::abs(eval(TWO_PI * k / M)));
    return mx;
}

PeriodicFunction PeriodicFunction::derivative() const {
    std::vector<cplx> c(coef_);
    for (int l = -N_; l <= N_; ++l) c[l + N_] *= cplx(0.0, static_cast<double>(l));
    return PeriodicFunction(std::move(c));
}

PeriodicFunction PeriodicFunction::primitive0() const {
    // primitive of the zero-mean part, anchored at F(0) = 0
    std::vector<cplx> c(coef_);
    c[N_] = cplx(0.0);
    for (int l = -N_; l <= N_; ++l) {
        if (l == 0) continue;
        c[l + N_] = coef_[l + N_] / cplx(0.0, static_cast<double>(l));
    }
    PeriodicFunction F(std::move(c));
    cplx f0 = F.eval(0.0);
    F.coef_[F.N_] -= f0;
    return F;
}

PeriodicFunction PeriodicFunction::conjugated() const {
    std::vector<cplx> c(coef_.size());
    for (int l = -N_; l <= N_; ++l) c[l + N_] = std::conj(coef_[-l + N_]);
    return PeriodicFunction(std::move(c));
}

PeriodicFunction PeriodicFunction::truncated(int N) const {
    if (N >= N_) return *this;
    std::vector<cplx> c(2 * N + 1);
    for (int l = -N; l <= N; ++l) c[l + N] = coef_[l + N_];
    return PeriodicFunction(std::move(c));
}

PeriodicFunction& PeriodicFunction::trim(double rel_tol) {
    double mx = 0.0;
    for (const cplx& c : coef_) mx = std::max(mx, std::abs(c));
    int N = 0;
    for (int l = 1; l <= N_; ++l)
        if (std::abs(coef_[l + N_]) > rel_tol * mx ||
            std::abs(coef_[-l + N_]) > rel_tol * mx)
            N = l;
    if (N < N_) *this = truncated(N);
    return *this;
}

PeriodicFunction& PeriodicFunction::operator+=(const PeriodicFunction& o) {
    int N = std::max(N_, o.N_);
    std::vector<cplx> c(2 * N + 1, cplx(0.0));
    for (int l = -N; l <= N; ++l) c[l + N] = coef(l) + o.coef(l);
    *this = PeriodicFunction(std::move(c));
    return *this;
}

PeriodicFunction& PeriodicFunction::operator-=(const PeriodicFunction& o) {
    int N = std::max(N_, o.N_);
    std::vector<cplx> c(2 * N + 1, cplx(0.0));
    for (int l = -N; l <= N; ++l) c[l + N] = coef(l) - o.coef(l);
    *this = PeriodicFunction(std::move(c));
    return *this;
}

PeriodicFunction& PeriodicFunction::operator*=(cplx z) {
    for (cplx& c : coef_) c *= z;
    return *this;
}

PeriodicFunction operator*(const PeriodicFunction& a, const PeriodicFunction& b) {
    int N = a.N_ + b.N_;
    std::vector<cplx> c(2 * N + 1, cplx(0.0));
    for (int la = -a.N_; la <= a.N_; ++la) {
        cplx ca = a.coef_[la + a.N_];
        if (ca == cplx(0.0)) continue;
        for (int lb = -b.N_; lb <= b.N_; ++lb)
            c[la + lb + N] += ca * b.coef_[lb + b.N_];
    }
    return PeriodicFunction(std::move(c));
}

}  // namespace dclab
