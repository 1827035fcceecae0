#include "dclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dclab {

std::vector<double> CylinderFunction::log_radii(double rmin, double rmax, int P) {
    if (!(rmin > 0.0) || !(rmax > rmin) || P < 2)
        throw std::invalid_argument("log_radii: need 0 < rmin < rmax, P >= 2");
    std::vector<double> r(P);
    double s0 = std::log(rmin), s1 = std::log(rmax);
    for (int i = 0; i < P; ++i)
        r[i] = std::exp(s0 + (s1 - s0) * i / (P - 1));
    r.back() = rmax;
    return r;
}

CylinderFunction CylinderFunction::zeros(std::vector<double> radii, int M) {
    CylinderFunction u;
    u.radii = std::move(radii);
    u.M = M;
    u.values.assign(u.radii.size() * static_cast<size_t>(M), cplx(0.0));
    return u;
}

CylinderFunction CylinderFunction::from_function(
    std::vector<double> radii, int M,
    const std::function<cplx(double, double)>& f) {
    CylinderFunction u = zeros(std::move(radii), M);
    for (int i = 0; i < u.P(); ++i)
        for (int k = 0; k < M; ++k) u.at(i, k) = f(u.radii[i], u.t(k));
    return u;
}

CylinderFunction CylinderFunction::dt() const {
    CylinderFunction out = *this;
    const int m = M;
    // twiddle table e^{-2*pi*i*n/m}
    std::vector<cplx> w(m);
    for (int n = 0; n < m; ++n) {
        double a = -TWO_PI * n / m;
        w[n] = cplx(std::cos(a), std::sin(a));
    }
    std::vector<cplx> hat(m);
    for (int i = 0; i < P(); ++i) {
        const cplx* row = &values[static_cast<size_t>(i) * m];
        for (int l = 0; l < m; ++l) {
            cplx acc(0.0);
            for (int k = 0; k < m; ++k) acc += row[k] * w[(l * k) % m];
            hat[l] = acc / static_cast<double>(m);
        }
        // multiply by i*freq; freq l -> l for l < m/2, l - m for l > m/2,
        // Nyquist derivative set to zero
        for (int l = 0; l < m; ++l) {
            int freq = (2 * l < m) ? l : l - m;
            if (m % 2 == 0 && l == m / 2) freq = 0;
            hat[l] *= cplx(0.0, static_cast<double>(freq));
        }
        cplx* orow = &out.values[static_cast<size_t>(i) * m];
        for (int k = 0; k < m; ++k) {
            cplx acc(0.0);
            for (int l = 0; l < m; ++l) acc += hat[l] * std::conj(w[(l * k) % m]);
            orow[k] = acc;
        }
    }
    return out;
}

CylinderFunction CylinderFunction::ds() const {
    const int p = P();
    if (p < 5) throw std::invalid_argument("ds: need at least 5 radii");
    CylinderFunction out = *this;
    std::vector<double> s(p);
    for (int i = 0; i < p; ++i) s[i] = std::log(radii[i]);
    for (int i = 0; i < p; ++i) {
        int i0 = std::clamp(i - 2, 0, p - 5);
        std::vector<double> x(s.begin() + i0, s.begin() + i0 + 5);
        std::vector<double> wgt = fd_weights(s[i], x, 1);
        for (int k = 0; k < M; ++k) {
            cplx acc(0.0);
            for (int n = 0; n < 5; ++n) acc += wgt[n] * at(i0 + n, k);
            out.at(i, k) = acc;
        }
    }
    return out;
}

CylinderFunction CylinderFunction::conjugated() const {
    CylinderFunction out = *this;
    for (cplx& v : out.values) v = std::conj(v);
    return out;
}

double CylinderFunction::max_abs() const {
    double mx = 0.0;
    for (const cplx& v : values) mx = std::max(mx, std::abs(v));
    return mx;
}

double CylinderFunction::max_diff(const CylinderFunction& o) const {
    if (values.size() != o.values.size())
        throw std::invalid_argument("max_diff: grid mismatch");
    double mx = 0.0;
    for (size_t n = 0; n < values.size(); ++n)
        mx = std::max(mx, std::abs(values[n] - o.values[n]));
    return mx;
}

CylinderFunction& CylinderFunction::operator+=(const CylinderFunction& o) {
    if (values.size() != o.values.size())
        throw std::invalid_argument("CylinderFunction: grid mismatch");
    for (size_t n = 0; n < values.size(); ++n) values[n] += o.values[n];
    return *this;
}

CylinderFunction& CylinderFunction::operator-=(const CylinderFunction& o) {
    if (values.size() != o.values.size())
        throw std::invalid_argument("CylinderFunction: grid mismatch");
    for (size_t n = 0; n < values.size(); ++n) values[n] -= o.values[n];
    return *this;
}

CylinderFunction& CylinderFunction::operator*=(cplx z) {
    for (cplx& v : values) v *= z;
    return *this;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m) {
    // Fornberg (1988) recursive weight generation
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<std::vector<double>>> d(
        n + 1, std::vector<std::vector<double>>(
                   n + 1, std::vector<double>(m + 1, 0.0)));
    d[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        double c2 = 1.0;
        for (int v = 0; v < nn; ++v) {
            double c3 = x[nn] - x[v];
            c2 *= c3;
            for (int k = 0; k <= std::min(nn, m); ++k) {
                d[nn][v][k] = ((x[nn] - x0) * d[nn - 1][v][k] -
                               (k > 0 ? k * d[nn - 1][v][k - 1] : 0.0)) /
                              c3;
            }
        }
        for (int k = 0; k <= std::min(nn, m); ++k) {
            d[nn][nn][k] = (c1 / c2) * ((k > 0 ? k * d[nn - 1][nn - 1][k - 1] : 0.0) -
                                        (x[nn - 1] - x0) * d[nn - 1][nn - 1][k]);
        }
        c1 = c2;
    }
    std::vector<double> w(n + 1);
    for (int v = 0; v <= n; ++v) w[v] = d[n][v][m];
    return w;
}

namespace {
template <typename T>
T simpson_impl(const std::vector<T>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;  // panel count
    if (n < 1) return T(0.0);
    if (n == 1) return (f[0] + f[1]) * (h / 2.0);
    if (n == 2) return (f[0] + 4.0 * f[1] + f[2]) * (h / 3.0);
    T acc(0.0);
    int last = n;
    bool tail38 = (n % 2 == 1);
    if (tail38) last = n - 3;
    for (int i = 0; i + 2 <= last; i += 2)
        acc += (f[i] + 4.0 * f[i + 1] + f[i + 2]) * (h / 3.0);
    if (tail38)
        acc += (f[last] + 3.0 * f[last + 1] + 3.0 * f[last + 2] + f[last + 3]) *
               (3.0 * h / 8.0);
    return acc;
}
}  // namespace

double integrate_uniform(const std::vector<double>& f, double h) {
    return simpson_impl(f, h);
}
cplx integrate_uniform(const std::vector<cplx>& f, double h) {
    return simpson_impl(f, h);
}

cplx integrate_periodic(const std::vector<cplx>& f) {
    cplx acc(0.0);
    for (const cplx& v : f) acc += v;
    return acc * (TWO_PI / static_cast<double>(f.size()));
}

std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> F(n, cplx(0.0));
    if (n < 2) return F;
    if (n < 4) {
        for (int i = 1; i < n; ++i)
            F[i] = F[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return F;
    }
    for (int i = 0; i + 1 < n; ++i) {
        cplx panel;
        if (i == 0)
            panel = (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) * (h / 24.0);
        else if (i == n - 2)
            panel = (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) *
                    (h / 24.0);
        else
            panel = (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]) *
                    (h / 24.0);
        F[i + 1] = F[i] + panel;
    }
    return F;
}

}  // namespace dclab
