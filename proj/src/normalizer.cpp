#include "dclab/normalizer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dclab {

namespace {

double eval_or_zero(const std::function<double(double, double)>& f, double x,
                    double y) {
    return f ? f(x, y) : 0.0;
}

struct CoeffValues {
    double a11, a12, a22, a1, a2;
};

CoeffValues coeffs_at(const PlaneOperator& op, double x, double y) {
    if (!op.a11 || !op.a12 || !op.a22)
        throw std::invalid_argument(
            "normalizer: the three second-order coefficients must be set");
    return {op.a11(x, y), op.a12(x, y), op.a22(x, y),
            eval_or_zero(op.a1, x, y), eval_or_zero(op.a2, x, y)};
}

// g at a point, reusing the polar reduction (throws on degeneracy)
cplx g_at(const PlaneOperator& op, double rho, double theta) {
    PolarCoefficients pc = polar_reduce(op, rho, theta);
    double disc = pc.M1 - pc.N1 * pc.N1;
    if (disc <= 0.0)
        throw std::runtime_error(
            "first_order_data: M1 - N1^2 is not positive (degeneracy bound "
            "violated)");
    return cplx(pc.N1, std::sqrt(disc));
}

}  // namespace

PolarCoefficients polar_reduce(const PlaneOperator& op, double rho,
                               double theta) {
    if (rho <= 0.0)
        throw std::invalid_argument("polar_reduce: rho must be positive");
    const double c = std::cos(theta), s = std::sin(theta);
    CoeffValues v = coeffs_at(op, rho * c, rho * s);

    PolarCoefficients pc;
    pc.P = (v.a11 * s * s - 2.0 * v.a12 * s * c + v.a22 * c * c) / (rho * rho);
    pc.N = (-v.a11 * s * c + v.a12 * (c * c - s * s) + v.a22 * c * s) / rho;
    pc.M = v.a11 * c * c + 2.0 * v.a12 * s * c + v.a22 * s * s;
    pc.Q = (v.a11 * s * s - 2.0 * v.a12 * s * c + v.a22 * c * c) / rho +
           v.a1 * c + v.a2 * s;
    pc.T = 2.0 *
               (v.a11 * s * c + v.a12 * (s * s - c * c) - v.a22 * s * c) /
               (rho * rho) -
           (v.a1 * s - v.a2 * c) / rho;

    const double scale =
        (std::abs(v.a11) + std::abs(v.a12) + std::abs(v.a22)) / (rho * rho);
    if (pc.P <= 1e-10 * std::max(scale, 1e-300))
        throw std::runtime_error(
            "polar_reduce: angular coefficient P is not positive (degeneracy "
            "bound violated)");

    pc.N1 = pc.N / (rho * pc.P);
    pc.M1 = pc.M / (rho * rho * pc.P);
    pc.Q1 = pc.Q / (rho * pc.P);
    pc.T1 = pc.T / pc.P;
    return pc;
}

std::pair<double, double> ellipticity_bounds(const PlaneOperator& op,
                                             double rho_min, double rho_max,
                                             int n_rho, int n_theta) {
    if (!(rho_min > 0.0) || !(rho_max > rho_min))
        throw std::invalid_argument(
            "ellipticity_bounds: need 0 < rho_min < rho_max");
    if (n_rho < 2 || n_theta < 4)
        throw std::invalid_argument("ellipticity_bounds: grid too small");

    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < n_rho; ++i) {
        double rho = rho_min * std::pow(rho_max / rho_min,
                                        double(i) / double(n_rho - 1));
        for (int k = 0; k < n_theta; ++k) {
            double t = TWO_PI * k / n_theta;
            double x = rho * std::cos(t), y = rho * std::sin(t);
            CoeffValues v = coeffs_at(op, x, y);
            double disc = v.a11 * v.a22 - v.a12 * v.a12;
            double ratio = disc / ((x * x + y * y) * (x * x + y * y));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    if (lo <= 0.0) {
        std::ostringstream os;
        os << "ellipticity_bounds: discriminant ratio reaches " << lo
           << "; the operator degenerates beyond the model class";
        throw std::runtime_error(os.str());
    }
    return {lo, hi};
}

MuReport invariant_mu(const PlaneOperator& op, double rho0, int levels,
                      int n_theta, double tol) {
    if (!(rho0 > 0.0) || levels < 2 || n_theta < 8)
        throw std::invalid_argument("invariant_mu: bad sampling parameters");

    MuReport rep;
    for (int m = 0; m < levels; ++m) {
        double rho = rho0 / std::pow(2.0, m);
        cplx acc(0.0, 0.0);
        for (int k = 0; k < n_theta; ++k) {
            double t = TWO_PI * k / n_theta;
            double x = rho * std::cos(t), y = rho * std::sin(t);
            CoeffValues v = coeffs_at(op, x, y);
            double den = v.a11 * y * y - 2.0 * v.a12 * x * y + v.a22 * x * x;
            if (den <= 0.0)
                throw std::runtime_error(
                    "invariant_mu: angular form is not positive on the "
                    "sampling circle");
            double disc = v.a11 * v.a22 - v.a12 * v.a12;
            if (disc <= 0.0)
                throw std::runtime_error(
                    "invariant_mu: discriminant is not positive on the "
                    "sampling circle");
            double A = (x * x + y * y) * std::sqrt(disc) / den;
            double B =
                ((v.a22 - v.a11) * x * y + v.a12 * (x * x - y * y)) / den;
            acc += cplx(A, -B);
        }
        rep.circle_means.push_back(acc / double(n_theta));
    }

    // Richardson table for a limit with a smooth expansion in rho
    std::vector<std::vector<cplx>> tab;
    tab.resize(size_t(levels));
    for (int m = 0; m < levels; ++m) {
        tab[size_t(m)].assign(size_t(m) + 1, cplx(0.0, 0.0));
        tab[size_t(m)][0] = rep.circle_means[size_t(m)];
        for (int k = 1; k <= m; ++k) {
            double w = std::pow(2.0, k);
            tab[size_t(m)][size_t(k)] =
                (w * tab[size_t(m)][size_t(k) - 1] -
                 tab[size_t(m) - 1][size_t(k) - 1]) /
                (w - 1.0);
        }
    }
    rep.mu = tab[size_t(levels) - 1][size_t(levels) - 1];
    rep.drift = std::abs(rep.mu - tab[size_t(levels) - 2][size_t(levels) - 2]);
    if (rep.drift > tol * (1.0 + std::abs(rep.mu)))
        throw std::runtime_error(
            "invariant_mu: circle averages do not settle along the shrinking "
            "radii (limit failure)");
    if (!(rep.mu.real() > 0.0))
        throw std::runtime_error("invariant_mu: Re mu is not positive");
    rep.lambda = 1.0 / rep.mu;
    return rep;
}

FirstOrderData first_order_data(const PlaneOperator& op, double rho,
                                double theta) {
    PolarCoefficients pc = polar_reduce(op, rho, theta);
    FirstOrderData d;
    d.g = g_at(op, rho, theta);

    // X(conj g) = d_theta(conj g) - rho g d_rho(conj g):
    // spectral derivative in theta, 4th-order central differences in rho
    const int M = 63;
    std::vector<cplx> row(size_t(M), cplx(0.0, 0.0));
    for (int k = 0; k < M; ++k)
        row[size_t(k)] = std::conj(g_at(op, rho, TWO_PI * k / M));
    cplx dgc_dtheta =
        PeriodicFunction::from_samples(row).derivative().eval(theta);

    const double h = rho / 20.0;
    cplx gm2 = std::conj(g_at(op, rho - 2.0 * h, theta));
    cplx gm1 = std::conj(g_at(op, rho - h, theta));
    cplx gp1 = std::conj(g_at(op, rho + h, theta));
    cplx gp2 = std::conj(g_at(op, rho + 2.0 * h, theta));
    cplx dgc_drho = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);

    cplx Xgc = dgc_dtheta - rho * d.g * dgc_drho;
    d.f = -std::norm(d.g) + Xgc;

    // B = (f + conj f - 2 Q1 - 2 conj(g) T1) / (g - conj g)
    cplx num = 2.0 * d.f.real() - 2.0 * pc.Q1 - 2.0 * std::conj(d.g) * pc.T1;
    d.Bcoef = num / (d.g - std::conj(d.g));
    return d;
}

NormalizationReport normalize(const PlaneOperator& op, double rho_min,
                              double rho_max, int n_rho, int n_theta,
                              double rho0) {
    NormalizationReport rep;
    auto [c1, c2] = ellipticity_bounds(op, rho_min, rho_max);
    rep.C1_est = c1;
    rep.C2_est = c2;
    MuReport mu = invariant_mu(op, rho0);
    rep.mu = mu.mu;
    rep.lambda = mu.lambda;

    for (int i = 0; i < n_rho; ++i)
        rep.rho_nodes.push_back(rho_min +
                                (rho_max - rho_min) * i / double(n_rho - 1));
    for (int k = 0; k < n_theta; ++k)
        rep.theta_nodes.push_back(TWO_PI * k / n_theta);

    for (double rho : rep.rho_nodes) {
        std::vector<double> m1, n1, q1, t1;
        std::vector<cplx> gr, fr, br;
        for (double t : rep.theta_nodes) {
            PolarCoefficients pc = polar_reduce(op, rho, t);
            FirstOrderData d = first_order_data(op, rho, t);
            m1.push_back(pc.M1);
            n1.push_back(pc.N1);
            q1.push_back(pc.Q1);
            t1.push_back(pc.T1);
            gr.push_back(d.g);
            fr.push_back(d.f);
            br.push_back(d.Bcoef);
        }
        rep.M1.push_back(std::move(m1));
        rep.N1.push_back(std::move(n1));
        rep.Q1.push_back(std::move(q1));
        rep.T1.push_back(std::move(t1));
        rep.g.push_back(std::move(gr));
        rep.f.push_back(std::move(fr));
        rep.B.push_back(std::move(br));
    }

    std::ostringstream os;
    os << "mu computed with the counterclockwise theta orientation; for the "
          "model family the observed sign is Im mu = "
       << (rep.mu.imag() >= 0.0 ? "+" : "-")
       << "|Im mu| (conjugation convention recorded, not adjudicated)";
    rep.notes = os.str();
    return rep;
}

}  // namespace dclab
