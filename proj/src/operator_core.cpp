#include "dclab/operator_core.hpp"

#include <cmath>
#include <stdexcept>

namespace dclab {

void OperatorSpec::validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("OperatorSpec: require a > 0");
    if (nu < 0.0 || nu >= 1.0)
        throw std::invalid_argument("OperatorSpec: require 0 <= nu < 1");
}

NormalFormResult reduce_to_normal_form(const PeriodicFunction& A,
                                       const PeriodicFunction& B, cplx lambda) {
    if (!(lambda.real() > 0.0))
        throw std::invalid_argument("reduce_to_normal_form: require Re lambda > 0");
    const cplx A0 = A.mean();
    const double x = (A0 / lambda).imag();
    double nu;
    int n_exp;  // integer n in the periodic factor e^{i n t} of m
    if (std::abs(x - std::round(x)) <= 1e-12 * std::max(1.0, std::abs(x))) {
        // average case Im(A0/lambda) integral: nu = 0, the whole integer
        // twist is carried by m so that the reduced equation really has nu=0
        n_exp = static_cast<int>(std::llround(x));
        nu = 0.0;
    } else {
        n_exp = 1 + static_cast<int>(std::floor(x));
        nu = 1.0 - x + std::floor(x);
    }
    PeriodicFunction g = (cplx(1.0) / lambda) * A.primitive0();
    PeriodicFunction m = PeriodicFunction::from_function([&](double t) {
        return std::exp(cplx(0.0, static_cast<double>(n_exp) * t) + g.eval(t));
    });
    PeriodicFunction c = PeriodicFunction::from_function([&](double t) {
        cplx mv = m.eval(t);
        return B.eval(t) * std::conj(mv) / mv;
    });
    return NormalFormResult{nu, std::move(m), c.trim()};
}

cplx first_integral_map(const OperatorSpec& spec, double r, double t) {
    if (!(r > 0.0)) throw std::invalid_argument("first_integral_map: require r > 0");
    return std::exp(spec.lambda_eps() * std::log(r) + cplx(0.0, t));
}

std::pair<double, double> first_integral_inverse(const OperatorSpec& spec, cplx z) {
    if (z == cplx(0.0))
        throw std::invalid_argument("first_integral_inverse: z must be nonzero");
    double s = std::log(std::abs(z)) / spec.a;
    double t = std::arg(z) - spec.b * spec.epsilon * s;
    t = std::fmod(t, TWO_PI);
    if (t < 0.0) t += TWO_PI;
    return {std::exp(s), t};
}

CylinderFunction apply_Lop(const OperatorSpec& spec, const CylinderFunction& u) {
    const cplx le = spec.lambda_eps();
    CylinderFunction out = le * u.dt();
    out -= cplx(0.0, 1.0) * u.ds();
    std::vector<cplx> cs = spec.c.sample(u.M);
    for (int i = 0; i < u.P(); ++i)
        for (int k = 0; k < u.M; ++k)
            out.at(i, k) += cplx(0.0, spec.nu) * le * u.at(i, k) -
                            cs[k] * std::conj(u.at(i, k));
    return out;
}

CylinderFunction apply_Lop_star(const OperatorSpec& spec,
                                const CylinderFunction& v) {
    const cplx le = spec.lambda_eps();
    CylinderFunction out = le * v.dt();
    out -= cplx(0.0, 1.0) * v.ds();
    std::vector<cplx> cs = spec.c.sample(v.M);
    for (int i = 0; i < v.P(); ++i)
        for (int k = 0; k < v.M; ++k)
            out.at(i, k) += -cplx(0.0, spec.nu) * le * v.at(i, k) +
                            std::conj(cs[k]) * std::conj(v.at(i, k));
    out *= cplx(-1.0);
    return out;
}

CylinderFunction apply_L(cplx lambda, const CylinderFunction& u) {
    CylinderFunction out = lambda * u.dt();
    out -= cplx(0.0, 1.0) * u.ds();
    return out;
}

CylinderFunction apply_Lbar(cplx lambda, const CylinderFunction& u) {
    CylinderFunction out = std::conj(lambda) * u.dt();
    out += cplx(0.0, 1.0) * u.ds();
    return out;
}

double pairing(const CylinderFunction& f, const CylinderFunction& g, int i0,
               int i1) {
    if (i1 <= i0) return 0.0;
    std::vector<double> rowint(i1 - i0 + 1);
    for (int i = i0; i <= i1; ++i) {
        cplx acc(0.0);
        for (int k = 0; k < f.M; ++k) acc += f.at(i, k) * g.at(i, k);
        rowint[i - i0] = (acc * (TWO_PI / f.M)).real();
    }
    double h = std::log(f.radii[i0 + 1]) - std::log(f.radii[i0]);
    return integrate_uniform(rowint, h);
}

double green_residual(const CylinderFunction& u, const CylinderFunction& v,
                      const OperatorSpec& spec, const CylinderDomain& domain) {
    const int p = u.P();
    int i0 = 0, i1 = p - 1;
    while (i0 < p && u.radii[i0] < domain.r_min * (1.0 - 1e-12)) ++i0;
    while (i1 >= 0 && u.radii[i1] > domain.r_max * (1.0 + 1e-12)) --i1;
    if (i1 - i0 < 4)
        throw std::invalid_argument("green_residual: domain covers too few rows");

    // boundary term: on circles dz_eps/z_eps = i dt; outer counterclockwise,
    // inner clockwise
    auto circle = [&](int i) {
        cplx acc(0.0);
        for (int k = 0; k < u.M; ++k)
            acc += u.at(i, k) * v.at(i, k) * cplx(0.0, 1.0);
        return (acc * (TWO_PI / u.M)).real();
    };
    double boundary = circle(i1) - circle(i0);

    CylinderFunction Lu = apply_Lop(spec, u);
    CylinderFunction Lsv = apply_Lop_star(spec, v);
    double interior = pairing(u, Lsv, i0, i1) - pairing(Lu, v, i0, i1);
    return std::abs(boundary - interior);
}

}  // namespace dclab
