#include "dclab/floquet.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace dclab {

namespace {

// state layout: interleaved re/im of (v00, v10, v01, v11, w00, w10, w01, w11)
// where v = V (column-major) and w = V_sigma
using State = std::array<double, 16>;

inline cplx get(const State& x, int n) { return cplx(x[2 * n], x[2 * n + 1]); }
inline void put(State& x, int n, cplx z) {
    x[2 * n] = z.real();
    x[2 * n + 1] = z.imag();
}

struct Rhs {
    const OperatorSpec* spec;
    cplx sigma;
    bool adjoint;
    cplx dsig_00, dsig_11;  // d/dsigma of the diagonal of M

    void operator()(const State& x, State& dxdt, double t) const {
        Eigen::Matrix2cd M = coefficient_matrix(*spec, sigma, t, adjoint);
        for (int col = 0; col < 2; ++col) {
            cplx v0 = get(x, 2 * col), v1 = get(x, 2 * col + 1);
            cplx w0 = get(x, 4 + 2 * col), w1 = get(x, 4 + 2 * col + 1);
            put(dxdt, 2 * col, M(0, 0) * v0 + M(0, 1) * v1);
            put(dxdt, 2 * col + 1, M(1, 0) * v0 + M(1, 1) * v1);
            put(dxdt, 4 + 2 * col,
                M(0, 0) * w0 + M(0, 1) * w1 + dsig_00 * v0);
            put(dxdt, 4 + 2 * col + 1,
                M(1, 0) * w0 + M(1, 1) * w1 + dsig_11 * v1);
        }
    }
};

}  // namespace

Eigen::Matrix2cd coefficient_matrix(const OperatorSpec& spec, cplx sigma,
                                    double t, bool adjoint) {
    const cplx le = spec.lambda_eps();
    const cplx lec = std::conj(le);
    const cplx I(0.0, 1.0);
    const cplx cv = spec.c.eval(t);
    Eigen::Matrix2cd M;
    if (!adjoint) {
        M(0, 0) = I * (sigma - le * spec.nu) / le;
        M(0, 1) = cv / le;
        M(1, 0) = std::conj(cv) / lec;
        M(1, 1) = -I * (sigma - lec * spec.nu) / lec;
    } else {
        M(0, 0) = I * (sigma + le * spec.nu) / le;
        M(0, 1) = -std::conj(cv) / le;
        M(1, 0) = -cv / lec;
        M(1, 1) = -I * (sigma + lec * spec.nu) / lec;
    }
    return M;
}

FundamentalMatrix fundamental_matrix(const OperatorSpec& spec, cplx sigma,
                                     double tol, int n_nodes, bool adjoint) {
    namespace ode = boost::numeric::odeint;
    spec.validate();
    if (n_nodes < 2) throw std::invalid_argument("fundamental_matrix: n_nodes >= 2");

    const cplx le = spec.lambda_eps();
    Rhs rhs;
    rhs.spec = &spec;
    rhs.sigma = sigma;
    rhs.adjoint = adjoint;
    rhs.dsig_00 = cplx(0.0, 1.0) / le;
    rhs.dsig_11 = -cplx(0.0, 1.0) / std::conj(le);

    State x{};
    put(x, 0, cplx(1.0));  // V = I
    put(x, 3, cplx(1.0));

    FundamentalMatrix out;
    out.sigma = sigma;
    out.epsilon = spec.epsilon;
    out.adjoint = adjoint;
    out.nodes.resize(n_nodes);
    out.V.resize(n_nodes);
    out.V_sigma.resize(n_nodes);
    out.log_scale.assign(n_nodes, 0.0);
    for (int i = 0; i < n_nodes; ++i) out.nodes[i] = TWO_PI * i / (n_nodes - 1);

    auto record = [&](int i, const State& s, double ls) {
        Eigen::Matrix2cd V, W;
        V(0, 0) = get(s, 0);
        V(1, 0) = get(s, 1);
        V(0, 1) = get(s, 2);
        V(1, 1) = get(s, 3);
        W(0, 0) = get(s, 4);
        W(1, 0) = get(s, 5);
        W(0, 1) = get(s, 6);
        W(1, 1) = get(s, 7);
        out.V[i] = V;
        out.V_sigma[i] = W;
        out.log_scale[i] = ls;
    };

    auto stepper =
        ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
    double t = 0.0;
    double dt = 1e-3;
    double log_scale = 0.0;
    record(0, x, 0.0);
    for (int i = 1; i < n_nodes; ++i) {
        const double target = out.nodes[i];
        while (t < target - 1e-14) {
            double step = std::min(dt, target - t);
            auto res = stepper.try_step(rhs, x, t, step);
            if (res == ode::controlled_step_result::success) {
                dt = step;  // controller writes the adapted size back
            } else {
                dt = step;
                if (dt < 1e-13)
                    throw std::runtime_error(
                        "fundamental_matrix: step-size underflow");
                continue;
            }
            // renormalize to avoid overflow of the Floquet growth; the
            // stepper caches the last derivative (FSAL), so it must be
            // reset after the state is rescaled externally
            double mx = 0.0;
            for (double v : x) mx = std::max(mx, std::abs(v));
            if (mx > 1e120) {
                for (double& v : x) v /= mx;
                log_scale += std::log(mx);
                stepper.reset();
            }
        }
        record(i, x, log_scale);
    }
    return out;
}

Monodromy monodromy(const OperatorSpec& spec, cplx sigma, double tol,
                    bool adjoint) {
    FundamentalMatrix f = fundamental_matrix(spec, sigma, tol, 2, adjoint);
    Monodromy m;
    m.sigma = sigma;
    m.epsilon = spec.epsilon;
    m.B = f.V.back();
    m.B_sigma = f.V_sigma.back();
    m.log_scale = f.log_scale.back();
    return m;
}

FundamentalMatrix adjoint_transform(const FundamentalMatrix& V) {
    Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
    D(0, 0) = 1.0;
    D(1, 1) = -1.0;
    FundamentalMatrix out;
    out.sigma = -std::conj(V.sigma);
    out.epsilon = -V.epsilon;
    out.adjoint = !V.adjoint;
    out.nodes = V.nodes;
    out.log_scale = V.log_scale;
    out.V.resize(V.V.size());
    out.V_sigma.resize(V.V.size());
    for (size_t i = 0; i < V.V.size(); ++i) {
        out.V[i] = D * V.V[i].conjugate() * D;
        out.V_sigma[i] = -D * V.V_sigma[i].conjugate() * D;
    }
    return out;
}

}  // namespace dclab
