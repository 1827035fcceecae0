#include "dclab/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dclab {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double REAL_AXIS_TOL = 1e-9;

// exp(s1 log r + s2 log rho); all in-regime combinations have non-positive
// real exponent, so this never overflows
inline cplx rpow2(double lr, double lrho, cplx s1, cplx s2) {
    return std::exp(s1 * lr + s2 * lrho);
}

// w_j(z) w*_{-j}(zeta) for one branch (the four power products expanded so
// every factor is bounded in the regime where the term is included)
cplx product_omega1(const BasicSolution& w, const BasicSolution& v, double lr,
                    double lrho, double t, double theta) {
    const cplx s = w.sigma, sc = std::conj(s);
    const cplx mu = v.sigma, muc = std::conj(mu);
    const cplx ph = w.phi.eval(t), ps = std::conj(w.psi.eval(t));
    const cplx X = v.phi.eval(theta), Z = std::conj(v.psi.eval(theta));
    return rpow2(lr, lrho, s, mu) * ph * X + rpow2(lr, lrho, s, muc) * ph * Z +
           rpow2(lr, lrho, sc, mu) * ps * X + rpow2(lr, lrho, sc, muc) * ps * Z;
}

// conj(w_j(z)) w*_{-j}(zeta) for one branch
cplx product_omega2(const BasicSolution& w, const BasicSolution& v, double lr,
                    double lrho, double t, double theta) {
    const cplx s = w.sigma, sc = std::conj(s);
    const cplx mu = v.sigma, muc = std::conj(mu);
    const cplx ph = std::conj(w.phi.eval(t)), ps = w.psi.eval(t);
    const cplx X = v.phi.eval(theta), Z = std::conj(v.psi.eval(theta));
    return rpow2(lr, lrho, sc, mu) * ph * X + rpow2(lr, lrho, sc, muc) * ph * Z +
           rpow2(lr, lrho, s, mu) * ps * X + rpow2(lr, lrho, s, muc) * ps * Z;
}

struct BranchRef {
    const BasicSolution* w;
    const BasicSolution* v;
};

std::array<BranchRef, 2> branches(const BasicPair& bp) {
    return {BranchRef{&bp.w_plus, &bp.ws_plus},
            BranchRef{&bp.w_minus, &bp.ws_minus}};
}

}  // namespace

const BasicPair& KernelContext::at(int j) const {
    if (j < -J || j > J)
        throw std::out_of_range("KernelContext::at: level outside window");
    return pairs[static_cast<size_t>(j + J)];
}

double solution_pairing(const BasicSolution& w, const BasicSolution& v) {
    PeriodicFunction wf = w.phi + w.psi.conjugated();
    PeriodicFunction vf = v.phi + v.psi.conjugated();
    return (I * TWO_PI * (wf * vf).mean()).real();
}

KernelContext make_kernel_context(const OperatorSpec& spec, int J, double tol,
                                  double eta) {
    if (J < 1) throw std::invalid_argument("make_kernel_context: J >= 1");
    KernelContext ctx;
    ctx.spec = spec;
    ctx.J = J;
    ctx.eta = eta;
    ctx.window = find_spectral_values(spec, -J, J, tol);
    if (!ctx.window.complete()) {
        std::ostringstream os;
        os << "make_kernel_context: incomplete spectrum window:";
        for (const auto& g : ctx.window.gaps) os << " [" << g << "]";
        throw std::runtime_error(os.str());
    }
    ctx.k_phase = phase_correction(spec);
    ctx.pairs.reserve(2 * J + 1);

    for (int j = -J; j <= J; ++j) {
        auto ent = ctx.window.at(j);
        BasicPair bp;
        bp.j = j;
        if (ent.size() == 1) {
            // double real exponent: the two branch normalizations split the
            // two-real-dimensional null space
            bp.w_plus = basic_solution(spec, *ent[0], +1, tol);
            bp.w_minus = basic_solution(spec, *ent[0], -1, tol);
        } else {
            const SpectralValue& svp = *ent[0];
            const SpectralValue& svm = *ent[1];
            bool real_pair = std::abs(svp.sigma.imag()) <
                                 REAL_AXIS_TOL * (1.0 + std::abs(svp.sigma)) &&
                             std::abs(svm.sigma.imag()) <
                                 REAL_AXIS_TOL * (1.0 + std::abs(svm.sigma));
            if (real_pair) {
                bp.real_pair = true;
                bp.w_plus = basic_solution(spec, svp, +1, tol);
                bp.w_minus = basic_solution(spec, svm, +1, tol);
                bp.w_minus.branch = -1;
            } else {
                // a complex orbit: both real solutions live at the same
                // exponent, the conjugate entry carries no new space
                bp.w_plus = basic_solution(spec, svp, +1, tol);
                bp.w_minus = basic_solution(spec, svp, -1, tol);
            }
        }
        bp.ws_plus = adjoint_basic_solution(spec, bp.w_plus, tol);
        bp.ws_minus = adjoint_basic_solution(spec, bp.w_minus, tol);

        // dual-normalize: pairing(w_a, ws_b) = -2 pi delta_ab
        auto gram = [&](double P[2][2]) {
            P[0][0] = solution_pairing(bp.w_plus, bp.ws_plus);
            P[0][1] = solution_pairing(bp.w_plus, bp.ws_minus);
            P[1][0] = solution_pairing(bp.w_minus, bp.ws_plus);
            P[1][1] = solution_pairing(bp.w_minus, bp.ws_minus);
            if (std::abs(bp.w_plus.sigma - bp.w_minus.sigma) >
                1e-8 * (1.0 + std::abs(bp.w_plus.sigma))) {
                // distinct exponents pair to zero exactly; drop the numerical
                // residue so the recombination stays a pure power
                P[0][1] = P[1][0] = 0.0;
            }
            return P[0][0] * P[1][1] - P[0][1] * P[1][0];
        };
        double P[2][2];
        double det = gram(P);
        if (std::abs(det) < 1e-10) {
            // a conjugate-dominant double level defeats the branch
            // normalization of the adjoint solve (both branches land on the
            // same null direction); the pair system is jointly C-linear, so
            // the componentwise i-rotation supplies the missing partner
            bp.ws_minus = bp.ws_plus;
            bp.ws_minus.branch = -1;
            bp.ws_minus.phi = cplx(0.0, 1.0) * bp.ws_plus.phi;
            bp.ws_minus.psi = cplx(0.0, 1.0) * bp.ws_plus.psi;
            bp.ws_minus.f = bp.ws_minus.phi + bp.ws_minus.psi.conjugated();
            det = gram(P);
        }
        if (std::abs(det) < 1e-10) {
            std::ostringstream os;
            os << "make_kernel_context: degenerate pairing Gram at level "
               << j;
            throw std::runtime_error(os.str());
        }
        // rows m_b solve P m_b = -2 pi e_b
        double inv[2][2] = {{P[1][1] / det, -P[0][1] / det},
                            {-P[1][0] / det, P[0][0] / det}};
        auto combine = [&](int b) {
            double c0 = -TWO_PI * inv[0][b];
            double c1 = -TWO_PI * inv[1][b];
            BasicSolution out = (b == 0) ? bp.ws_plus : bp.ws_minus;
            out.phi = cplx(c0) * bp.ws_plus.phi + cplx(c1) * bp.ws_minus.phi;
            out.psi = cplx(c0) * bp.ws_plus.psi + cplx(c1) * bp.ws_minus.psi;
            out.f = out.phi + out.psi.conjugated();
            return out;
        };
        BasicSolution nvp = combine(0), nvm = combine(1);
        bp.ws_plus = std::move(nvp);
        bp.ws_minus = std::move(nvm);
        ctx.pairs.push_back(std::move(bp));
    }
    return ctx;
}

cplx kernel_K(const KernelContext& ctx, double t, double theta) {
    return ctx.k_phase.eval(t) - ctx.k_phase.eval(theta);
}

cplx kernel_L(const OperatorSpec& spec, double r, double t, double rho,
              double theta) {
    const cplx lam = spec.lambda_eps();
    const double lr = std::log(r), lrho = std::log(rho);
    if (lr <= lrho) {
        cplx q = std::exp(lam * (lr - lrho) + I * (t - theta));  // z / zeta
        return -std::log(1.0 - q);
    }
    cplx q = std::exp(lam * (lrho - lr) + I * (theta - t));  // zeta / z
    return -std::log(1.0 - q);
}

namespace {

// zeta / (zeta - z) via the contracting ratio of the regime
cplx cauchy_factor(const OperatorSpec& spec, double lr, double t, double lrho,
                   double theta) {
    const cplx lam = spec.lambda_eps();
    if (lr <= lrho) {
        cplx q = std::exp(lam * (lr - lrho) + I * (t - theta));
        return 1.0 / (1.0 - q);
    }
    cplx q = std::exp(lam * (lrho - lr) + I * (theta - t));
    return -q / (1.0 - q);
}

struct RawAccum {
    cplx o1{}, o2{};
    double edge = 0.0;  // largest included |term| at |j| = J
};

// threshold: minimum Re sigma for inclusion when r < rho (terms decaying as
// (r/rho)^{Re sigma - thr}); for the plain kernels thr = 0
RawAccum raw_sums(const KernelContext& ctx, double lr, double t, double lrho,
                  double theta, double thr, bool drop_imaginary) {
    const bool r_less = lr < lrho;
    RawAccum acc;
    for (const auto& bp : ctx.pairs) {
        for (const auto& br : branches(bp)) {
            double re = br.w->sigma.real();
            bool incl = r_less ? (re >= thr - REAL_AXIS_TOL)
                               : (re < thr - REAL_AXIS_TOL);
            if (!incl) continue;
            if (drop_imaginary && std::abs(re) <= REAL_AXIS_TOL) continue;
            cplx t1 = product_omega1(*br.w, *br.v, lr, lrho, t, theta);
            cplx t2 = product_omega2(*br.w, *br.v, lr, lrho, t, theta);
            acc.o1 += t1;
            acc.o2 += t2;
            if (std::abs(bp.j) == ctx.J)
                acc.edge = std::max(acc.edge,
                                    std::max(std::abs(t1), std::abs(t2)));
        }
    }
    double half = r_less ? 0.5 : -0.5;
    acc.o1 *= half;
    acc.o2 *= half;
    acc.edge *= 0.5;
    return acc;
}

KernelValue raw_kernel(const KernelContext& ctx, double r, double t,
                       double rho, double theta, double thr,
                       bool drop_imaginary) {
    if (r <= 0.0 || rho <= 0.0)
        throw std::invalid_argument("kernel: radii must be positive");
    const double lr = std::log(r), lrho = std::log(rho);
    if (std::abs(lr - lrho) < ctx.eta)
        throw std::runtime_error(
            "kernel_omega: inside the diagonal band; use the decomposed path");
    RawAccum acc = raw_sums(ctx, lr, t, lrho, theta, thr, drop_imaginary);
    KernelValue kv;
    kv.r_less = lr < lrho;
    kv.omega1 = acc.o1;
    kv.omega2 = acc.o2;
    double q = std::exp(-ctx.spec.a * std::abs(lr - lrho));
    kv.tail_bound = acc.edge * q / std::max(1e-12, 1.0 - q);
    kv.tail_warning =
        kv.tail_bound >
        ctx.tail_tol * std::max(1.0, std::abs(kv.omega1) + std::abs(kv.omega2));
    return kv;
}

}  // namespace

KernelValue kernel_omega(const KernelContext& ctx, double r, double t,
                         double rho, double theta) {
    return raw_kernel(ctx, r, t, rho, theta, 0.0, false);
}

KernelValue hat_kernels(const KernelContext& ctx, double r, double t,
                        double rho, double theta) {
    if (r == 0.0) {
        // every surviving term carries Re sigma > 0
        KernelValue kv;
        kv.r_less = true;
        return kv;
    }
    return raw_kernel(ctx, r, t, rho, theta, 0.0, true);
}

namespace {

// shared decomposed evaluation; the modified kernels use the same machinery
// with a shifted model exponent sig0 and winding shift j0 (plain kernels:
// sig0 = lambda nu, j0 = 0, thr = 0)
KernelValue decomposed_kernel(const KernelContext& ctx, double r, double t,
                              double rho, double theta, cplx sig0, int j0,
                              double thr) {
    if (r <= 0.0 || rho <= 0.0)
        throw std::invalid_argument("kernel: radii must be positive");
    const double lr = std::log(r), lrho = std::log(rho);
    const double dtt = t - theta;
    {
        cplx q = std::exp(ctx.spec.lambda_eps() *
                              (std::min(lr, lrho) - std::max(lr, lrho)) +
                          I * (lr <= lrho ? dtt : -dtt));
        if (std::abs(1.0 - q) < 1e-14)
            throw std::runtime_error("kernel_decomposed: singular point z = zeta");
    }
    const bool r_less = lr <= lrho;
    const double ds = lr - lrho;
    const cplx lam = ctx.spec.lambda_eps();
    const double a = ctx.spec.a;

    const cplx K = kernel_K(ctx, t, theta);
    const cplx L = kernel_L(ctx.spec, r, t, rho, theta);
    const cplx cf = cauchy_factor(ctx.spec, lr, t, lrho, theta);
    const cplx Q = std::exp(sig0 * ds + I * double(j0) * dtt);
    const cplx ct = std::conj(ctx.spec.c.eval(t));
    const cplx cth = ctx.spec.c.eval(theta);

    KernelValue kv;
    kv.r_less = r_less;
    kv.decomposed = true;
    kv.singular_part = I * Q * (cf + I * K * L);
    kv.singular_part2 =
        -I * ct / (2.0 * a) * Q * L + std::conj(cth / (2.0 * a) * Q * L);

    // truncated true sums of the kernel series
    RawAccum acc = raw_sums(ctx, lr, t, lrho, theta, thr, false);

    // truncated model sums, termwise the large-|m| asymptotics of the true
    // series; aligned by level (model index m sits at level j0 + m) so the
    // truncated differences are O(m^{-2})
    cplx m1{}, m2{};
    cplx g1_edge{}, g2_edge{};
    const int m_lo = r_less ? 0 : -ctx.J - j0;
    const int m_hi = r_less ? ctx.J - j0 : -1;
    const double sgn = r_less ? 1.0 : -1.0;
    const int m_edge = r_less ? m_hi : m_lo;
    for (int m = m_lo; m <= m_hi; ++m) {
        cplx G = Q * std::exp(lam * double(m) * ds + I * double(m) * dtt);
        cplx g1 = sgn * I * G;
        if (m != 0) g1 *= 1.0 + I * K / double(m);
        m1 += g1;
        cplx g2{};
        if (m != 0) {
            g2 = sgn * (-I * ct / (2.0 * a * m) * G +
                        std::conj(cth / (2.0 * a * m) * G));
            m2 += g2;
        }
        if (m == m_edge) {
            g1_edge = g1;
            g2_edge = g2;
        }
    }
    kv.remainder = acc.o1 - m1;
    kv.remainder2 = acc.o2 - m2;
    kv.omega1 = kv.singular_part + kv.remainder;
    kv.omega2 = kv.singular_part2 + kv.remainder2;

    // tail: the neglected level differences decay like D / m^2, so the tail
    // is about D / |m_edge| with D fitted from the last included difference
    {
        int j_edge = j0 + m_edge;
        cplx t1{}, t2{};
        if (j_edge >= -ctx.J && j_edge <= ctx.J) {
            const auto& bp = ctx.at(j_edge);
            for (const auto& br : branches(bp)) {
                double re = br.w->sigma.real();
                bool incl = r_less ? (re >= thr - REAL_AXIS_TOL)
                                   : (re < thr - REAL_AXIS_TOL);
                if (!incl) continue;
                t1 += 0.5 * product_omega1(*br.w, *br.v, lr, lrho, t, theta);
                t2 += 0.5 * product_omega2(*br.w, *br.v, lr, lrho, t, theta);
            }
            if (!r_less) {
                t1 = -t1;
                t2 = -t2;
            }
        }
        double d_edge = std::max(std::abs(t1 - g1_edge),
                                 std::abs(t2 - g2_edge));
        kv.tail_bound = d_edge * std::abs(double(m_edge == 0 ? 1 : m_edge));
        kv.tail_warning =
            kv.tail_bound > ctx.tail_tol * std::max(1.0, std::abs(kv.omega1) +
                                                             std::abs(kv.omega2));
    }
    return kv;
}

}  // namespace

KernelValue kernel_decomposed(const KernelContext& ctx, double r, double t,
                              double rho, double theta) {
    return decomposed_kernel(ctx, r, t, rho, theta,
                             ctx.spec.lambda_eps() * ctx.spec.nu, 0,
                             0.0);
}

KernelValue modified_kernels(const KernelContext& ctx, int j0, int branch,
                             double r, double t, double rho, double theta) {
    const BasicPair& bp = ctx.at(j0);
    const BasicSolution& w0 = (branch >= 0) ? bp.w_plus : bp.w_minus;
    return decomposed_kernel(ctx, r, t, rho, theta, w0.sigma, j0,
                             w0.sigma.real());
}

}  // namespace dclab
