#include "dclab/cylinder_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dclab/operator_core.hpp"

namespace dclab {

namespace {

constexpr cplx I(0.0, 1.0);
constexpr double NEUTRAL_TOL = 1e-9;

int nearest_row(const std::vector<double>& radii, double r) {
    int best = 0;
    double bd = 1e300;
    for (size_t i = 0; i < radii.size(); ++i) {
        double d = std::abs(std::log(radii[i]) - std::log(r));
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

double LaurentExpansion::coef(int j, int branch) const {
    if (j < -J || j > J)
        throw std::out_of_range("LaurentExpansion::coef: level outside window");
    return (branch >= 0) ? a_plus[static_cast<size_t>(j + J)]
                         : a_minus[static_cast<size_t>(j + J)];
}

namespace {

// a_j^± at one grid row (trapezoid in theta, spectrally accurate)
void coefficients_at_row(const KernelContext& ctx, const CylinderFunction& u,
                         int row, int J, std::vector<double>& ap,
                         std::vector<double>& am) {
    const int M = u.M;
    const double lr = std::log(u.radii[static_cast<size_t>(row)]);
    ap.assign(static_cast<size_t>(2 * J + 1), 0.0);
    am.assign(static_cast<size_t>(2 * J + 1), 0.0);
    for (int j = -J; j <= J; ++j) {
        const BasicPair& bp = ctx.at(j);
        for (int b = 0; b < 2; ++b) {
            const BasicSolution& v = b == 0 ? bp.ws_plus : bp.ws_minus;
            // w*_{-j}(R0, theta) = R0^{mu} X + conj(R0^{mu} Z), mu = -sigma
            cplx acc = 0.0;
            cplx pw = std::exp(v.sigma * lr);
            for (int k = 0; k < M; ++k) {
                double th = u.t(k);
                cplx ws = pw * v.phi.eval(th) + std::conj(pw * v.psi.eval(th));
                acc += ws * u.at(row, k);
            }
            double a = (-1.0 / (2.0 * PI)) * (acc * I).real() * (TWO_PI / M);
            (b == 0 ? ap : am)[static_cast<size_t>(j + J)] = a;
        }
    }
}

}  // namespace

LaurentExpansion laurent_coefficients(const KernelContext& ctx,
                                      const CylinderFunction& u, double R0,
                                      int J, double tol) {
    if (J > ctx.J)
        throw std::invalid_argument(
            "laurent_coefficients: truncation exceeds the context window");
    if (u.P() < 2) throw std::invalid_argument("laurent_coefficients: grid");
    int row = nearest_row(u.radii, R0);
    int row2 = (row >= u.P() / 2) ? std::max(0, row - std::max(2, u.P() / 8))
                                  : std::min(u.P() - 1,
                                             row + std::max(2, u.P() / 8));
    LaurentExpansion ex;
    ex.J = J;
    coefficients_at_row(ctx, u, row, J, ex.a_plus, ex.a_minus);
    std::vector<double> bp, bm;
    coefficients_at_row(ctx, u, row2, J, bp, bm);
    double dep = 0.0;
    for (size_t i = 0; i < ex.a_plus.size(); ++i) {
        dep = std::max(dep, std::abs(ex.a_plus[i] - bp[i]) /
                                std::max(1.0, std::abs(ex.a_plus[i])));
        dep = std::max(dep, std::abs(ex.a_minus[i] - bm[i]) /
                                std::max(1.0, std::abs(ex.a_minus[i])));
    }
    ex.r0_dependence = dep;
    ex.solution_like = dep <= std::max(tol, 1e-6);
    return ex;
}

cplx laurent_evaluate(const KernelContext& ctx, const LaurentExpansion& ex,
                      double r, double t, bool bounded_only) {
    cplx val = 0.0;
    double cmax = 0.0;
    for (size_t i = 0; i < ex.a_plus.size(); ++i)
        cmax = std::max({cmax, std::abs(ex.a_plus[i]), std::abs(ex.a_minus[i])});
    // coefficients at roundoff level are treated as absent (they would
    // otherwise spuriously trip the pole detection at r = 0)
    const double floor = 1e-12 * std::max(1.0, cmax);
    for (int j = -ex.J; j <= ex.J; ++j) {
        const BasicPair& bp = ctx.at(j);
        for (int b = 0; b < 2; ++b) {
            double a = (b == 0) ? ex.a_plus[static_cast<size_t>(j + ex.J)]
                                : ex.a_minus[static_cast<size_t>(j + ex.J)];
            if (std::abs(a) <= floor) continue;
            const BasicSolution& w = (b == 0) ? bp.w_plus : bp.w_minus;
            double re = w.sigma.real();
            if (bounded_only && re < -NEUTRAL_TOL) continue;
            if (r == 0.0) {
                if (re < -NEUTRAL_TOL)
                    throw std::domain_error(
                        "laurent_evaluate: negative-order term at r = 0");
                if (std::abs(w.sigma) <= NEUTRAL_TOL) {
                    // exponent zero: the solution extends with value f(t)
                    val += a * (w.phi.eval(t) + std::conj(w.psi.eval(t)));
                } else if (re <= NEUTRAL_TOL) {
                    throw std::domain_error(
                        "laurent_evaluate: oscillatory term has no limit at "
                        "r = 0");
                }
                continue;
            }
            val += a * w.eval(r, t);
        }
    }
    return val;
}

cplx cauchy_integral(const KernelContext& ctx,
                     const std::vector<BoundaryCircle>& boundary, double r,
                     double t) {
    cplx val = 0.0;
    for (const auto& c : boundary) {
        const int M = static_cast<int>(c.u.size());
        if (M < 4) throw std::invalid_argument("cauchy_integral: sampling");
        double orient = c.outer ? 1.0 : -1.0;
        cplx acc = 0.0;
        for (int l = 0; l < M; ++l) {
            double th = TWO_PI * l / M;
            KernelValue kv = kernel_decomposed(ctx, r, t, c.rho, th);
            // dzeta/zeta = i dtheta on a circle; the conjugate leg carries -i
            acc += kv.omega1 * c.u[static_cast<size_t>(l)] * (I * orient) +
                   std::conj(kv.omega2) * std::conj(c.u[static_cast<size_t>(l)]) *
                       (-I * orient);
        }
        val += acc * (TWO_PI / M);
    }
    return val * (-1.0 / (2.0 * PI));
}

double norm_pa(const OperatorSpec& spec, const CylinderFunction& F, double p) {
    const int P = F.P(), M = F.M;
    if (P < 2) throw std::invalid_argument("norm_pa: grid");
    const double hs = std::log(F.radii[1]) - std::log(F.radii[0]);
    const double ht = TWO_PI / M;
    const double a = spec.a;
    double acc = 0.0;
    for (int i = 0; i < P; ++i) {
        double s = std::log(F.radii[static_cast<size_t>(i)]);
        double w = (i == 0 || i == P - 1) ? 0.5 : 1.0;
        double rowsum = 0.0;
        for (int k = 0; k < M; ++k)
            rowsum += std::pow(std::abs(F.at(i, k)), p);
        acc += w * rowsum * std::exp((2.0 * a - a * p) * s);
    }
    return std::pow(acc * hs * ht, 1.0 / p);
}

namespace {

// -------------------- shared evaluation machinery for T --------------------

struct LevelSamples {
    cplx sigma;                    // forward exponent
    cplx mu;                       // adjoint exponent (= -sigma)
    std::vector<cplx> phi_t, psi_t;  // forward pair at the t nodes
    std::vector<cplx> X_c, Z_c;      // adjoint pair at the theta cell centers
    bool neutral = false;            // |Re sigma| below tolerance
};

// Targets live on the M angular nodes of the grid; quadrature sources live
// on Mq = f * M refined cell centers. The refinement keeps the quadrature
// cells roughly isotropic in (a log rho, theta), which the near-diagonal
// accuracy depends on; the source values are recovered by trigonometric
// interpolation, exact for band-limited data.
struct Table {
    const KernelContext* ctx = nullptr;
    int M = 0, Mq = 0;
    double ht = 0.0, htq = 0.0;
    std::vector<LevelSamples> lv;
    std::vector<cplx> k_t, k_c;  // phase correction at nodes / centers
    std::vector<cplx> c_t, c_c;  // coefficient at nodes / centers
};

Table make_table(const KernelContext& ctx, int M, int Mq) {
    Table tb;
    tb.ctx = &ctx;
    tb.M = M;
    tb.Mq = Mq;
    tb.ht = TWO_PI / M;
    tb.htq = TWO_PI / Mq;
    tb.k_t.resize(static_cast<size_t>(M));
    tb.c_t.resize(static_cast<size_t>(M));
    for (int k = 0; k < M; ++k) {
        double t = tb.ht * k;
        tb.k_t[static_cast<size_t>(k)] = ctx.k_phase.eval(t);
        tb.c_t[static_cast<size_t>(k)] = ctx.spec.c.eval(t);
    }
    tb.k_c.resize(static_cast<size_t>(Mq));
    tb.c_c.resize(static_cast<size_t>(Mq));
    for (int k = 0; k < Mq; ++k) {
        double thc = tb.htq * (k + 0.5);
        tb.k_c[static_cast<size_t>(k)] = ctx.k_phase.eval(thc);
        tb.c_c[static_cast<size_t>(k)] = ctx.spec.c.eval(thc);
    }
    for (const auto& bp : ctx.pairs) {
        for (int b = 0; b < 2; ++b) {
            const BasicSolution& w = (b == 0) ? bp.w_plus : bp.w_minus;
            const BasicSolution& v = (b == 0) ? bp.ws_plus : bp.ws_minus;
            LevelSamples ls;
            ls.sigma = w.sigma;
            ls.mu = v.sigma;
            ls.neutral = std::abs(w.sigma.real()) <= NEUTRAL_TOL;
            ls.phi_t.resize(static_cast<size_t>(M));
            ls.psi_t.resize(static_cast<size_t>(M));
            for (int k = 0; k < M; ++k) {
                double t = tb.ht * k;
                ls.phi_t[static_cast<size_t>(k)] = w.phi.eval(t);
                ls.psi_t[static_cast<size_t>(k)] = w.psi.eval(t);
            }
            ls.X_c.resize(static_cast<size_t>(Mq));
            ls.Z_c.resize(static_cast<size_t>(Mq));
            for (int k = 0; k < Mq; ++k) {
                double thc = tb.htq * (k + 0.5);
                ls.X_c[static_cast<size_t>(k)] = v.phi.eval(thc);
                ls.Z_c[static_cast<size_t>(k)] = v.psi.eval(thc);
            }
            tb.lv.push_back(std::move(ls));
        }
    }
    return tb;
}

struct KernelMode {
    cplx sig0;         // exponent of the singular prefactor
    int j0 = 0;        // winding of the singular prefactor
    double thr = 0.0;  // inclusion threshold on Re sigma
    bool hat = false;  // drop neutral levels
};

KernelMode make_mode(const KernelContext& ctx, const SolveOptions& opt) {
    KernelMode md;
    switch (opt.mode) {
        case TMode::plain:
            md.sig0 = ctx.spec.lambda_eps() * ctx.spec.nu;
            break;
        case TMode::hat:
            md.sig0 = ctx.spec.lambda_eps() * ctx.spec.nu;
            md.hat = true;
            break;
        case TMode::modified: {
            const BasicPair& bp = ctx.at(opt.j0);
            const BasicSolution& w0 =
                (opt.branch >= 0) ? bp.w_plus : bp.w_minus;
            md.sig0 = w0.sigma;
            md.j0 = opt.j0;
            md.thr = w0.sigma.real();
            break;
        }
    }
    return md;
}

// per-(target row, source row) level power cache
struct RowPowers {
    std::vector<cplx> e1, e2;  // exp(sig st + mu sc), exp(sig st + conj(mu) sc)
    cplx eL;                   // exp(lambda_eps (st - sc))
    cplx Qs;                   // exp(sig0 (st - sc))
    double ds = 0.0;
};

RowPowers make_row_powers(const Table& tb, const KernelMode& md, double st,
                          double sc) {
    RowPowers rp;
    rp.ds = st - sc;
    rp.eL = std::exp(tb.ctx->spec.lambda_eps() * rp.ds);
    rp.Qs = std::exp(md.sig0 * rp.ds);
    rp.e1.reserve(tb.lv.size());
    rp.e2.reserve(tb.lv.size());
    for (const auto& ls : tb.lv) {
        rp.e1.push_back(std::exp(ls.sigma * st + ls.mu * sc));
        rp.e2.push_back(std::exp(ls.sigma * st + std::conj(ls.mu) * sc));
    }
    return rp;
}

// closed singular parts at a point (shared by the cell evaluation and the
// refinement passes); dtt = t - theta, K/ct/cth supplied by the caller
struct SingularParts {
    cplx s1, s1_cauchy, s1_log, s2;
    // regime offset: the Cauchy factor for ds > 0 is zeta/(zeta-z) - 1, so
    // the polar pushforward of zeta/(zeta-z) must be complemented by -i Q
    cplx disc{};
};

SingularParts singular_parts(const Table& tb, const KernelMode& md, double ds,
                             double dtt, cplx K, cplx ct, cplx cth) {
    const cplx lam = tb.ctx->spec.lambda_eps();
    const double a = tb.ctx->spec.a;
    cplx q, cf;
    if (ds <= 0.0) {
        q = std::exp(lam * ds + I * dtt);
        cf = 1.0 / (1.0 - q);
    } else {
        q = std::exp(-lam * ds - I * dtt);
        cf = -q / (1.0 - q);
    }
    cplx L = -std::log(1.0 - q);
    cplx Q = std::exp(md.sig0 * ds + I * double(md.j0) * dtt);
    SingularParts sp;
    if (ds > 0.0) sp.disc = -I * Q;
    sp.s1_cauchy = I * Q * cf;
    sp.s1_log = I * Q * (I * K * L);
    sp.s1 = sp.s1_cauchy + sp.s1_log;
    sp.s2 = -I * std::conj(ct) / (2.0 * a) * Q * L +
            std::conj(cth / (2.0 * a) * Q * L);
    return sp;
}

// decomposed kernel pair at (target node k_t, source center k_c) given the
// row power cache; the mirror of the public decomposed path
void cell_kernel(const Table& tb, const KernelMode& md, const RowPowers& rp,
                 int kt, int kc, cplx* o1, cplx* o2) {
    const int J = tb.ctx->J;
    const double ds = rp.ds;
    const bool r_less = ds <= 0.0;
    const double dtt = tb.ht * kt - tb.htq * (kc + 0.5);
    const cplx K = tb.k_t[static_cast<size_t>(kt)] -
                   tb.k_c[static_cast<size_t>(kc)];
    const cplx ct = tb.c_t[static_cast<size_t>(kt)];
    const cplx cth = tb.c_c[static_cast<size_t>(kc)];
    SingularParts sp = singular_parts(tb, md, ds, dtt, K, ct, cth);

    // truncated true sums
    cplx t1 = 0.0, t2 = 0.0;
    for (size_t l = 0; l < tb.lv.size(); ++l) {
        const LevelSamples& ls = tb.lv[l];
        double re = ls.sigma.real();
        bool incl = r_less ? (re >= md.thr - NEUTRAL_TOL)
                           : (re < md.thr - NEUTRAL_TOL);
        if (!incl || (md.hat && ls.neutral)) continue;
        cplx e1 = rp.e1[l], e2 = rp.e2[l];
        cplx ph = ls.phi_t[static_cast<size_t>(kt)];
        cplx ps = ls.psi_t[static_cast<size_t>(kt)];
        cplx X = ls.X_c[static_cast<size_t>(kc)];
        cplx Zc = std::conj(ls.Z_c[static_cast<size_t>(kc)]);
        t1 += ph * X * e1 + ph * Zc * e2 +
              std::conj(ps) * X * std::conj(e2) +
              std::conj(ps) * Zc * std::conj(e1);
        t2 += std::conj(ph) * X * std::conj(e2) +
              std::conj(ph) * Zc * std::conj(e1) + ps * X * e1 + ps * Zc * e2;
    }
    double half = r_less ? 0.5 : -0.5;
    t1 *= half;
    t2 *= half;

    // truncated model sums, aligned by level
    const double a = tb.ctx->spec.a;
    const int m_lo = r_less ? 0 : -J - md.j0;
    const int m_hi = r_less ? J - md.j0 : -1;
    const double sgn = r_less ? 1.0 : -1.0;
    const cplx step = rp.eL * std::exp(I * dtt);
    const cplx Q0 = rp.Qs * std::exp(I * double(md.j0) * dtt);
    cplx m1 = 0.0, m2 = 0.0;
    cplx G = Q0 * std::pow(step, m_lo);
    for (int m = m_lo; m <= m_hi; ++m) {
        cplx g1 = sgn * I * G;
        if (m != 0) {
            g1 *= 1.0 + I * K / double(m);
            m2 += sgn * (-I * std::conj(ct) / (2.0 * a * m) * G +
                         std::conj(cth / (2.0 * a * m) * G));
        }
        m1 += g1;
        G *= step;
    }
    *o1 = sp.s1 + (t1 - m1);
    *o2 = sp.s2 + (t2 - m2);
}

struct Workspace {
    const KernelContext* ctx;
    const CylinderFunction* F;
    Table tb;
    KernelMode md;
    SolveOptions opt;
    int P, M;
    int Mq = 0;  // refined angular quadrature resolution (multiple of M)
    double hs, ht;
    double htq = 0.0;
    std::vector<double> s;       // node log-radii
    std::vector<double> sc;      // cell-center log-radii (P-1)
    std::vector<cplx> Fc;        // interpolated cell-center values, (P-1) x Mq
    std::vector<cplx> Fhat;      // per-row discrete Fourier coefficients P x M
    cplx fc(int i, int k) const {
        return Fc[static_cast<size_t>(i) * Mq + ((k % Mq + Mq) % Mq)];
    }
};

// trigonometric interpolation in theta (exact for band-limited rows) with
// cubic Lagrange across the log-radius rows; the quadrature accuracy of the
// near-window refinement hinges on this being high order in both directions
cplx interp_F(const Workspace& w, double s, double th) {
    const int P = w.P, M = w.M;
    double x = (s - w.s[0]) / w.hs;
    x = std::clamp(x, 0.0, double(P - 1));
    int i0 = std::clamp(static_cast<int>(x) - 1, 0, P - 4);
    double wt[4];
    for (int a = 0; a < 4; ++a) {
        double num = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) num *= (x - (i0 + b)) / double(a - b);
        wt[a] = num;
    }
    // signed frequencies: m and m - M for m past the midpoint
    cplx rowval[4] = {0.0, 0.0, 0.0, 0.0};
    cplx e = std::exp(I * th), em = 1.0;
    const cplx eneg = std::exp(-I * double(M) * th);
    for (int m = 0; m < M; ++m) {
        cplx ph = (m <= M / 2) ? em : em * eneg;
        for (int a = 0; a < 4; ++a)
            rowval[a] += w.Fhat[static_cast<size_t>(i0 + a) * M + m] * ph;
        em *= e;
    }
    cplx val = 0.0;
    for (int a = 0; a < 4; ++a) val += wt[a] * rowval[a];
    return val;
}

Workspace make_workspace(const KernelContext& ctx, const CylinderFunction& F,
                         const SolveOptions& opt) {
    Workspace w;
    w.ctx = &ctx;
    w.F = &F;
    w.opt = opt;
    w.P = F.P();
    w.M = F.M;
    if (w.P < 8) throw std::invalid_argument("solve_T: grid too coarse");
    w.s.resize(static_cast<size_t>(w.P));
    for (int i = 0; i < w.P; ++i)
        w.s[static_cast<size_t>(i)] = std::log(F.radii[static_cast<size_t>(i)]);
    w.hs = w.s[1] - w.s[0];
    for (int i = 2; i < w.P; ++i)
        if (std::abs(w.s[static_cast<size_t>(i)] -
                     w.s[static_cast<size_t>(i - 1)] - w.hs) > 1e-9 * w.hs)
            throw std::invalid_argument("solve_T: radii must be log-uniform");
    w.ht = TWO_PI / w.M;
    // refine the angular quadrature toward isotropic cells
    int f = std::clamp(static_cast<int>(std::lround(w.ht / w.hs)), 1, 16);
    w.Mq = w.M * f;
    w.htq = TWO_PI / w.Mq;
    w.tb = make_table(ctx, w.M, w.Mq);
    w.md = make_mode(ctx, opt);
    w.sc.resize(static_cast<size_t>(w.P - 1));
    for (int i = 0; i + 1 < w.P; ++i)
        w.sc[static_cast<size_t>(i)] = 0.5 * (w.s[static_cast<size_t>(i)] +
                                              w.s[static_cast<size_t>(i + 1)]);
    // per-row discrete Fourier coefficients (for the interpolation)
    w.Fhat.assign(static_cast<size_t>(w.P) * w.M, cplx(0.0));
    for (int i = 0; i < w.P; ++i)
        for (int m = 0; m < w.M; ++m) {
            cplx acc = 0.0;
            for (int k = 0; k < w.M; ++k)
                acc += F.at(i, k) *
                       std::exp(-I * (TWO_PI * m * k / double(w.M)));
            w.Fhat[static_cast<size_t>(i) * w.M + m] = acc / double(w.M);
        }
    w.Fc.resize(static_cast<size_t>(w.P - 1) * w.Mq);
    for (int i = 0; i + 1 < w.P; ++i)
        for (int k = 0; k < w.Mq; ++k)
            w.Fc[static_cast<size_t>(i) * w.Mq + k] =
                interp_F(w, w.sc[static_cast<size_t>(i)],
                         w.htq * (k + 0.5));
    return w;
}

int angdist(int a, int b, int M) {
    int d = std::abs(a - b) % M;
    return std::min(d, M - d);
}

// smooth radial cutoff around the target in cell units: 1 inside the core,
// 0 beyond 1.8 cells (strictly inside the nw = 2 window, so the polar pass
// never meets a hard cell boundary)
double near_cutoff(double ds, double dtt, double hs, double ht) {
    double rr = std::sqrt((ds / hs) * (ds / hs) + (dtt / ht) * (dtt / ht));
    if (rr <= 0.9) return 1.0;
    if (rr >= 1.8) return 0.0;
    double x = (rr - 0.9) / 0.9;
    return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double wrap_pi(double x) {
    x = std::remainder(x, TWO_PI);
    return x;
}

// Near-window refinement for one target node. Only the cutoff-weighted part
// chi * (singular kernel) is replaced: its midpoint values are subtracted and
// the integral is re-added via (a) a polar pushforward for the Cauchy part,
// (b) subdivided midpoints for the logarithmic and jump parts. The smooth
// leftover (1 - chi) * singular stays inside the global midpoint sum, which
// keeps the composite midpoint rule's telescoping accuracy intact.
cplx near_window_correction(const Workspace& w, int it, int kt) {
    const int nw = 2;
    const double st = w.s[static_cast<size_t>(it)];
    const double tt = w.ht * kt;
    const cplx K_base = w.tb.k_t[static_cast<size_t>(kt)];
    const cplx ct = w.tb.c_t[static_cast<size_t>(kt)];
    const double a = w.ctx->spec.a;
    const cplx lam = w.ctx->spec.lambda_eps();
    const double eps_t = w.ctx->spec.epsilon;
    const double be = w.ctx->spec.b * eps_t;

    int ilo = std::max(0, it - nw), ihi = std::min(w.P - 2, it + nw - 1);
    cplx corr = 0.0;
    const double cellw = w.hs * w.htq;
    const int ktf = kt * (w.Mq / w.M);  // target angle on the refined grid

    auto theta_in_window = [&](int kc) {
        return angdist(kc, ktf, w.Mq) <= nw || angdist(kc + 1, ktf, w.Mq) <= nw;
    };

    // pass 1: remove the chi-weighted midpoint singular parts, re-add the
    // chi-weighted log and jump parts on a subdivided grid (the chi-weighted
    // Cauchy part is re-added in pass 2)
    const int sub = 4;
    for (int ic = ilo; ic <= ihi; ++ic) {
        double dsm = st - w.sc[static_cast<size_t>(ic)];
        for (int kc = 0; kc < w.Mq; ++kc) {
            if (!theta_in_window(kc)) continue;
            double dttm = wrap_pi(tt - w.htq * (kc + 0.5));
            double chim = near_cutoff(dsm, dttm, w.hs, w.htq);
            if (chim > 0.0) {
                cplx K = K_base - w.tb.k_c[static_cast<size_t>(kc)];
                cplx cth = w.tb.c_c[static_cast<size_t>(kc)];
                SingularParts mid =
                    singular_parts(w.tb, w.md, dsm, dttm, K, ct, cth);
                cplx Fm = w.fc(ic, kc);
                corr -= chim * (mid.s1 * Fm + std::conj(mid.s2 * Fm)) * cellw;
            }
            cplx logsum = 0.0;
            for (int p = 0; p < sub; ++p)
                for (int q = 0; q < sub; ++q) {
                    double ssub = w.s[static_cast<size_t>(ic)] +
                                  (p + 0.5) * w.hs / sub;
                    double thsub = w.htq * kc + (q + 0.5) * w.htq / sub;
                    double ds = st - ssub;
                    double dtt = wrap_pi(tt - thsub);
                    double chi = near_cutoff(ds, dtt, w.hs, w.htq);
                    if (chi == 0.0) continue;
                    cplx Ks = K_base - w.ctx->k_phase.eval(thsub);
                    cplx cs = w.ctx->spec.c.eval(thsub);
                    SingularParts sp =
                        singular_parts(w.tb, w.md, ds, dtt, Ks, ct, cs);
                    cplx Fs = interp_F(w, ssub, thsub);
                    logsum += chi * ((sp.s1_log + sp.disc) * Fs +
                                     std::conj(sp.s2 * Fs));
                }
            corr += logsum * cellw / double(sub * sub);
        }
    }

    // pass 2: polar pushforward of the cutoff Cauchy part. With zeta =
    // exp(lam s + i theta) the measure is ds dtheta = dxi deta / (a |zeta|^2),
    // and the integrand becomes i Q chi F / (a (zeta - z) conj(zeta)); about
    // z this is bounded after the polar Jacobian, and the cutoff removes the
    // cell-boundary clipping the hard window indicator would cause
    cplx z = std::exp(lam * st + I * tt);
    double Rpol = 0.0;
    for (int q = 0; q < 16; ++q) {
        // boundary of the cutoff support ellipse |(ds/hs, dtt/htq)| = 1.8
        double al = TWO_PI * q / 16;
        cplx zz = std::exp(lam * (st + 1.8 * w.hs * std::cos(al)) +
                           I * (tt + 1.8 * w.htq * std::sin(al)));
        Rpol = std::max(Rpol, std::abs(zz - z));
    }
    Rpol *= 1.05;
    const int na = w.opt.polar_angular, nr = w.opt.polar_radial;
    cplx polar = 0.0;
    for (int qa = 0; qa < na; ++qa) {
        double al = TWO_PI * (qa + 0.5) / na;
        cplx dir = std::exp(I * al);
        for (int qr = 0; qr < nr; ++qr) {
            double rp = Rpol * (qr + 0.5) / nr;
            cplx zeta = z + rp * dir;
            if (std::abs(zeta) < 1e-300) continue;
            double ss = std::log(std::abs(zeta)) / a;
            double th = std::arg(zeta) - be * ss;
            double ds = st - ss;
            double dtt = wrap_pi(tt - th);
            double chi = near_cutoff(ds, dtt, w.hs, w.htq);
            if (chi == 0.0) continue;
            // membership: the covering cell must belong to the (possibly
            // domain-clipped) window
            double xi = (ss - w.s[0]) / w.hs;
            int ic = static_cast<int>(std::floor(xi));
            if (ic < ilo || ic > ihi) continue;
            double yk = th / w.htq;
            yk -= std::floor(yk / w.Mq) * w.Mq;
            int kc = static_cast<int>(yk) % w.Mq;
            if (!theta_in_window(kc)) continue;
            cplx Q = std::exp(w.md.sig0 * ds + I * double(w.md.j0) * dtt);
            cplx Fs = interp_F(w, ss, th);
            polar +=
                I * Q * chi * Fs * std::exp(-I * al) / (a * std::conj(zeta));
        }
    }
    corr += polar * (Rpol / nr) * (TWO_PI / na);
    return corr * (-1.0 / (2.0 * PI));
}

// band contribution (direct cells within the diagonal band) for one target
cplx band_contribution(const Workspace& w, int it, int kt, int nb) {
    const double st = w.s[static_cast<size_t>(it)];
    cplx acc = 0.0;
    int ilo = std::max(0, it - nb), ihi = std::min(w.P - 2, it + nb - 1);
    for (int ic = ilo; ic <= ihi; ++ic) {
        RowPowers rp = make_row_powers(w.tb, w.md, st,
                                       w.sc[static_cast<size_t>(ic)]);
        for (int kc = 0; kc < w.Mq; ++kc) {
            cplx o1, o2;
            cell_kernel(w.tb, w.md, rp, kt, kc, &o1, &o2);
            cplx Fm = w.fc(ic, kc);
            acc += o1 * Fm + std::conj(o2 * Fm);
        }
    }
    return acc * (w.hs * w.htq) * (-1.0 / (2.0 * PI));
}

// far-field via the separable level structure with radial recurrences:
// out[l][it] and in[l][it] accumulate
//   sum_rows exp(sigma st + mu sc) Pc and exp(sigma st + conj(mu) sc) conj(Pc)
// where Pc is the theta row sum of (X + conj(Z)-paired) F
void separable_far(const Workspace& w, int nb, std::vector<cplx>& far) {
    const size_t L = w.tb.lv.size();
    const int P = w.P, M = w.M;
    far.assign(static_cast<size_t>(P) * M, cplx(0.0));

    // theta row sums per level per cell row: Pc = SX + conj(SZ)
    std::vector<cplx> Pc(L * static_cast<size_t>(P - 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int li = 0; li < static_cast<int>(L); ++li) {
        const LevelSamples& ls = w.tb.lv[static_cast<size_t>(li)];
        for (int ic = 0; ic + 1 < P; ++ic) {
            cplx sx = 0.0, sz = 0.0;
            for (int kc = 0; kc < w.Mq; ++kc) {
                cplx Fm = w.fc(ic, kc);
                sx += ls.X_c[static_cast<size_t>(kc)] * Fm;
                sz += std::conj(ls.Z_c[static_cast<size_t>(kc)]) * Fm;
            }
            Pc[static_cast<size_t>(li) * (P - 1) + ic] = sx + std::conj(sz);
        }
    }

    // per level: S(it) = Ea + Eb over the out or in rows (radial recurrence)
    std::vector<cplx> S(L * static_cast<size_t>(P), cplx(0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int li = 0; li < static_cast<int>(L); ++li) {
        const LevelSamples& ls = w.tb.lv[static_cast<size_t>(li)];
        if (w.md.hat && ls.neutral) continue;
        double re = ls.sigma.real();
        bool upper = re >= w.md.thr - NEUTRAL_TOL;
        auto addrow = [&](cplx& Ea, cplx& Eb, int ic, double st) {
            double scv = w.sc[static_cast<size_t>(ic)];
            cplx pc = Pc[static_cast<size_t>(li) * (P - 1) + ic];
            Ea += std::exp(ls.sigma * st + ls.mu * scv) * pc;
            Eb += std::exp(ls.sigma * st + std::conj(ls.mu) * scv) *
                  std::conj(pc);
        };
        if (upper) {
            // out region: cell rows ic >= it + nb, descending targets
            cplx Ea = 0.0, Eb = 0.0;
            for (int it = P - 1; it >= 0; --it) {
                double st = w.s[static_cast<size_t>(it)];
                if (it < P - 1) {
                    cplx f = std::exp(ls.sigma *
                                      (st - w.s[static_cast<size_t>(it + 1)]));
                    Ea *= f;
                    Eb *= f;
                    int ic = it + nb;  // row entering the out set
                    if (ic >= 0 && ic <= P - 2) addrow(Ea, Eb, ic, st);
                }
                if (it == P - 1)
                    for (int ic = it + nb; ic <= P - 2; ++ic)
                        addrow(Ea, Eb, ic, st);
                S[static_cast<size_t>(li) * P + it] = Ea + Eb;
            }
        } else {
            // in region: cell rows ic <= it - nb - 1, ascending targets
            cplx Ea = 0.0, Eb = 0.0;
            for (int it = 0; it < P; ++it) {
                double st = w.s[static_cast<size_t>(it)];
                if (it > 0) {
                    cplx f = std::exp(ls.sigma *
                                      (st - w.s[static_cast<size_t>(it - 1)]));
                    Ea *= f;
                    Eb *= f;
                    int ic = it - nb - 1;
                    if (ic >= 0 && ic <= P - 2) addrow(Ea, Eb, ic, st);
                }
                S[static_cast<size_t>(li) * P + it] = Ea + Eb;
            }
        }
    }

    // assemble: TF_far = -(1/4pi) sum_l (+/-) [phi S + conj(psi S)] h_s h_t
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int it = 0; it < P; ++it) {
        for (int kt = 0; kt < M; ++kt) {
            cplx acc = 0.0;
            for (size_t li = 0; li < L; ++li) {
                const LevelSamples& ls = w.tb.lv[li];
                if (w.md.hat && ls.neutral) continue;
                double re = ls.sigma.real();
                double sign = (re >= w.md.thr - NEUTRAL_TOL) ? 1.0 : -1.0;
                cplx Sv = S[li * static_cast<size_t>(P) + it];
                acc += sign * (ls.phi_t[static_cast<size_t>(kt)] * Sv +
                               std::conj(ls.psi_t[static_cast<size_t>(kt)] *
                                         Sv));
            }
            far[static_cast<size_t>(it) * M + kt] =
                acc * (w.hs * w.htq) * (-1.0 / (4.0 * PI));
        }
    }
}

// serial reference: direct quadrature over every cell with the decomposed
// kernel values (no separable shortcut), same near-window refinement
cplx reference_target(const Workspace& w, int it, int kt) {
    const double st = w.s[static_cast<size_t>(it)];
    cplx acc = 0.0;
    for (int ic = 0; ic + 1 < w.P; ++ic) {
        RowPowers rp = make_row_powers(w.tb, w.md, st,
                                       w.sc[static_cast<size_t>(ic)]);
        for (int kc = 0; kc < w.Mq; ++kc) {
            cplx o1, o2;
            cell_kernel(w.tb, w.md, rp, kt, kc, &o1, &o2);
            cplx Fm = w.fc(ic, kc);
            acc += o1 * Fm + std::conj(o2 * Fm);
        }
    }
    return acc * (w.hs * w.htq) * (-1.0 / (2.0 * PI));
}

// the S_0 limit values A^+ f^+ + A^- f^- when 0 is a spectral value
std::vector<cplx> value_at_zero(const Workspace& w) {
    std::vector<cplx> out(static_cast<size_t>(w.M), cplx(0.0));
    const KernelContext& ctx = *w.ctx;
    for (const auto& bp : ctx.pairs) {
        if (std::abs(bp.w_plus.sigma) > NEUTRAL_TOL ||
            std::abs(bp.w_minus.sigma) > NEUTRAL_TOL)
            continue;
        for (int b = 0; b < 2; ++b) {
            const BasicSolution& f0 = (b == 0) ? bp.w_plus : bp.w_minus;
            const BasicSolution& g0 = (b == 0) ? bp.ws_plus : bp.ws_minus;
            cplx acc = 0.0;
            for (int ic = 0; ic + 1 < w.P; ++ic)
                for (int kc = 0; kc < w.Mq; ++kc) {
                    double th = w.htq * (kc + 0.5);
                    cplx g = g0.phi.eval(th) + std::conj(g0.psi.eval(th));
                    acc += g * w.fc(ic, kc);
                }
            double A = (-1.0 / (2.0 * PI)) * acc.real() * w.hs * w.htq;
            for (int k = 0; k < w.M; ++k) {
                double t = w.ht * k;
                out[static_cast<size_t>(k)] +=
                    A * (f0.phi.eval(t) + std::conj(f0.psi.eval(t)));
            }
        }
        break;
    }
    return out;
}

}  // namespace

SolveReport solve_T(const KernelContext& ctx, const CylinderFunction& F,
                    double R, const SolveOptions& opt) {
    if (!F.radii.empty() && F.radii.back() > R * (1.0 + 1e-12))
        throw std::invalid_argument("solve_T: grid extends beyond R");
    Workspace w = make_workspace(ctx, F, opt);
    SolveReport rep;

    double p = opt.p_exponent > 0.0
                   ? opt.p_exponent
                   : std::max(2.0 / (1.0 - ctx.spec.nu) + 1.0, 3.0);
    rep.norm_pa = norm_pa(ctx.spec, F, p);
    if (!std::isfinite(rep.norm_pa))
        throw std::invalid_argument("solve_T: F is not p-integrable");
    {
        // integrability trend near the characteristic circle
        auto rowmass = [&](int i) {
            double m = 0.0;
            for (int k = 0; k < w.M; ++k)
                m += std::pow(std::abs(F.at(i, k)), p);
            return m * std::exp((2.0 - p) * ctx.spec.a *
                                w.s[static_cast<size_t>(i)]);
        };
        if (rowmass(0) > 2.0 * rowmass(1) + 1e-300 &&
            rowmass(1) > 2.0 * rowmass(2) + 1e-300) {
            rep.flagged = true;
            rep.message = "integrability marginal near r = 0";
        }
    }

    const int nb = std::max(2, opt.band_cells);
    CylinderFunction u = CylinderFunction::zeros(F.radii, F.M);

    if (opt.parallel) {
        std::vector<cplx> far;
        separable_far(w, nb, far);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int it = 0; it < w.P; ++it)
            for (int kt = 0; kt < w.M; ++kt)
                u.at(it, kt) = far[static_cast<size_t>(it) * w.M + kt] +
                               band_contribution(w, it, kt, nb) +
                               near_window_correction(w, it, kt);
    } else {
        for (int it = 0; it < w.P; ++it)
            for (int kt = 0; kt < w.M; ++kt)
                u.at(it, kt) = reference_target(w, it, kt) +
                               near_window_correction(w, it, kt);
    }

    rep.solution = u;
    rep.value_at_S0 = w.md.hat ? std::vector<cplx>(static_cast<size_t>(w.M))
                               : value_at_zero(w);

    // interior residual of L u = F
    CylinderFunction Lu = apply_Lop(ctx.spec, u);
    double resid = 0.0;
    for (int i = 2; i < w.P - 2; ++i)
        for (int k = 0; k < w.M; ++k)
            resid = std::max(resid, std::abs(Lu.at(i, k) - F.at(i, k)));
    rep.residual = resid;
    rep.iterations = 1;
    rep.bound_check = u.max_abs() / std::max(1e-300, rep.norm_pa);
    if (resid > 1e-2 * std::max(1.0, F.max_abs())) {
        rep.flagged = true;
        rep.message += (rep.message.empty() ? "" : "; ");
        rep.message += "residual above tolerance";
    }
    return rep;
}

SolveReport semilinear_solve(const KernelContext& ctx,
                             const std::function<cplx(cplx, double, double)>& G,
                             double tau, const CylinderFunction& u0, double R,
                             const SolveOptions& opt) {
    if (tau <= ctx.spec.a * ctx.spec.nu)
        throw std::invalid_argument("semilinear_solve: tau must exceed a nu");
    CylinderFunction v = u0;
    const int P = u0.P(), M = u0.M;
    auto rhs = [&](const CylinderFunction& f) {
        CylinderFunction out = CylinderFunction::zeros(u0.radii, M);
        for (int i = 0; i < P; ++i) {
            double r = u0.radii[static_cast<size_t>(i)];
            double rt = std::pow(r, tau);
            for (int k = 0; k < M; ++k) {
                cplx fv = f.at(i, k);
                out.at(i, k) = rt * std::abs(fv) * G(fv, r, out.t(k));
            }
        }
        return out;
    };

    SolveReport rep;
    double prev_change = -1.0;
    int rising = 0;
    int it = 0;
    double change = 0.0;
    SolveOptions topt = opt;
    for (it = 1; it <= opt.max_iter; ++it) {
        SolveReport step = solve_T(ctx, rhs(v), R, topt);
        CylinderFunction vn = u0 + step.solution;
        change = vn.max_diff(v);
        double scale = std::max(1.0, vn.max_abs());
        v = vn;
        if (change < opt.tol * scale) break;
        if (prev_change >= 0.0 && change >= prev_change) {
            if (++rising >= 3) {
                rep.flagged = true;
                rep.message =
                    "contraction failure: iteration not decreasing; retry "
                    "with a smaller R";
                break;
            }
        } else {
            rising = 0;
        }
        prev_change = change;
    }
    rep.solution = v;
    rep.iterations = it;

    CylinderFunction Lv = apply_Lop(ctx.spec, v);
    CylinderFunction target = rhs(v);
    double resid = 0.0;
    for (int i = 2; i < P - 2; ++i)
        for (int k = 0; k < M; ++k)
            resid = std::max(resid, std::abs(Lv.at(i, k) - target.at(i, k)));
    rep.residual = resid;

    double lo = 1e300, hi = 0.0;
    double u0max = u0.max_abs();
    for (int i = 0; i < P; ++i)
        for (int k = 0; k < M; ++k) {
            double d = std::abs(u0.at(i, k));
            if (d < 1e-12 * std::max(1.0, u0max)) continue;
            double ratio = std::abs(v.at(i, k)) / d;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    rep.sim_lo = (lo == 1e300) ? 0.0 : lo;
    rep.sim_hi = hi;
    return rep;
}

bool patch_check(const KernelContext& ctx, const CylinderFunction& u_minus,
                 const CylinderFunction& u_plus, double delta, double tol) {
    const BasicPair* zero_level = nullptr;
    for (const auto& bp : ctx.pairs) {
        for (const BasicSolution* w : {&bp.w_plus, &bp.w_minus}) {
            if (std::abs(w->sigma.real()) <= NEUTRAL_TOL &&
                std::abs(w->sigma.imag()) > NEUTRAL_TOL)
                throw std::runtime_error(
                    "patch_check: spectrum has nonzero imaginary exponents");
        }
        if (std::abs(bp.w_plus.sigma) <= NEUTRAL_TOL) zero_level = &bp;
    }
    if (zero_level == nullptr) return true;  // continuity is automatic

    auto pairing_at = [&](const CylinderFunction& u,
                          const BasicSolution& g) {
        int row = nearest_row(u.radii, delta);
        double acc = 0.0;
        for (int k = 0; k < u.M; ++k) {
            double th = u.t(k);
            cplx gv = g.phi.eval(th) + std::conj(g.psi.eval(th));
            acc += (gv * u.at(row, k)).real();
        }
        return acc * (TWO_PI / u.M);
    };
    double scale = std::max({1.0, u_minus.max_abs(), u_plus.max_abs()});
    for (const BasicSolution* g :
         {&zero_level->ws_plus, &zero_level->ws_minus}) {
        double a = pairing_at(u_plus, *g);
        double b = pairing_at(u_minus, *g);
        if (std::abs(a - b) > tol * TWO_PI * scale) return false;
    }
    return true;
}

}  // namespace dclab
