#include "dclab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dclab/basic_solutions.hpp"

namespace dclab {

namespace {
const cplx I(0.0, 1.0);

bool is_real_exponent(cplx s) {
    return std::abs(s.imag()) <= 1e-8 * std::max(1.0, std::abs(s));
}
}  // namespace

std::vector<const SpectralValue*> SpectrumWindow::at(int j) const {
    std::vector<const SpectralValue*> out;
    for (const auto& v : values)
        if (v.j == j) out.push_back(&v);
    return out;
}

ScaledSpectral spectral_function_scaled(const OperatorSpec& spec, cplx sigma,
                                        double tol) {
    Monodromy m = monodromy(spec, sigma, tol);
    double S = m.log_scale;
    cplx k = 4.0 * PI * spec.b * spec.epsilon / std::norm(spec.lambda_eps());
    cplx logE = k * sigma;
    ScaledSpectral out;
    out.log_scale = S;
    out.F_hat = m.B.trace() - std::exp(-S) - std::exp(logE - S);
    out.F_sigma_hat = m.B_sigma.trace() - k * std::exp(logE - S);
    return out;
}

std::pair<cplx, cplx> spectral_function(const OperatorSpec& spec, cplx sigma,
                                        double tol) {
    ScaledSpectral s = spectral_function_scaled(spec, sigma, tol);
    double e = std::exp(s.log_scale);
    return {s.F_hat * e, s.F_sigma_hat * e};
}

double gamma_constant(const OperatorSpec& spec) {
    // (1 / 4 a pi) int_0^{2 pi} |c|^2 dt, trapezoid on an oversampled grid
    int M = std::max(64, 4 * (spec.c.half_bandwidth() + 1));
    std::vector<cplx> s = spec.c.sample(M);
    double sum = 0.0;
    for (const cplx& v : s) sum += std::norm(v);
    double integral = sum * TWO_PI / M;
    return integral / (4.0 * spec.a * PI);
}

cplx asymptotic_sigma(const OperatorSpec& spec, int j) {
    if (j == 0)
        throw std::invalid_argument(
            "asymptotic_sigma: j = 0 (use the coarse scan)");
    return spec.lambda_eps() * (double(j) + spec.nu) +
           gamma_constant(spec) / double(j);
}

int default_J0(const OperatorSpec& spec) {
    double g = gamma_constant(spec);
    int j = 1;
    while (g / (double(j) * j) >= spec.a / 4.0 && j < 1024) ++j;
    return j;
}

std::optional<cplx> newton_sigma(const OperatorSpec& spec, cplx seed,
                                 double tol, int max_iter, int* iters_out) {
    cplx sigma = seed;
    for (int it = 0; it < max_iter; ++it) {
        if (iters_out) *iters_out = it + 1;
        ScaledSpectral s = spectral_function_scaled(spec, sigma, tol * 1e-2);
        if (std::abs(s.F_sigma_hat) <
            1e-14 * std::max(1.0, std::abs(s.F_hat)))
            return std::nullopt;  // derivative collapse (double-root center)
        cplx step = s.F_hat / s.F_sigma_hat;
        double cap = 0.5 * std::max(1.0, std::abs(sigma));
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        sigma -= step;
        if (std::abs(step) <= tol * std::max(1.0, std::abs(sigma))) {
            // one guarded polishing step
            ScaledSpectral p = spectral_function_scaled(spec, sigma, tol * 1e-2);
            if (std::abs(p.F_sigma_hat) > 0.0) {
                cplx ps = p.F_hat / p.F_sigma_hat;
                if (std::abs(ps) <= 10.0 * tol * std::max(1.0, std::abs(sigma)))
                    sigma -= ps;
            }
            return sigma;
        }
        if (!std::isfinite(sigma.real()) || !std::isfinite(sigma.imag()))
            return std::nullopt;
    }
    return std::nullopt;
}

namespace {

// sigma-space residual of a converged root: |Newton increment|, or the
// scaled function value itself where the derivative collapses (double roots)
double root_residual(const OperatorSpec& spec, cplx sigma, double tol) {
    ScaledSpectral s = spectral_function_scaled(spec, sigma, tol * 1e-2);
    double d = std::abs(s.F_sigma_hat);
    if (d < 1e-12)
        return std::abs(s.F_hat) * std::exp(std::min(s.log_scale, 700.0));
    return std::abs(s.F_hat) / d;
}

// plain-|F| acceptance for seeds where Newton's derivative collapses
bool is_plain_root(const OperatorSpec& spec, cplx sigma, double tol) {
    ScaledSpectral s = spectral_function_scaled(spec, sigma, tol * 1e-2);
    double logF = std::log(std::abs(s.F_hat) + 1e-300) + s.log_scale;
    return logF < std::log(std::max(tol, 1e-12));
}

// coarse rectangular scan of log|F|; returns the best local-minimum seeds
std::vector<cplx> scan_rectangle(const OperatorSpec& spec, double re0,
                                 double re1, double im0, double im1, int nre,
                                 int nim) {
    std::vector<std::vector<double>> val(nre, std::vector<double>(nim));
    std::vector<std::vector<cplx>> pts(nre, std::vector<cplx>(nim));
    for (int p = 0; p < nre; ++p) {
        for (int q = 0; q < nim; ++q) {
            cplx sg(re0 + (re1 - re0) * p / double(nre - 1),
                    im0 + (im1 - im0) * q / double(nim - 1));
            pts[p][q] = sg;
            try {
                ScaledSpectral s = spectral_function_scaled(spec, sg, 1e-8);
                val[p][q] =
                    std::log(std::abs(s.F_hat) + 1e-300) + s.log_scale;
            } catch (const std::exception&) {
                val[p][q] = 1e300;
            }
        }
    }
    std::vector<std::pair<double, cplx>> minima;
    for (int p = 0; p < nre; ++p) {
        for (int q = 0; q < nim; ++q) {
            bool ismin = true;
            for (int dp = -1; dp <= 1 && ismin; ++dp)
                for (int dq = -1; dq <= 1 && ismin; ++dq) {
                    int pp = p + dp, qq = q + dq;
                    if (pp < 0 || pp >= nre || qq < 0 || qq >= nim) continue;
                    if (val[pp][qq] < val[p][q]) ismin = false;
                }
            if (ismin && val[p][q] < 1e299)
                minima.push_back({val[p][q], pts[p][q]});
        }
    }
    std::sort(minima.begin(), minima.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<cplx> seeds;
    for (size_t i = 0; i < minima.size() && i < 16; ++i)
        seeds.push_back(minima[i].second);
    return seeds;
}

struct ClassifiedRoot {
    cplx sigma;          // root as found
    cplx char_sigma;     // character exponent of its basic solution
    int char_index = 0;  // winding index
    bool real = false;
    int null_dim = 1;
    double residual = 0.0;
};

// Solve the eigen-pair(s) at a root and read off the character(s).
// A real double root may carry two directions with distinct winding
// indices; each becomes its own entry. Returns empty on extraction
// failure (spurious minimum).
std::vector<ClassifiedRoot> classify_root(const OperatorSpec& spec, cplx sigma,
                                          double tol) {
    std::vector<ClassifiedRoot> out;
    ClassifiedRoot cr;
    cr.sigma = sigma;
    cr.real = is_real_exponent(sigma);
    if (cr.real) sigma = cplx(sigma.real(), 0.0);
    cr.residual = root_residual(spec, sigma, tol);
    try {
        auto dirs = solve_null_pairs_auto(spec, sigma);
        cr.null_dim = int(dirs.size());
        const PeriodicFunction& phi = dirs[0].phi;
        const PeriodicFunction& psi = dirs[0].psi;
        if (cr.real) {
            cr.char_sigma = sigma;
            std::vector<int> indices;
            for (const auto& d : dirs) {
                PeriodicFunction f1 = d.phi + d.psi.conjugated();
                PeriodicFunction f2 = (I * d.phi) + (I * d.psi).conjugated();
                const PeriodicFunction& f =
                    (f1.sup_norm() >= f2.sup_norm()) ? f1 : f2;
                indices.push_back(winding_number(f));
            }
            if (indices.size() == 2 && indices[0] != indices[1]) {
                // two one-real-dimensional spaces at distinct indices
                for (int idx : indices) {
                    ClassifiedRoot c2 = cr;
                    c2.char_index = idx;
                    c2.null_dim = 1;
                    out.push_back(c2);
                }
                return out;
            }
            cr.char_index = indices[0];
        } else {
            // L2 dominance probe (the full everywhere-strict check happens
            // in basic_solution); for a valid complex-exponent pair the two
            // moduli never cross, so comparing norms is safe
            double nphi = 0.0, npsi = 0.0;
            for (const cplx& v : phi.fourier()) nphi += std::norm(v);
            for (const cplx& v : psi.fourier()) npsi += std::norm(v);
            bool phi_dom = nphi >= npsi;
            if (phi_dom) {
                cr.char_sigma = sigma;
                cr.char_index = winding_number(phi);
            } else {
                cr.char_sigma = std::conj(sigma);
                cr.char_index = winding_number(psi.conjugated());
            }
        }
    } catch (const std::exception&) {
        return {};
    }
    out.push_back(cr);
    return out;
}

void dedupe_push(std::vector<cplx>& v, cplx s, double tol = 1e-6) {
    for (cplx e : v)
        if (std::abs(e - s) <= tol * std::max(1.0, std::abs(s))) return;
    v.push_back(s);
}

}  // namespace

SpectrumWindow find_spectral_values(const OperatorSpec& spec, int j_min,
                                    int j_max, double tol) {
    if (j_max < j_min)
        throw std::invalid_argument("find_spectral_values: j_max < j_min");
    SpectrumWindow win;
    win.j_min = j_min;
    win.j_max = j_max;
    win.gamma = gamma_constant(spec);
    win.J0 = default_J0(spec);

    cplx le = spec.lambda_eps();

    // per index: Newton from the asymptotic seed and its mirror, plus a
    // rectangle scan for stubborn levels
    std::vector<std::vector<SpectralValue>> per_j(j_max - j_min + 1);
    std::vector<std::string> gaps;

    for (int j = j_min; j <= j_max; ++j) {
        std::vector<cplx> seeds;
        if (j != 0) {
            cplx as = asymptotic_sigma(spec, j);
            seeds.push_back(as);
            seeds.push_back(std::conj(as));
        }
        seeds.push_back(le * (double(j) + spec.nu));
        seeds.push_back(std::conj(le) * (double(j) + spec.nu));

        auto attempt = [&](const std::vector<cplx>& sds,
                           std::vector<ClassifiedRoot>& found) {
            std::vector<cplx> roots;
            for (cplx sd : sds) {
                auto r = newton_sigma(spec, sd, tol);
                // accept the seed itself where Newton's derivative collapses
                // at an exact double root (e.g. the decoupled origin)
                if (!r && is_plain_root(spec, sd, tol)) r = sd;
                if (!r) continue;
                cplx sg = *r;
                if (is_real_exponent(sg)) sg = cplx(sg.real(), 0.0);
                dedupe_push(roots, sg);
            }
            for (cplx sg : roots) {
                for (const auto& cr : classify_root(spec, sg, tol))
                    if (cr.char_index == j) found.push_back(cr);
            }
        };

        std::vector<ClassifiedRoot> found;
        attempt(seeds, found);

        auto coverage = [&]() {
            // complex orbit or null_dim 2 or Jordan real double covers both
            // branches; two distinct simple real roots cover one each
            int cov = 0;
            for (auto& cr : found)
                cov += cr.real ? (cr.null_dim >= 2 ? 2 : 1) : 2;
            return cov;
        };

        // dedupe by character exponent (conjugate root pairs collapse)
        auto squash = [&]() {
            std::vector<ClassifiedRoot> uniq;
            for (auto& cr : found) {
                bool dup = false;
                for (auto& u : uniq)
                    if (std::abs(u.char_sigma - cr.char_sigma) <=
                        1e-6 * std::max(1.0, std::abs(cr.char_sigma)))
                        dup = true;
                if (!dup) uniq.push_back(cr);
            }
            found = std::move(uniq);
        };
        squash();

        if (coverage() < 2) {
            // a real pair of one level sums to ~2 a (j + nu); when only one
            // partner was found, seed the reflected value
            double rec0 = spec.a * (double(j) + spec.nu);
            std::vector<cplx> refl;
            for (auto& cr : found)
                if (cr.real)
                    refl.push_back(cplx(2.0 * rec0 - cr.char_sigma.real(), 0.0));
            if (!refl.empty()) {
                attempt(refl, found);
                squash();
            }
        }

        if (coverage() < 2) {
            // widen: coarse rectangle scan around the level; real roots can
            // shift away from a (j + nu) by up to the coefficient amplitude
            // (~ sqrt(2 a gamma)), so the strip must cover that range
            double g = win.gamma;
            double rec = spec.a * (double(j) + spec.nu);
            double rw = spec.a + 2.0 * std::sqrt(2.0 * spec.a * g) + 1.0;
            double imw = std::abs(spec.b) * (std::abs(j) + 2.0) + 2.0 * g + 1.0;
            auto extra = scan_rectangle(spec, rec - rw, rec + rw, -imw,
                                        imw, 41, 31);
            // a grid minimum on the real axis can sit midway between a
            // conjugate root pair, where the derivative is small and Newton
            // diverges; offset the seeds by one grid cell in both directions
            std::vector<cplx> sds;
            double off = 2.0 * imw / 30.0;
            for (cplx sd : extra) {
                sds.push_back(sd);
                sds.push_back(sd + cplx(0.0, off));
                sds.push_back(sd - cplx(0.0, off));
            }
            attempt(sds, found);
            squash();
        }

        std::vector<SpectralValue>& out = per_j[j - j_min];
        // assemble branch entries
        std::vector<ClassifiedRoot> cx, re;
        for (auto& cr : found)
            (cr.real ? re : cx).push_back(cr);

        if (cx.size() > 1) {
            std::ostringstream os;
            os << "level " << j << ": winding-label conflict (" << cx.size()
               << " distinct complex orbits claim the same index)";
            gaps.push_back(os.str());
        }
        if (!cx.empty()) {
            // a complex orbit carries both branches; take the best residual
            std::sort(cx.begin(), cx.end(), [](const auto& a, const auto& b) {
                return a.residual < b.residual;
            });
            cplx sc = cx[0].char_sigma;
            cplx plus = (sc.imag() >= 0) ? sc : std::conj(sc);
            SpectralValue vp{plus, j, +1, 1, cx[0].residual};
            SpectralValue vm{std::conj(plus), j, -1, 1, cx[0].residual};
            out = {vp, vm};
        } else if (!re.empty()) {
            std::sort(re.begin(), re.end(), [](const auto& a, const auto& b) {
                return a.char_sigma.real() < b.char_sigma.real();
            });
            if (re.size() >= 2) {
                SpectralValue vm{re.front().char_sigma, j, -1, 1,
                                 re.front().residual};
                SpectralValue vp{re.back().char_sigma, j, +1, 1,
                                 re.back().residual};
                out = {vm, vp};
            } else if (re[0].null_dim >= 2) {
                SpectralValue v{re[0].char_sigma, j, +1, 2, re[0].residual};
                out = {v};
            } else {
                // single simple real root: report it and flag the gap
                SpectralValue v{re[0].char_sigma, j, +1, 1, re[0].residual};
                out = {v};
                std::ostringstream os;
                os << "level " << j
                   << ": only one simple real root located (sigma = "
                   << re[0].char_sigma.real() << ")";
                gaps.push_back(os.str());
            }
        } else {
            std::ostringstream os;
            double rw = spec.a + 2.0 * std::sqrt(2.0 * spec.a * win.gamma) + 1.0;
            os << "level " << j << ": no root located (scanned Re sigma in ["
               << spec.a * (j + spec.nu) - rw << ", "
               << spec.a * (j + spec.nu) + rw << "])";
            gaps.push_back(os.str());
        }
    }

    for (auto& v : per_j)
        for (auto& sv : v) win.values.push_back(sv);
    std::sort(win.values.begin(), win.values.end(),
              [](const SpectralValue& a, const SpectralValue& b) {
                  if (a.j != b.j) return a.j < b.j;
                  return a.branch > b.branch;
              });
    win.gaps = std::move(gaps);
    return win;
}

Multiplicity classify_multiplicity(const OperatorSpec& spec,
                                   const SpectralValue& sv,
                                   double cluster_tol) {
    Monodromy m = monodromy(spec, sv.sigma, 1e-12);
    if (m.log_scale > 100.0) return Multiplicity::simple;
    Eigen::Matrix2cd d =
        m.B * std::exp(m.log_scale) - Eigen::Matrix2cd::Identity();
    double n = d.cwiseAbs().maxCoeff();
    if (n <= cluster_tol) return Multiplicity::dbl;
    if (n <= 10.0 * cluster_tol) return Multiplicity::indeterminate;
    return Multiplicity::simple;
}

HomotopyResult track_epsilon_homotopy(const OperatorSpec& spec_template, int j,
                                      const std::vector<double>& eps_path,
                                      double tol) {
    HomotopyResult out;
    if (eps_path.empty()) return out;

    auto at_eps = [&](double e) {
        OperatorSpec s = spec_template;
        s.epsilon = e;
        return s;
    };

    // initial pair at the first path point through the window machinery
    OperatorSpec s0 = at_eps(eps_path.front());
    SpectrumWindow w0 = find_spectral_values(s0, j, j, tol);
    auto ent = w0.at(j);
    if (ent.empty()) {
        out.failed = true;
        return out;
    }
    cplx sp = ent.front()->sigma;
    cplx sm = (ent.size() > 1) ? ent.back()->sigma : ent.front()->sigma;
    if (ent.size() == 1 && ent.front()->multiplicity == 2) sm = sp;

    auto regime_of = [&](cplx p, cplx q) -> std::string {
        if (std::abs(p - q) <= 1e-6 * std::max(1.0, std::abs(p)))
            return "double";
        if (is_real_exponent(p) && is_real_exponent(q)) return "real-pair";
        return "complex-pair";
    };

    auto record = [&](double e, cplx p, cplx q) {
        // canonical ordering: complex pair + has Im > 0; real pair descending
        if (!is_real_exponent(p) || !is_real_exponent(q)) {
            if (p.imag() < q.imag()) std::swap(p, q);
        } else if (p.real() < q.real()) {
            std::swap(p, q);
        }
        out.eps.push_back(e);
        out.sigma_plus.push_back(p);
        out.sigma_minus.push_back(q);
        out.regime.push_back(regime_of(p, q));
    };
    record(eps_path.front(), sp, sm);

    // expected exponent motion per unit epsilon: d sigma / d eps ~ i b j
    const double motion =
        std::abs(spec_template.b) * (std::abs(j) + 1.0) + spec_template.a;

    auto correct = [&](const OperatorSpec& s, cplx seed,
                       double trust) -> std::optional<cplx> {
        auto r = newton_sigma(s, seed, tol);
        if (r && is_real_exponent(*r)) r = cplx(r->real(), 0.0);
        // reject roots outside the trust radius: Newton can escape a shallow
        // basin (e.g. a real seed between a conjugate pair) and land far away
        if (r && std::abs(*r - seed) > trust) r.reset();
        // a nearby root can still belong to a different level; the winding
        // index of its basic solution decides, so classify and reject any
        // root whose index is not the tracked one
        if (r) {
            bool ok = false;
            try {
                for (const auto& cr : classify_root(s, *r, tol))
                    if (cr.char_index == j) ok = true;
            } catch (const std::exception&) {
            }
            if (!ok) r.reset();
        }
        return r;
    };

    for (size_t i = 1; i < eps_path.size(); ++i) {
        double e_prev = out.eps.back();
        double e_next = eps_path[i];
        double e_lo = e_prev;
        cplx p = out.sigma_plus.back(), q = out.sigma_minus.back();
        int halvings = 0;
        double target = e_next;
        while (true) {
            OperatorSpec s = at_eps(target);
            double de = std::abs(target - e_lo);
            double trust = 0.3 * spec_template.a + de * motion;
            auto rp = correct(s, p, trust);
            auto rq = correct(s, q, trust);
            bool collided =
                rp && rq &&
                std::abs(*rp - *rq) <= 1e-6 * std::max(1.0, std::abs(*rp));
            if (!rp || !rq || collided) {
                // attempt the post-collision splits from perturbed seeds
                // (a pair leaving the real axis cannot be reached by a real
                // Newton iteration, so probe off-axis explicitly); the probe
                // offset follows the expected motion over this step
                cplx base = rp ? *rp : (rq ? *rq : 0.5 * (p + q));
                double d = std::max(1e-3 * std::max(1.0, std::abs(base)),
                                    0.5 * de * motion);
                auto rc = correct(s, base + cplx(0.0, d), trust);
                if (rc && std::abs(rc->imag()) >
                              1e-7 * std::max(1.0, std::abs(*rc))) {
                    rp = *rc;
                    rq = std::conj(*rc);
                } else if (collided || !rp || !rq) {
                    auto r1 = correct(s, base + d, trust);
                    auto r2 = correct(s, base - d, trust);
                    if (r1 && r2 &&
                        std::abs(*r1 - *r2) >
                            1e-6 * std::max(1.0, std::abs(*r1))) {
                        rp = r1;
                        rq = r2;
                    } else if (collided) {
                        // persistent double root: keep the merged pair
                        rq = rp;
                    }
                }
            }
            if (rp && rq) {
                p = *rp;
                q = *rq;
                if (target == e_next) {
                    record(e_next, p, q);
                    break;
                }
                e_lo = target;
                target = e_next;  // retry the full step from the midpoint
                continue;
            }
            // corrector divergence: halve the step
            if (++halvings > 8) {
                out.failed = true;
                out.last_good_eps = e_lo;
                return out;
            }
            target = 0.5 * (e_lo + target);
        }
    }
    out.last_good_eps = out.eps.back();
    return out;
}

}  // namespace dclab
