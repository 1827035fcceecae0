#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dclab/floquet.hpp"
#include "dclab/operator_core.hpp"

namespace dclab {

// A spectral value: root sigma of the spectral function, labeled by the
// winding index j of the associated basic solution and a branch tag.
// For complex pairs branch + carries Im(sigma) > 0 and - the conjugate;
// for real pairs tau_- <= tau_+. A double root is reported once with
// multiplicity 2.
struct SpectralValue {
    cplx sigma;
    int j = 0;
    int branch = +1;  // +1 or -1
    int multiplicity = 1;
    double residual = 0.0;  // scaled |F| at the root
};

struct SpectrumWindow {
    std::vector<SpectralValue> values;  // sorted by j, then branch
    int j_min = 0, j_max = 0;
    double gamma = 0.0;  // (1/4 a pi) int |c|^2
    int J0 = 1;          // asymptotic-seeding threshold
    std::vector<std::string> gaps;  // unresolved levels, never silently filled
    bool complete() const { return gaps.empty(); }
    // entries at index j (1 or 2 of them)
    std::vector<const SpectralValue*> at(int j) const;
};

// scaled spectral data: true F = F_hat * exp(log_scale)
struct ScaledSpectral {
    cplx F_hat;
    cplx F_sigma_hat;
    double log_scale = 0.0;
};

ScaledSpectral spectral_function_scaled(const OperatorSpec& spec, cplx sigma,
                                        double tol = 1e-10);
// plain values (overflow possible for huge Re sigma; scaled form never does)
std::pair<cplx, cplx> spectral_function(const OperatorSpec& spec, cplx sigma,
                                        double tol = 1e-10);

double gamma_constant(const OperatorSpec& spec);
// lambda_eps (j + nu) + gamma / j  (j != 0)
cplx asymptotic_sigma(const OperatorSpec& spec, int j);
int default_J0(const OperatorSpec& spec);

// Newton iteration on the (scaled) spectral function with exact derivative.
// Returns the root, or nullopt on divergence.
std::optional<cplx> newton_sigma(const OperatorSpec& spec, cplx seed,
                                 double tol = 1e-10, int max_iter = 40,
                                 int* iters_out = nullptr);

SpectrumWindow find_spectral_values(const OperatorSpec& spec, int j_min,
                                    int j_max, double tol = 1e-10);

enum class Multiplicity { simple, dbl, indeterminate };
Multiplicity classify_multiplicity(const OperatorSpec& spec,
                                   const SpectralValue& sv,
                                   double cluster_tol = 1e-6);

struct HomotopyResult {
    std::vector<double> eps;
    std::vector<cplx> sigma_plus, sigma_minus;
    // per step: "complex-pair", "real-pair", or "double"
    std::vector<std::string> regime;
    bool failed = false;
    double last_good_eps = 0.0;
};

// Continuation of the branch pair sigma_j^{+/-}(epsilon) along eps_path
// (starting at eps_path.front(), normally 0), predictor = previous value,
// corrector = Newton.
HomotopyResult track_epsilon_homotopy(const OperatorSpec& spec_template, int j,
                                      const std::vector<double>& eps_path,
                                      double tol = 1e-10);

}  // namespace dclab
