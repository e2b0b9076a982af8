#pragma once

// Estimators and z-score checks used to verify simulated ensembles against
// the closed forms in analytic.hpp, and to tell the six processes apart.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sgp/analytic.hpp"
#include "sgp/core.hpp"

namespace sgp {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MomentReport {
    double mean;
    double variance;
    double se_mean;
    double se_variance;
    std::size_t n;
};

/// Sample mean and unbiased variance with asymptotic standard errors
/// sd/sqrt(n) and sqrt((m4 - s^4)/n). Throws ParameterError for n < 2.
MomentReport empirical_moments(std::span<const double> values);

struct AcfReport {
    std::vector<int> lags;
    std::vector<double> estimates;
    std::vector<double> standard_errors;
    std::vector<double> target;  // exp(-lambda k dt)
    std::size_t batch_length = 0;
    std::size_t batches = 0;
};

/// Stationary ACF estimator of one long path on a uniform grid with
/// batch-means standard errors (batch length 50 e-folding times, at least 20
/// batches). Requires path length >= 10 * max_lag.
AcfReport empirical_acf(const SamplePath& path, int max_lag, const Dependence& dep);

/// Cross-sectional ACF: correlation of grid index 0 with index k over the
/// ensemble's paths; standard errors from batch means over 100 path groups.
AcfReport ensemble_acf(const Ensemble& ensemble, int max_lag);

struct KsResult {
    double statistic;
    double critical_1pct;  // 1.628 / sqrt(n)
    bool passes() const { return statistic < critical_1pct; }
};

/// One-sample KS distance to the Ga(alpha, beta) cdf. Requires n >= 100.
KsResult ks_statistic(std::span<const double> values, const GammaParams& p);

/// Row-major N x dim sample matrix.
struct SampleMatrix {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * dim, dim}; }
};

/// Values at the given grid indices, one row per path.
SampleMatrix sample_matrix(const Ensemble& ensemble, std::span<const std::size_t> indices);

struct ChfEstimate {
    Complex value;
    double se_re;
    double se_im;
};

/// (1/N) sum_r exp(i <omega, x_r>) for each omega, with componentwise standard errors.
std::vector<ChfEstimate> empirical_chf(const SampleMatrix& samples, std::span<const std::vector<double>> omegas);

struct ChfComparison {
    std::vector<std::vector<double>> omegas;
    std::vector<ChfEstimate> empirical;
    std::vector<Complex> analytic;
    std::vector<double> z_scores;  // max(|dRe|/se_re, |dIm|/se_im)

    double max_z() const;
    std::size_t argmax() const;
};

/// max(|dRe|/se_re, |dIm|/se_im); a zero standard error with a nonzero
/// difference gives infinity, with a zero difference 0.
double chf_z_score(Complex diff, double se_re, double se_im);

/// Empirical vs closed-form pair chf for observations `lag` grid steps apart
/// (grid indices 0 and lag of every path). `formula` overrides the kind used
/// for the closed form. ContinuouslyThinned throws UnsupportedKind.
ChfComparison chf_gof(const Ensemble& ensemble, std::span<const std::array<double, 2>> omegas, int lag,
                      std::optional<ProcessKind> formula = std::nullopt);

struct Discrimination {
    double max_z = 0.0;
    std::vector<double> argmax;
    std::vector<double> z_scores;
};

/// Two-sample z-scores of empirical joint chfs over the first `points` grid
/// values of each path. Grids and marginal parameters must match.
Discrimination chf_discrimination(const Ensemble& a, const Ensemble& b, std::span<const std::vector<double>> omegas,
                                  std::size_t points);

/// chf_discrimination over consecutive triplets.
Discrimination triplet_discrimination(const Ensemble& a, const Ensemble& b,
                                      std::span<const std::array<double, 3>> omegas);

struct ReversibilityReport {
    std::int64_t forward_violations;   // steps with X_t < rho X_{t-1}
    double backward_violation_rate;    // fraction of steps with X_{t-1} < rho X_t
    std::int64_t steps;
};

ReversibilityReport reversibility_check(const SamplePath& path, const Dependence& dep);

struct GeneratorCheck {
    double fd_estimate;
    double se;
    double analytic;
    double z;
};

struct GeneratorCheckOptions {
    double epsilon = 1e-3;        // time step of the finite difference
    std::size_t n_mc = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    /// Subtract phi'(x0) (X_eps - E[X_eps | x0]) using the exact conditional
    /// mean; defaults to on for non-linear phi.
    std::optional<bool> control_variate;
};

/// Finite-difference estimate (E[phi(X_eps) | X_0 = x0] - phi(x0)) / eps from
/// n_mc one-step conditional simulations, against generator_apply.
/// SquaredOU steps with the exact CIR transition, ContinuouslyThinned with one
/// thinning step of length eps.
GeneratorCheck generator_check(ProcessKind kind, const TestFunction& phi, double x0, const GammaParams& p,
                               const Dependence& dep, const GeneratorCheckOptions& opts);

struct TailRow {
    double u;
    double survival;               // P[X > u]
    double levy_exact;             // nu((u, inf))
    double approximant;            // (alpha / beta u) e^{-beta u}
    double neglog_survival_ratio;  // -log(survival) / (beta u)
    double neglog_levy_ratio;      // -log(levy_exact) / (beta u)
    double approx_log_ratio;       // log(approximant) / log(survival)
};

struct TailReport {
    std::vector<TailRow> rows;
    /// In the tail (u >= 5/beta) every ratio column moves monotonically toward 1.
    bool tail_monotone = true;
};

TailReport tail_check(const GammaParams& p, std::span<const double> u_grid);

/// Default frequency grid {+-0.25, +-0.5, +-1, +-2} / beta.
std::vector<double> default_omega_axis(const GammaParams& p);

}  // namespace sgp
