#pragma once

// Closed-form oracles: characteristic functions, Levy tail, the CIR
// transition density and the generators of the two continuous-time Markov
// constructions.

#include <complex>
#include <span>

#include "sgp/core.hpp"

namespace sgp {

using Complex = std::complex<double>;

/// Smooth test function for generator evaluation, with closed-form derivatives.
class TestFunction {
public:
    enum class Kind { Identity, Square, Exponential };

    static TestFunction identity() { return TestFunction(Kind::Identity, 0.0); }
    static TestFunction square() { return TestFunction(Kind::Square, 0.0); }
    /// phi(x) = exp(theta x), theta <= 0 so phi stays bounded on [0, inf).
    static TestFunction exponential(double theta);

    Kind kind() const { return kind_; }
    double theta() const { return theta_; }

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    /// (phi(x + h) - phi(x)) / h without cancellation; phi'(x) at h == 0.
    double divided_difference(double x, double h) const;

private:
    TestFunction(Kind k, double theta) : kind_(k), theta_(theta) {}
    Kind kind_;
    double theta_;
};

/// (1 - i w / beta)^-alpha on the principal branch.
Complex gamma_chf(double omega, const GammaParams& p);

/// [(beta - i w) / (beta - i rho w)]^-alpha, the AR(1) innovation chf.
Complex innovation_chf(double omega, const GammaParams& p, const Dependence& dep);

/// E exp(i s X_0 + i t X_1) for observations one time unit apart (rho = dep.rho()).
/// For other gaps pass dep.over(gap). Throws UnsupportedKind for ContinuouslyThinned.
Complex pair_chf(ProcessKind kind, double s, double t, const GammaParams& p, const Dependence& dep);

/// Joint chf of the random-measure process at every grid point:
/// prod_{i<=j} (1 - i (w_i + ... + w_j) / beta)^{-alpha m(i,j)}.
Complex rm_joint_chf(std::span<const double> omegas, const TimeGrid& grid, const GammaParams& p,
                     const Dependence& dep);

/// log I_q(x) for q >= -1, x >= 0. Power series (log-scaled) for x <= 30, the
/// large-argument asymptotic expansion beyond, falling back to the series when
/// the expansion cannot reach full accuracy (large q relative to x).
double log_bessel_i(double q, double x);

/// Transition density f(y | x) across a gap dt of the stationary CIR diffusion
/// with Ga(alpha, beta) marginal and autocorrelation exp(-lambda dt):
/// c e^{-u-v} (v/u)^{(alpha-1)/2} I_{alpha-1}(2 sqrt(uv)),
/// c = beta / (1 - e^{-lambda dt}), u = c x e^{-lambda dt}, v = c y.
double cir_transition_density(double y, double x, double dt, const GammaParams& p, const Dependence& dep);

/// Generator applied to phi at x. SquaredOU: -lambda (x - alpha/beta) phi' + (lambda/beta) x phi''.
/// ContinuouslyThinned: the upward-jump gamma integral plus the downward
/// thinning integral, both by adaptive quadrature. Other kinds: UnsupportedKind.
double generator_apply(ProcessKind kind, const TestFunction& phi, double x, const GammaParams& p,
                       const Dependence& dep);

struct LevyTail {
    double exact;        // nu((u, inf)) = alpha E_1(beta u)
    double approximant;  // (alpha / (beta u)) e^{-beta u}
};

LevyTail levy_tail(double u, const GammaParams& p);

/// P[X > u] for X ~ Ga(alpha, beta).
double gamma_survival(double u, const GammaParams& p);
double gamma_cdf(double u, const GammaParams& p);
double gamma_pdf(double x, const GammaParams& p);

}  // namespace sgp
