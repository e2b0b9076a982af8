// Special functions: log-scaled modified Bessel I, and the gamma-law
// survival/cdf/pdf used by the KS and tail checks.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sgp/analytic.hpp"

namespace sgp {

namespace {

constexpr double kSeriesSwitch = 30.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_k (x/2)^{2k+q} / (k! Gamma(k+q+1)); all terms positive.
double log_bessel_i_series(double q, double x) {
    const double log_half_x = std::log(0.5 * x);
    // For q == -1 the k == 0 term vanishes (1/Gamma(0) = 0).
    std::size_t k = (q == -1.0) ? 1 : 0;
    double lt = (2.0 * static_cast<double>(k) + q) * log_half_x - std::lgamma(static_cast<double>(k) + 1.0) -
                std::lgamma(static_cast<double>(k) + q + 1.0);
    std::vector<double> terms;
    double lmax = lt;
    for (;;) {
        terms.push_back(lt);
        lmax = std::max(lmax, lt);
        const double kk = static_cast<double>(k);
        const bool past_peak = (kk + 1.0) * (kk + q + 1.0) > 0.25 * x * x;
        if (past_peak && lt < lmax - 40.0) break;
        lt += 2.0 * log_half_x - std::log(kk + 1.0) - std::log(kk + q + 1.0);
        ++k;
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - lmax);
    return lmax + std::log(s);
}

// Large-argument expansion I_q(x) ~ e^x / sqrt(2 pi x) sum_k (-1)^k a_k(q) / x^k.
// Returns NaN when the truncated sum does not reach full precision.
double log_bessel_i_asymptotic(double q, double x) {
    const double mu = 4.0 * q * q;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        if (term == 0.0) break;
        const double mag = std::abs(term);
        if (mag > prev) return std::numeric_limits<double>::quiet_NaN();
        sum += term;
        if (mag < 1e-17 * std::abs(sum)) break;
        prev = mag;
        if (k == 199) return std::numeric_limits<double>::quiet_NaN();
    }
    if (!(sum > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

}  // namespace

double log_bessel_i(double q, double x) {
    if (!(q >= -1.0) || !(x >= 0.0) || std::isnan(q) || std::isnan(x))
        throw ParameterError("log_bessel_i requires q >= -1 and x >= 0");
    if (x == 0.0) {
        if (q == 0.0) return 0.0;
        if (q > 0.0 || q == -1.0) return kNegInf;
        return std::numeric_limits<double>::infinity();
    }
    if (x <= kSeriesSwitch) return log_bessel_i_series(q, x);
    const double asym = log_bessel_i_asymptotic(q, x);
    if (!std::isnan(asym)) return asym;
    return log_bessel_i_series(q, x);
}

double gamma_survival(double u, const GammaParams& p) {
    if (!(u > 0.0)) return 1.0;
    if (std::isinf(u)) return 0.0;
    return boost::math::gamma_q(p.alpha, p.beta * u);
}

double gamma_cdf(double u, const GammaParams& p) {
    if (!(u > 0.0)) return 0.0;
    if (std::isinf(u)) return 1.0;
    return boost::math::gamma_p(p.alpha, p.beta * u);
}

double gamma_pdf(double x, const GammaParams& p) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (p.alpha < 1.0) return std::numeric_limits<double>::infinity();
        return p.alpha == 1.0 ? p.beta : 0.0;
    }
    return p.beta * boost::math::gamma_p_derivative(p.alpha, p.beta * x);
}

LevyTail levy_tail(double u, const GammaParams& p) {
    if (!(u > 0.0)) throw ParameterError("levy_tail requires u > 0");
    const double z = p.beta * u;
    return {p.alpha * boost::math::expint(1, z), p.alpha * std::exp(-z) / z};
}

}  // namespace sgp
