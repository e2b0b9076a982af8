#include "sgp/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sgp/tent.hpp"

namespace sgp {

namespace {

constexpr Complex kI{0.0, 1.0};

// z^-a on the principal branch.
Complex cpow_neg(Complex z, double a) { return std::exp(-a * std::log(z)); }

// (1 - i w / beta)^-a
Complex gamma_factor(double w, double beta, double a) { return cpow_neg(Complex{1.0, -w / beta}, a); }

constexpr double kQuadTol = 1e-10;

template <class F>
double integrate(F f, double a, double b, const char* what) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double val = gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-13, &err);
    if (!std::isfinite(val) || err > kQuadTol * std::max(1.0, std::abs(val))) {
        std::ostringstream os;
        os << "quadrature did not converge for " << what << ": value=" << val << " error_estimate=" << err
           << " tolerance=" << kQuadTol;
        throw NumericalError(os.str());
    }
    return val;
}

}  // namespace

TestFunction TestFunction::exponential(double theta) {
    if (!(theta <= 0.0) || !std::isfinite(theta))
        throw ParameterError("exponential test function needs a finite theta <= 0");
    return TestFunction(Kind::Exponential, theta);
}

double TestFunction::value(double x) const {
    switch (kind_) {
        case Kind::Identity: return x;
        case Kind::Square: return x * x;
        case Kind::Exponential: return std::exp(theta_ * x);
    }
    return 0.0;
}

double TestFunction::d1(double x) const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::Square: return 2.0 * x;
        case Kind::Exponential: return theta_ * std::exp(theta_ * x);
    }
    return 0.0;
}

double TestFunction::d2(double x) const {
    switch (kind_) {
        case Kind::Identity: return 0.0;
        case Kind::Square: return 2.0;
        case Kind::Exponential: return theta_ * theta_ * std::exp(theta_ * x);
    }
    return 0.0;
}

double TestFunction::divided_difference(double x, double h) const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::Square: return 2.0 * x + h;
        case Kind::Exponential:
            if (h == 0.0 || theta_ == 0.0) return d1(x);
            return std::exp(theta_ * x) * std::expm1(theta_ * h) / h;
    }
    return 0.0;
}

Complex gamma_chf(double omega, const GammaParams& p) { return gamma_factor(omega, p.beta, p.alpha); }

Complex innovation_chf(double omega, const GammaParams& p, const Dependence& dep) {
    const double rho = dep.rho();
    return gamma_factor(omega, p.beta, p.alpha) / gamma_factor(rho * omega, p.beta, p.alpha);
}

Complex pair_chf(ProcessKind kind, double s, double t, const GammaParams& p, const Dependence& dep) {
    const double rho = dep.rho();
    const double a = p.alpha;
    const double b = p.beta;
    switch (kind) {
        case ProcessKind::Ar1:
            return gamma_factor(s + rho * t, b, a) * gamma_factor(t, b, a) / gamma_factor(rho * t, b, a);
        case ProcessKind::Thinned:
        case ProcessKind::RandomMeasure:
            return gamma_factor(s, b, a * (1.0 - rho)) * gamma_factor(s + t, b, a * rho) *
                   gamma_factor(t, b, a * (1.0 - rho));
        case ProcessKind::ChangePoint:
            return rho * gamma_factor(s + t, b, a) + (1.0 - rho) * gamma_factor(s, b, a) * gamma_factor(t, b, a);
        case ProcessKind::SquaredOU:
            return cpow_neg(Complex{1.0 - s * t * (1.0 - rho) / (b * b), -(s + t) / b}, a);
        case ProcessKind::ContinuouslyThinned:
            break;
    }
    throw UnsupportedKind("no closed-form pair chf for process kind '" + std::string(to_string(kind)) + "'");
}

Complex rm_joint_chf(std::span<const double> omegas, const TimeGrid& grid, const GammaParams& p,
                     const Dependence& dep) {
    if (omegas.size() != grid.size())
        throw ParameterError("rm_joint_chf: " + std::to_string(omegas.size()) + " frequencies for a grid of " +
                             std::to_string(grid.size()) + " points");
    const TentPartition part = tent_partition(grid, dep);
    const std::size_t n = grid.size();
    Complex log_chf{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        double w = 0.0;
        for (std::size_t j = i; j < n; ++j) {
            w += omegas[j];
            const double m = part.mass(i, j);
            if (m > 0.0) log_chf += -p.alpha * m * std::log(Complex{1.0, -w / p.beta});
        }
    }
    return std::exp(log_chf);
}

double cir_transition_density(double y, double x, double dt, const GammaParams& p, const Dependence& dep) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("cir_transition_density requires dt > 0");
    if (!(x >= 0.0) || !(y >= 0.0)) throw ParameterError("cir_transition_density requires x, y >= 0");
    const double lam_dt = dep.lambda() * dt;
    const double c = p.beta / -std::expm1(-lam_dt);
    const double u = c * x * std::exp(-lam_dt);
    const double v = c * y;
    const double q = p.alpha - 1.0;
    if (v == 0.0) {
        // (v/u)^{q/2} I_q(2 sqrt(uv)) -> v^q / Gamma(alpha) as v -> 0
        if (p.alpha > 1.0) return 0.0;
        if (p.alpha < 1.0) return std::numeric_limits<double>::infinity();
        return c * std::exp(-u);
    }
    if (u == 0.0) {
        // start at 0: Ga(alpha, c)
        return std::exp(p.alpha * std::log(c) + q * std::log(y) - v - std::lgamma(p.alpha));
    }
    const double log_f =
        std::log(c) - u - v + 0.5 * q * (std::log(v) - std::log(u)) + log_bessel_i(q, 2.0 * std::sqrt(u * v));
    return std::exp(log_f);
}

double generator_apply(ProcessKind kind, const TestFunction& phi, double x, const GammaParams& p,
                       const Dependence& dep) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("generator_apply requires finite x >= 0");
    const double lam = dep.lambda();
    switch (kind) {
        case ProcessKind::SquaredOU:
            return -lam * (x - p.mean()) * phi.d1(x) + (lam / p.beta) * x * phi.d2(x);
        case ProcessKind::ContinuouslyThinned: {
            // Upward jumps: int_0^inf [phi(x+u) - phi(x)] alpha lam u^-1 e^{-beta u} du,
            // with the bracket divided by u analytically.
            auto up = [&](double u) { return phi.divided_difference(x, u) * p.alpha * lam * std::exp(-p.beta * u); };
            const double jump_up = integrate(up, 0.0, std::numeric_limits<double>::infinity(), "upward jump integral");
            if (x == 0.0) return jump_up;
            // Thinning: int_0^x [phi(x-u) - phi(x)] alpha lam u^-1 (1-u/x)^{alpha-1} du.
            // With r = 1 - u/x, [phi(x r) - phi(x)] / (1 - r) = -x * divided_difference(x, -x (1 - r))
            // and the weight is alpha r^{alpha-1} dr. For alpha < 1 the substitution s = r^alpha
            // removes the singular weight.
            double thin = 0.0;
            if (p.alpha >= 1.0) {
                auto down = [&](double r) {
                    return -x * phi.divided_difference(x, -x * (1.0 - r)) * lam * p.alpha * std::pow(r, p.alpha - 1.0);
                };
                thin = integrate(down, 0.0, 1.0, "thinning integral");
            } else {
                auto down = [&](double s) {
                    const double one_minus_r = -std::expm1(std::log(s) / p.alpha);
                    return -x * phi.divided_difference(x, -x * one_minus_r) * lam;
                };
                thin = integrate(down, 0.0, 1.0, "thinning integral");
            }
            return jump_up + thin;
        }
        default:
            break;
    }
    throw UnsupportedKind("no generator for process kind '" + std::string(to_string(kind)) + "'");
}

}  // namespace sgp
