#include "sgp/samplers.hpp"

#include <cmath>
#include <numbers>

namespace sgp {

namespace {

// Marsaglia & Tsang (2000), shape >= 1, unit rate.
double marsaglia_tsang(RandomSource& rng, double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal_draw(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::int64_t poisson_inversion(RandomSource& rng, double mean) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::int64_t k = 0;
    // The cap only triggers when rounding leaves cdf just below u near 1.
    while (u > cdf && k < 1000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Valid for mean >= 10.
std::int64_t poisson_ptrs(RandomSource& rng, double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

}  // namespace

double normal_draw(RandomSource& rng) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double log_gamma_draw(RandomSource& rng, double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw ParameterError("gamma shape must be finite and > 0");
    if (shape >= 1.0) return std::log(marsaglia_tsang(rng, shape));
    const double boosted = std::log(marsaglia_tsang(rng, shape + 1.0));
    return boosted + std::log(rng.uniform()) / shape;
}

double gamma_draw(RandomSource& rng, double shape, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ParameterError("gamma rate must be finite and > 0");
    if (shape == 0.0) return 0.0;
    if (!(shape > 0.0) || !std::isfinite(shape)) throw ParameterError("gamma shape must be finite and >= 0");
    if (shape >= 1.0) return marsaglia_tsang(rng, shape) / rate;
    return std::exp(log_gamma_draw(rng, shape)) / rate;
}

double beta_draw(RandomSource& rng, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw ParameterError("beta parameters must be > 0");
    const double lx = log_gamma_draw(rng, a);
    const double ly = log_gamma_draw(rng, b);
    // X / (X + Y) = 1 / (1 + exp(ly - lx))
    const double d = ly - lx;
    if (d > 0.0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

std::int64_t poisson_draw(RandomSource& rng, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_inversion(rng, mean);
    return poisson_ptrs(rng, mean);
}

InnovationTrace walker_innovation_draw(RandomSource& rng, const GammaParams& p, const Dependence& dep) {
    const double rho = dep.rho();
    InnovationTrace tr;
    tr.lambda_t = gamma_draw(rng, p.alpha, 1.0);
    tr.n_t = poisson_draw(rng, tr.lambda_t * (1.0 - rho) / rho);
    tr.zeta_t = tr.n_t > 0 ? gamma_draw(rng, static_cast<double>(tr.n_t), p.beta / rho) : 0.0;
    return tr;
}

double cir_transition_draw(RandomSource& rng, double x, double dt, const GammaParams& p, const Dependence& dep) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("CIR transition gap dt must be finite and > 0");
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("CIR transition start x must be finite and >= 0");
    const double decay = std::exp(-dep.lambda() * dt);
    const double c = p.beta / -std::expm1(-dep.lambda() * dt);
    const std::int64_t k = poisson_draw(rng, c * x * decay);
    return gamma_draw(rng, p.alpha + static_cast<double>(k), c);
}

}  // namespace sgp
