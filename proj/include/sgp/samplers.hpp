#pragma once

// Exact samplers for the base distributions and for the two special
// constructions: the gamma-AR(1) innovation and the CIR transition.

#include <cstdint>

#include "sgp/core.hpp"
#include "sgp/random.hpp"

namespace sgp {

/// Ga(shape, rate). Marsaglia-Tsang squeeze for shape >= 1; for shape < 1 a
/// Ga(shape + 1) draw boosted by U^(1/shape). shape == 0 is the point mass at 0.
double gamma_draw(RandomSource& rng, double shape, double rate);

/// log of a Ga(shape, 1) draw; stays finite where the draw itself underflows.
double log_gamma_draw(RandomSource& rng, double shape);

/// Be(a, b) as X / (X + Y) with X ~ Ga(a, 1), Y ~ Ga(b, 1), formed in log space.
double beta_draw(RandomSource& rng, double a, double b);

/// Po(mean). Inversion below mean 30, Hormann's PTRS above.
std::int64_t poisson_draw(RandomSource& rng, double mean);

double normal_draw(RandomSource& rng);

struct InnovationTrace {
    double lambda_t = 0.0;  // latent Ga(alpha, 1) intensity
    std::int64_t n_t = 0;   // Poisson count
    double zeta_t = 0.0;    // innovation; exactly 0 when n_t == 0
};

/// Innovation of the gamma AR(1) recursion X_t = rho X_{t-1} + zeta_t:
/// lambda_t ~ Ga(alpha, 1), N_t ~ Po(lambda_t (1 - rho) / rho),
/// zeta_t ~ Ga(N_t, beta / rho). Its chf is [(beta - i w)/(beta - i rho w)]^-alpha.
InnovationTrace walker_innovation_draw(RandomSource& rng, const GammaParams& p, const Dependence& dep);

/// Exact CIR transition over a gap dt starting from x, as the Poisson mixture
/// Ga(alpha + K, c) with K ~ Po(c x e^{-lambda dt}) and c = beta / (1 - e^{-lambda dt}).
double cir_transition_draw(RandomSource& rng, double x, double dt, const GammaParams& p, const Dependence& dep);

}  // namespace sgp
