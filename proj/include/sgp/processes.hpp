#pragma once

// Path generators for the six stationary Ga(alpha, beta) processes with
// autocorrelation exp(-lambda |s - t|), and ensemble assembly.

#include <cstdint>
#include <optional>
#include <variant>

#include "sgp/core.hpp"
#include "sgp/random.hpp"
#include "sgp/tent.hpp"

namespace sgp {

namespace cir {
struct Exact {};
/// Full-truncation Euler scheme for dX = -lambda (X - alpha/beta) dt + sqrt(2 lambda X / beta) dW.
struct Euler {
    double dt_sub;
};
/// Sum of 2 alpha squared OU components with correlation exp(-(lambda/2)|s-t|); needs 2 alpha integral.
struct SquaredOU {
    double dt_sub;
};
}  // namespace cir

using CirMethod = std::variant<cir::Exact, cir::Euler, cir::SquaredOU>;

struct CthinConfig {
    std::int64_t steps_per_unit_time = 256;
};

/// Gamma AR(1): X_t = rho X_{t-1} + zeta_t on a uniform grid, rho = exp(-lambda dt).
SamplePath ar1_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                    std::optional<double> start = std::nullopt);

/// Beta thinning: X_t = B_t X_{t-1} + zeta_t, B_t ~ Be(alpha rho, alpha (1 - rho)), zeta_t ~ Ga(alpha (1 - rho), beta).
SamplePath thinned_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                        std::optional<double> start = std::nullopt);

/// Random-measure process on any grid via the tent partition; O(n^2) gamma draws.
SamplePath random_measure_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep);

/// Markov change-point process: the value is kept across a gap dt with
/// probability exp(-lambda dt) and refreshed from Ga(alpha, beta) otherwise.
SamplePath changepoint_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                            std::optional<double> start = std::nullopt);

/// CIR (squared-OU) diffusion. A fixed start is supported by Exact and Euler only.
SamplePath cir_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                    const CirMethod& method, std::optional<double> start = std::nullopt);

/// One step of length eps of the continuously thinned recursion:
/// x (1 - b) + zeta, b ~ Be(alpha p, alpha q), zeta ~ Ga(alpha p, beta), q = e^{-lambda eps}, p = 1 - q.
double cthin_step(RandomSource& rng, double x, double eps, const GammaParams& p, const Dependence& dep);

/// Continuously thinned process on the lattice 0, eps, ..., floor(t_max / eps) eps with eps = 1/n.
SamplePath cthin_path(RandomSource& rng, double t_max, const CthinConfig& cfg, const GammaParams& p,
                      const Dependence& dep);

/// Continuously thinned process recorded at grid times. Every gap must be a
/// whole number of lattice steps (relative tolerance 1e-9).
SamplePath cthin_path_on_grid(RandomSource& rng, const TimeGrid& grid, const CthinConfig& cfg,
                              const GammaParams& p, const Dependence& dep,
                              std::optional<double> start = std::nullopt);

struct SimulationOptions {
    CirMethod cir_method = cir::Exact{};
    CthinConfig cthin{};
    /// Start every path at this value instead of a stationary draw (Markov kinds only).
    std::optional<double> fixed_start;
    /// Worker threads; 0 means hardware concurrency. Output does not depend on it.
    unsigned threads = 1;
};

/// Single path of the given kind, dispatching on options.
SamplePath simulate_path(ProcessKind kind, RandomSource& rng, const TimeGrid& grid, const GammaParams& p,
                         const Dependence& dep, const SimulationOptions& opts = {});

/// n_paths independent paths; path m uses derive_stream(master_seed, m).
Ensemble simulate_ensemble(ProcessKind kind, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                           std::size_t n_paths, std::uint64_t master_seed, const SimulationOptions& opts = {});

/// Checks kind/option consistency without simulating; throws ParameterError.
void validate_simulation(ProcessKind kind, const TimeGrid& grid, const GammaParams& p, const SimulationOptions& opts);

}  // namespace sgp
