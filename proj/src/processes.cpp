#include "sgp/processes.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sgp/parallel.hpp"
#include "sgp/samplers.hpp"

namespace sgp {

namespace {

double uniform_step(const TimeGrid& grid, const char* who) {
    if (grid.size() < 2) return 1.0;
    const auto dt = grid.uniform_spacing();
    if (!dt) throw ParameterError(std::string(who) + " is a discrete-time construction and needs a uniform grid");
    return *dt;
}

double initial_value(RandomSource& rng, const GammaParams& p, std::optional<double> start) {
    if (start) {
        if (!(*start >= 0.0) || !std::isfinite(*start)) throw ParameterError("fixed start must be finite and >= 0");
        return *start;
    }
    return gamma_draw(rng, p.alpha, p.beta);
}

std::int64_t steps_in_gap(double gap, std::int64_t steps_per_unit) {
    const double exact = gap * static_cast<double>(steps_per_unit);
    const double k = std::round(exact);
    if (k < 1.0 || std::abs(exact - k) > 1e-9 * std::max(1.0, exact))
        throw ParameterError("grid gap " + std::to_string(gap) + " is not a whole number of steps of size 1/" +
                             std::to_string(steps_per_unit));
    return static_cast<std::int64_t>(k);
}

double min_gap(const TimeGrid& grid) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < grid.size(); ++i) g = std::min(g, grid[i] - grid[i - 1]);
    return g;
}

bool half_integer_shape(double alpha) {
    const double two_a = 2.0 * alpha;
    return two_a >= 1.0 - 1e-12 && std::abs(two_a - std::round(two_a)) < 1e-9;
}

}  // namespace

TentPartition::TentPartition(TimeGrid grid, std::vector<double> masses)
    : grid_(std::move(grid)), masses_(std::move(masses)) {
    const std::size_t n = grid_.size();
    if (masses_.size() != n * (n + 1) / 2) throw ParameterError("tent partition needs n(n+1)/2 masses");
}

TentPartition tent_partition(const TimeGrid& grid, const Dependence& dep) {
    const std::size_t n = grid.size();
    const double lam = dep.lambda();
    // 1 - e^{-lambda gap} for the gap to the left of each point (1 at the boundary)
    std::vector<double> left(n, 1.0), right(n, 1.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double f = -std::expm1(-lam * (grid[k] - grid[k - 1]));
        left[k] = f;
        right[k - 1] = f;
    }
    std::vector<double> masses;
    masses.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            masses.push_back(std::exp(-lam * (grid[j] - grid[i])) * left[i] * right[j]);
    return TentPartition(grid, std::move(masses));
}

SamplePath ar1_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                    std::optional<double> start) {
    const double dt = uniform_step(grid, "the AR(1) process");
    const Dependence step = dep.over(dt);
    const double rho = step.rho();
    std::vector<double> x(grid.size());
    x[0] = initial_value(rng, p, start);
    for (std::size_t k = 1; k < x.size(); ++k) x[k] = rho * x[k - 1] + walker_innovation_draw(rng, p, step).zeta_t;
    return {grid, std::move(x)};
}

SamplePath thinned_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                        std::optional<double> start) {
    const double dt = uniform_step(grid, "the thinned process");
    const double rho = dep.rho_over(dt);
    const double rho_bar = -std::expm1(-dep.lambda() * dt);
    std::vector<double> x(grid.size());
    x[0] = initial_value(rng, p, start);
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double b = beta_draw(rng, p.alpha * rho, p.alpha * rho_bar);
        x[k] = b * x[k - 1] + gamma_draw(rng, p.alpha * rho_bar, p.beta);
    }
    return {grid, std::move(x)};
}

SamplePath random_measure_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep) {
    const TentPartition part = tent_partition(grid, dep);
    const std::size_t n = grid.size();
    // suffix[i][k - i] = sum_{j >= k} zeta(i, j), so X_k = sum_{i <= k} suffix[i][k - i]
    std::vector<double> x(n, 0.0);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double m = part.mass(i, j);
            row[j] = m > 0.0 ? gamma_draw(rng, p.alpha * m, p.beta) : 0.0;
        }
        double suffix = 0.0;
        for (std::size_t k = n; k-- > i;) {
            suffix += row[k];
            x[k] += suffix;
        }
    }
    return {grid, std::move(x)};
}

SamplePath changepoint_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                            std::optional<double> start) {
    std::vector<double> x(grid.size());
    x[0] = initial_value(rng, p, start);
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double keep = dep.rho_over(grid[k] - grid[k - 1]);
        x[k] = rng.uniform() < keep ? x[k - 1] : gamma_draw(rng, p.alpha, p.beta);
    }
    return {grid, std::move(x)};
}

SamplePath cir_path(RandomSource& rng, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                    const CirMethod& method, std::optional<double> start) {
    const std::size_t n = grid.size();
    std::vector<double> x(n);
    const double lam = dep.lambda();

    if (std::holds_alternative<cir::Exact>(method)) {
        x[0] = initial_value(rng, p, start);
        for (std::size_t k = 1; k < n; ++k) x[k] = cir_transition_draw(rng, x[k - 1], grid[k] - grid[k - 1], p, dep);
        return {grid, std::move(x)};
    }

    if (const auto* euler = std::get_if<cir::Euler>(&method)) {
        const double h_max = euler->dt_sub;
        if (!(h_max > 0.0)) throw ParameterError("Euler substep must be > 0");
        if (n > 1 && h_max > min_gap(grid) * (1.0 + 1e-12))
            throw ParameterError("Euler substep exceeds the smallest grid gap");
        const double mean = p.mean();
        const double vol = std::sqrt(2.0 * lam / p.beta);
        double state = initial_value(rng, p, start);
        x[0] = state;
        for (std::size_t k = 1; k < n; ++k) {
            const double gap = grid[k] - grid[k - 1];
            const auto sub = static_cast<std::int64_t>(std::ceil(gap / h_max - 1e-9));
            const double h = gap / static_cast<double>(sub);
            const double sqrt_h = std::sqrt(h);
            for (std::int64_t s = 0; s < sub; ++s) {
                const double pos = std::max(state, 0.0);
                state += -lam * (pos - mean) * h + vol * std::sqrt(pos) * sqrt_h * normal_draw(rng);
            }
            x[k] = std::max(state, 0.0);
        }
        return {grid, std::move(x)};
    }

    const auto& sq = std::get<cir::SquaredOU>(method);
    if (!half_integer_shape(p.alpha))
        throw ParameterError("squared-OU construction needs 2*alpha to be a positive integer (alpha = " +
                             std::to_string(p.alpha) + ")");
    if (start) throw ParameterError("squared-OU construction does not support a fixed start");
    if (!(sq.dt_sub > 0.0)) throw ParameterError("squared-OU substep must be > 0");
    if (n > 1 && sq.dt_sub > min_gap(grid) * (1.0 + 1e-12))
        throw ParameterError("squared-OU substep exceeds the smallest grid gap");
    const auto components = static_cast<std::size_t>(std::llround(2.0 * p.alpha));
    std::vector<double> z(components);
    for (auto& zi : z) zi = normal_draw(rng);
    auto observe = [&] {
        double s = 0.0;
        for (double zi : z) s += zi * zi;
        return s / (2.0 * p.beta);
    };
    x[0] = observe();
    for (std::size_t k = 1; k < n; ++k) {
        const double gap = grid[k] - grid[k - 1];
        const auto sub = static_cast<std::int64_t>(std::ceil(gap / sq.dt_sub - 1e-9));
        const double h = gap / static_cast<double>(sub);
        const double a = std::exp(-0.5 * lam * h);
        const double innov = std::sqrt(-std::expm1(-lam * h));  // sqrt(1 - a^2)
        for (std::int64_t s = 0; s < sub; ++s)
            for (auto& zi : z) zi = a * zi + innov * normal_draw(rng);
        x[k] = observe();
    }
    return {grid, std::move(x)};
}

double cthin_step(RandomSource& rng, double x, double eps, const GammaParams& p, const Dependence& dep) {
    const double q = std::exp(-dep.lambda() * eps);
    const double pp = -std::expm1(-dep.lambda() * eps);
    // 1 - b with b ~ Be(alpha p, alpha q) is Be(alpha q, alpha p)
    return x * beta_draw(rng, p.alpha * q, p.alpha * pp) + gamma_draw(rng, p.alpha * pp, p.beta);
}

SamplePath cthin_path(RandomSource& rng, double t_max, const CthinConfig& cfg, const GammaParams& p,
                      const Dependence& dep) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ParameterError("t_max must be finite and > 0");
    if (cfg.steps_per_unit_time < 1) throw ParameterError("steps per unit time must be >= 1");
    const double eps = 1.0 / static_cast<double>(cfg.steps_per_unit_time);
    const auto steps = static_cast<std::int64_t>(std::floor(t_max * static_cast<double>(cfg.steps_per_unit_time) + 1e-9));
    TimeGrid grid = make_uniform_grid(0.0, eps, steps + 1);
    std::vector<double> x(static_cast<std::size_t>(steps + 1));
    x[0] = gamma_draw(rng, p.alpha, p.beta);
    for (std::size_t k = 1; k < x.size(); ++k) x[k] = cthin_step(rng, x[k - 1], eps, p, dep);
    return {std::move(grid), std::move(x)};
}

SamplePath cthin_path_on_grid(RandomSource& rng, const TimeGrid& grid, const CthinConfig& cfg, const GammaParams& p,
                              const Dependence& dep, std::optional<double> start) {
    if (cfg.steps_per_unit_time < 1) throw ParameterError("steps per unit time must be >= 1");
    const double eps = 1.0 / static_cast<double>(cfg.steps_per_unit_time);
    std::vector<std::int64_t> steps(grid.size(), 0);
    for (std::size_t k = 1; k < grid.size(); ++k) steps[k] = steps_in_gap(grid[k] - grid[k - 1], cfg.steps_per_unit_time);
    std::vector<double> x(grid.size());
    double state = initial_value(rng, p, start);
    x[0] = state;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        for (std::int64_t s = 0; s < steps[k]; ++s) state = cthin_step(rng, state, eps, p, dep);
        x[k] = state;
    }
    return {grid, std::move(x)};
}

void validate_simulation(ProcessKind kind, const TimeGrid& grid, const GammaParams& p, const SimulationOptions& opts) {
    validate(p);
    if (opts.fixed_start && (!(*opts.fixed_start >= 0.0) || !std::isfinite(*opts.fixed_start)))
        throw ParameterError("fixed start must be finite and >= 0");
    switch (kind) {
        case ProcessKind::Ar1: uniform_step(grid, "the AR(1) process"); break;
        case ProcessKind::Thinned: uniform_step(grid, "the thinned process"); break;
        case ProcessKind::RandomMeasure:
            if (opts.fixed_start) throw ParameterError("the random-measure process has no fixed-start mode");
            break;
        case ProcessKind::ChangePoint: break;
        case ProcessKind::SquaredOU:
            if (const auto* sq = std::get_if<cir::SquaredOU>(&opts.cir_method)) {
                if (!half_integer_shape(p.alpha))
                    throw ParameterError("squared-OU construction needs 2*alpha to be a positive integer");
                if (opts.fixed_start) throw ParameterError("squared-OU construction does not support a fixed start");
                if (!(sq->dt_sub > 0.0)) throw ParameterError("squared-OU substep must be > 0");
                if (grid.size() > 1 && sq->dt_sub > min_gap(grid) * (1.0 + 1e-12))
                    throw ParameterError("squared-OU substep exceeds the smallest grid gap");
            }
            if (const auto* eu = std::get_if<cir::Euler>(&opts.cir_method)) {
                if (!(eu->dt_sub > 0.0)) throw ParameterError("Euler substep must be > 0");
                if (grid.size() > 1 && eu->dt_sub > min_gap(grid) * (1.0 + 1e-12))
                    throw ParameterError("Euler substep exceeds the smallest grid gap");
            }
            break;
        case ProcessKind::ContinuouslyThinned:
            if (opts.cthin.steps_per_unit_time < 1) throw ParameterError("steps per unit time must be >= 1");
            for (std::size_t k = 1; k < grid.size(); ++k) steps_in_gap(grid[k] - grid[k - 1], opts.cthin.steps_per_unit_time);
            break;
    }
}

SamplePath simulate_path(ProcessKind kind, RandomSource& rng, const TimeGrid& grid, const GammaParams& p,
                         const Dependence& dep, const SimulationOptions& opts) {
    switch (kind) {
        case ProcessKind::Ar1: return ar1_path(rng, grid, p, dep, opts.fixed_start);
        case ProcessKind::Thinned: return thinned_path(rng, grid, p, dep, opts.fixed_start);
        case ProcessKind::RandomMeasure:
            if (opts.fixed_start) throw ParameterError("the random-measure process has no fixed-start mode");
            return random_measure_path(rng, grid, p, dep);
        case ProcessKind::ChangePoint: return changepoint_path(rng, grid, p, dep, opts.fixed_start);
        case ProcessKind::SquaredOU: return cir_path(rng, grid, p, dep, opts.cir_method, opts.fixed_start);
        case ProcessKind::ContinuouslyThinned: return cthin_path_on_grid(rng, grid, opts.cthin, p, dep, opts.fixed_start);
    }
    throw UnsupportedKind("unknown process kind");
}

Ensemble simulate_ensemble(ProcessKind kind, const TimeGrid& grid, const GammaParams& p, const Dependence& dep,
                           std::size_t n_paths, std::uint64_t master_seed, const SimulationOptions& opts) {
    if (n_paths < 1) throw ParameterError("n_paths must be >= 1");
    validate_simulation(kind, grid, p, opts);
    std::vector<std::vector<double>> paths(n_paths);
    parallel_for(n_paths, opts.threads, [&](std::size_t m) {
        RandomSource rng = derive_stream(master_seed, m);
        paths[m] = simulate_path(kind, rng, grid, p, dep, opts).values;
    });
    return Ensemble{kind, p, dep, grid, std::move(paths), master_seed};
}

}  // namespace sgp
