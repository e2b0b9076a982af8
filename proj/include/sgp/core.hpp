#pragma once

// Domain types shared by every module: marginal parameters, dependence,
// observation grids, sample paths and ensembles.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgp {

/// Raised for any violated precondition on user-supplied parameters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot reach its accuracy target.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation has no formula for the requested process kind.
class UnsupportedKind : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape/rate of the Ga(alpha, beta) marginal: mean alpha/beta, variance alpha/beta^2.
struct GammaParams {
    double alpha = 1.0;
    double beta = 1.0;

    /// Validating constructor; rejects non-positive, NaN and infinite values.
    static GammaParams make(double alpha, double beta);

    double mean() const { return alpha / beta; }
    double variance() const { return alpha / (beta * beta); }
};

void validate(const GammaParams& p);

/// Correlation decay. Stored as lambda; rho = exp(-lambda) is derived.
class Dependence {
public:
    static Dependence from_lambda(double lambda);
    static Dependence from_rho(double rho);

    double lambda() const { return lambda_; }
    double rho() const { return rho_; }
    /// Correlation across a time gap dt, exp(-lambda * dt).
    double rho_over(double dt) const;
    /// Dependence rescaled to a gap of dt time units (lambda * dt).
    Dependence over(double dt) const { return from_lambda(lambda_ * dt); }

private:
    Dependence(double lambda, double rho) : lambda_(lambda), rho_(rho) {}
    double lambda_;
    double rho_;
};

class TimeGrid {
public:
    /// Throws ParameterError unless times are finite and strictly increasing.
    explicit TimeGrid(std::vector<double> times);

    std::span<const double> times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }

    /// Common spacing if the grid is uniform (relative tolerance 1e-9), else nullopt.
    /// Single-point grids report nullopt.
    std::optional<double> uniform_spacing() const;

    bool operator==(const TimeGrid& other) const = default;

private:
    std::vector<double> times_;
};

TimeGrid make_uniform_grid(double t0, double dt, std::int64_t n);

struct SamplePath {
    TimeGrid grid;
    std::vector<double> values;
};

enum class ProcessKind { Ar1, Thinned, RandomMeasure, ChangePoint, SquaredOU, ContinuouslyThinned };

inline constexpr ProcessKind kAllKinds[] = {
    ProcessKind::Ar1,         ProcessKind::Thinned,   ProcessKind::RandomMeasure,
    ProcessKind::ChangePoint, ProcessKind::SquaredOU, ProcessKind::ContinuouslyThinned,
};

/// CLI spelling: ar1, thinned, rm, changepoint, cir, cthin.
std::string_view to_string(ProcessKind kind);
std::optional<ProcessKind> parse_process_kind(std::string_view name);

/// Independent paths observed on one shared grid. Path m is driven by
/// derive_stream(master_seed, m).
struct Ensemble {
    ProcessKind kind;
    GammaParams params;
    Dependence dep;
    TimeGrid grid;
    std::vector<std::vector<double>> paths;
    std::uint64_t master_seed = 0;

    std::size_t n_paths() const { return paths.size(); }
    SamplePath path(std::size_t m) const { return {grid, paths.at(m)}; }
    /// Values of every path at grid index k.
    std::vector<double> column(std::size_t k) const;
};

}  // namespace sgp
