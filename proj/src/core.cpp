#include "sgp/core.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace sgp {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::string fmt_value(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void validate(const GammaParams& p) {
    if (!positive_finite(p.alpha))
        throw ParameterError("alpha must be finite and > 0 (got " + fmt_value(p.alpha) + ")");
    if (!positive_finite(p.beta))
        throw ParameterError("beta must be finite and > 0 (got " + fmt_value(p.beta) + ")");
}

GammaParams GammaParams::make(double alpha, double beta) {
    GammaParams p{alpha, beta};
    validate(p);
    return p;
}

Dependence Dependence::from_lambda(double lambda) {
    if (!positive_finite(lambda))
        throw ParameterError("lambda must be finite and > 0 (got " + fmt_value(lambda) + ")");
    return Dependence(lambda, std::exp(-lambda));
}

Dependence Dependence::from_rho(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw ParameterError("rho must lie in (0, 1) (got " + fmt_value(rho) + ")");
    return Dependence(-std::log(rho), rho);
}

double Dependence::rho_over(double dt) const { return std::exp(-lambda_ * dt); }

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) throw ParameterError("time grid must contain at least one point");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i])) throw ParameterError("time grid contains a non-finite value");
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw ParameterError("time grid must be strictly increasing (index " + std::to_string(i) + ")");
    }
}

std::optional<double> TimeGrid::uniform_spacing() const {
    if (times_.size() < 2) return std::nullopt;
    const double dt = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
    for (std::size_t i = 1; i < times_.size(); ++i) {
        const double gap = times_[i] - times_[i - 1];
        if (std::abs(gap - dt) > 1e-9 * dt) return std::nullopt;
    }
    return dt;
}

TimeGrid make_uniform_grid(double t0, double dt, std::int64_t n) {
    if (!std::isfinite(t0)) throw ParameterError("t0 must be finite");
    if (!positive_finite(dt)) throw ParameterError("dt must be finite and > 0 (got " + fmt_value(dt) + ")");
    if (n < 1) throw ParameterError("n must be >= 1 (got " + std::to_string(n) + ")");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t0 + static_cast<double>(i) * dt;
    return TimeGrid(std::move(t));
}

namespace {
constexpr std::array<std::pair<ProcessKind, std::string_view>, 6> kNames{{
    {ProcessKind::Ar1, "ar1"},
    {ProcessKind::Thinned, "thinned"},
    {ProcessKind::RandomMeasure, "rm"},
    {ProcessKind::ChangePoint, "changepoint"},
    {ProcessKind::SquaredOU, "cir"},
    {ProcessKind::ContinuouslyThinned, "cthin"},
}};
}  // namespace

std::string_view to_string(ProcessKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<ProcessKind> parse_process_kind(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    return std::nullopt;
}

std::vector<double> Ensemble::column(std::size_t k) const {
    if (k >= grid.size()) throw ParameterError("column index outside the grid");
    std::vector<double> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(p[k]);
    return out;
}

}  // namespace sgp
