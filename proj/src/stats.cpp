#include "sgp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sgp/parallel.hpp"
#include "sgp/processes.hpp"
#include "sgp/samplers.hpp"

namespace sgp {

namespace {

double mean_of(std::span<const double> v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
    const double m = mean_of(v);
    CompensatedSum s;
    for (double x : v) s.add((x - m) * (x - m));
    return std::sqrt(s.value() / static_cast<double>(v.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean_of(x), my = mean_of(y);
    CompensatedSum sxy, sxx, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    const double den = std::sqrt(sxx.value() * syy.value());
    return den > 0.0 ? sxy.value() / den : 0.0;
}

double uniform_spacing_or_throw(const TimeGrid& grid, const char* who) {
    if (grid.size() < 2) throw ParameterError(std::string(who) + " needs at least two grid points");
    const auto dt = grid.uniform_spacing();
    if (!dt) throw ParameterError(std::string(who) + " needs a uniform grid");
    return *dt;
}

}  // namespace

MomentReport empirical_moments(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw ParameterError("empirical_moments needs at least 2 values");
    const double mean = mean_of(values);
    CompensatedSum s2, s4;
    for (double x : values) {
        const double d = x - mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    const double nn = static_cast<double>(n);
    const double var = s2.value() / (nn - 1.0);
    const double m2 = s2.value() / nn;
    const double m4 = s4.value() / nn;
    return {mean, var, std::sqrt(var / nn), std::sqrt(std::max(m4 - m2 * m2, 0.0) / nn), n};
}

AcfReport empirical_acf(const SamplePath& path, int max_lag, const Dependence& dep) {
    if (max_lag < 1) throw ParameterError("max_lag must be >= 1");
    const std::size_t n = path.values.size();
    const auto lag_count = static_cast<std::size_t>(max_lag);
    if (n < 10 * lag_count) throw ParameterError("path too short: need at least 10 * max_lag values");
    const double dt = uniform_spacing_or_throw(path.grid, "empirical_acf");

    const double tau = 1.0 / (dep.lambda() * dt);  // e-folding time in steps
    std::size_t batch = static_cast<std::size_t>(std::ceil(50.0 * tau));
    batch = std::max(batch, 2 * lag_count);
    batch = std::min(batch, n / 20);
    if (batch <= lag_count) throw ParameterError("path too short for batch-means standard errors");
    const std::size_t n_batches = n / batch;

    const double mean = mean_of(path.values);
    std::vector<double> c(n);
    for (std::size_t t = 0; t < n; ++t) c[t] = path.values[t] - mean;
    CompensatedSum c0s;
    for (double v : c) c0s.add(v * v);
    const double c0 = c0s.value() / static_cast<double>(n);

    AcfReport rep;
    rep.batch_length = batch;
    rep.batches = n_batches;
    for (int k = 1; k <= max_lag; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        CompensatedSum all;
        for (std::size_t t = 0; t + kk < n; ++t) all.add(c[t] * c[t + kk]);
        const double est = all.value() / static_cast<double>(n) / c0;

        std::vector<double> per_batch(n_batches);
        for (std::size_t b = 0; b < n_batches; ++b) {
            CompensatedSum s;
            const std::size_t lo = b * batch, hi = lo + batch;
            for (std::size_t t = lo; t + kk < hi; ++t) s.add(c[t] * c[t + kk]);
            per_batch[b] = s.value() / static_cast<double>(batch - kk) / c0;
        }
        rep.lags.push_back(k);
        rep.estimates.push_back(std::clamp(est, -1.0, 1.0));
        rep.standard_errors.push_back(sd_of(per_batch) / std::sqrt(static_cast<double>(n_batches)));
        rep.target.push_back(std::pow(dep.rho_over(dt), k));
    }
    return rep;
}

AcfReport ensemble_acf(const Ensemble& ensemble, int max_lag) {
    if (max_lag < 1) throw ParameterError("max_lag must be >= 1");
    const double dt = uniform_spacing_or_throw(ensemble.grid, "ensemble_acf");
    if (ensemble.grid.size() < static_cast<std::size_t>(max_lag) + 1)
        throw ParameterError("ensemble grid shorter than max_lag + 1 points");
    constexpr std::size_t kGroups = 100;
    const std::size_t n = ensemble.n_paths();
    if (n < 10 * kGroups) throw ParameterError("ensemble_acf needs at least 1000 paths");
    const std::size_t group = n / kGroups;

    const std::vector<double> x0 = ensemble.column(0);
    AcfReport rep;
    rep.batch_length = group;
    rep.batches = kGroups;
    for (int k = 1; k <= max_lag; ++k) {
        const std::vector<double> xk = ensemble.column(static_cast<std::size_t>(k));
        std::vector<double> per_group(kGroups);
        for (std::size_t g = 0; g < kGroups; ++g)
            per_group[g] = pearson(std::span(x0).subspan(g * group, group), std::span(xk).subspan(g * group, group));
        rep.lags.push_back(k);
        rep.estimates.push_back(pearson(x0, xk));
        rep.standard_errors.push_back(sd_of(per_group) / std::sqrt(static_cast<double>(kGroups)));
        rep.target.push_back(std::pow(ensemble.dep.rho_over(dt), k));
    }
    return rep;
}

KsResult ks_statistic(std::span<const double> values, const GammaParams& p) {
    const std::size_t n = values.size();
    if (n < 100) throw ParameterError("ks_statistic needs at least 100 values (got " + std::to_string(n) + ")");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double nn = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = gamma_cdf(sorted[i], p);
        d = std::max({d, static_cast<double>(i + 1) / nn - f, f - static_cast<double>(i) / nn});
    }
    return {d, 1.628 / std::sqrt(nn)};
}

SampleMatrix sample_matrix(const Ensemble& ensemble, std::span<const std::size_t> indices) {
    for (std::size_t idx : indices)
        if (idx >= ensemble.grid.size()) throw ParameterError("sample index outside the grid");
    SampleMatrix m;
    m.dim = indices.size();
    m.data.reserve(ensemble.n_paths() * m.dim);
    for (const auto& path : ensemble.paths)
        for (std::size_t idx : indices) m.data.push_back(path[idx]);
    return m;
}

std::vector<ChfEstimate> empirical_chf(const SampleMatrix& samples, std::span<const std::vector<double>> omegas) {
    const std::size_t n = samples.rows();
    if (n < 2) throw ParameterError("empirical_chf needs at least 2 samples");
    std::vector<ChfEstimate> out;
    out.reserve(omegas.size());
    for (const auto& w : omegas) {
        if (w.size() != samples.dim)
            throw ParameterError("frequency of dimension " + std::to_string(w.size()) + " for samples of dimension " +
                                 std::to_string(samples.dim));
        CompensatedSum sc, ss, sc2, ss2;
        for (std::size_t r = 0; r < n; ++r) {
            const auto x = samples.row(r);
            double phase = 0.0;
            for (std::size_t d = 0; d < samples.dim; ++d) phase += w[d] * x[d];
            const double c = std::cos(phase), s = std::sin(phase);
            sc.add(c);
            ss.add(s);
            sc2.add(c * c);
            ss2.add(s * s);
        }
        const double nn = static_cast<double>(n);
        const double mc = sc.value() / nn, ms = ss.value() / nn;
        const double vc = std::max(sc2.value() / nn - mc * mc, 0.0) * nn / (nn - 1.0);
        const double vs = std::max(ss2.value() / nn - ms * ms, 0.0) * nn / (nn - 1.0);
        out.push_back({Complex{mc, ms}, std::sqrt(vc / nn), std::sqrt(vs / nn)});
    }
    return out;
}

double chf_z_score(Complex diff, double se_re, double se_im) {
    auto one = [](double d, double se) {
        if (d == 0.0) return 0.0;
        if (se == 0.0) return std::numeric_limits<double>::infinity();
        return std::abs(d) / se;
    };
    return std::max(one(diff.real(), se_re), one(diff.imag(), se_im));
}

double ChfComparison::max_z() const {
    return z_scores.empty() ? 0.0 : *std::max_element(z_scores.begin(), z_scores.end());
}

std::size_t ChfComparison::argmax() const {
    return static_cast<std::size_t>(std::max_element(z_scores.begin(), z_scores.end()) - z_scores.begin());
}

ChfComparison chf_gof(const Ensemble& ensemble, std::span<const std::array<double, 2>> omegas, int lag,
                      std::optional<ProcessKind> formula) {
    const ProcessKind kind = formula.value_or(ensemble.kind);
    if (kind == ProcessKind::ContinuouslyThinned || ensemble.kind == ProcessKind::ContinuouslyThinned)
        throw UnsupportedKind("the continuously thinned process has no closed-form pair chf");
    if (lag < 1) throw ParameterError("lag must be >= 1");
    const double dt = uniform_spacing_or_throw(ensemble.grid, "chf_gof");
    if (ensemble.grid.size() <= static_cast<std::size_t>(lag)) throw ParameterError("grid shorter than lag + 1 points");

    const std::array<std::size_t, 2> idx{0, static_cast<std::size_t>(lag)};
    const SampleMatrix pairs = sample_matrix(ensemble, idx);
    ChfComparison cmp;
    for (const auto& w : omegas) cmp.omegas.push_back({w[0], w[1]});
    cmp.empirical = empirical_chf(pairs, cmp.omegas);
    const Dependence gap_dep = ensemble.dep.over(dt * lag);
    for (std::size_t i = 0; i < cmp.omegas.size(); ++i) {
        const Complex a = pair_chf(kind, omegas[i][0], omegas[i][1], ensemble.params, gap_dep);
        cmp.analytic.push_back(a);
        const auto& e = cmp.empirical[i];
        cmp.z_scores.push_back(chf_z_score(e.value - a, e.se_re, e.se_im));
    }
    return cmp;
}

Discrimination chf_discrimination(const Ensemble& a, const Ensemble& b, std::span<const std::vector<double>> omegas,
                                  std::size_t points) {
    if (points < 1) throw ParameterError("points must be >= 1");
    if (!(a.grid == b.grid)) throw ParameterError("ensembles must be observed on the same grid");
    if (a.grid.size() < points) throw ParameterError("grid has fewer points than requested");
    if (a.params.alpha != b.params.alpha || a.params.beta != b.params.beta || a.dep.lambda() != b.dep.lambda())
        throw ParameterError("ensembles must share alpha, beta and lambda");
    std::vector<std::size_t> idx(points);
    for (std::size_t i = 0; i < points; ++i) idx[i] = i;
    const auto ea = empirical_chf(sample_matrix(a, idx), omegas);
    const auto eb = empirical_chf(sample_matrix(b, idx), omegas);
    Discrimination out;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double se_re = std::hypot(ea[i].se_re, eb[i].se_re);
        const double se_im = std::hypot(ea[i].se_im, eb[i].se_im);
        const double z = chf_z_score(ea[i].value - eb[i].value, se_re, se_im);
        out.z_scores.push_back(z);
        if (out.argmax.empty() || z > out.max_z) {
            out.max_z = z;
            out.argmax = omegas[i];
        }
    }
    return out;
}

Discrimination triplet_discrimination(const Ensemble& a, const Ensemble& b,
                                      std::span<const std::array<double, 3>> omegas) {
    std::vector<std::vector<double>> w;
    w.reserve(omegas.size());
    for (const auto& o : omegas) w.push_back({o[0], o[1], o[2]});
    return chf_discrimination(a, b, w, 3);
}

ReversibilityReport reversibility_check(const SamplePath& path, const Dependence& dep) {
    const double dt = uniform_spacing_or_throw(path.grid, "reversibility_check");
    const double rho = dep.over(dt).rho();
    const auto& x = path.values;
    std::int64_t forward = 0, backward = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (x[t] < rho * x[t - 1]) ++forward;
        if (x[t - 1] < rho * x[t]) ++backward;
    }
    const auto steps = static_cast<std::int64_t>(x.size() - 1);
    return {forward, static_cast<double>(backward) / static_cast<double>(steps), steps};
}

GeneratorCheck generator_check(ProcessKind kind, const TestFunction& phi, double x0, const GammaParams& p,
                               const Dependence& dep, const GeneratorCheckOptions& opts) {
    if (kind != ProcessKind::SquaredOU && kind != ProcessKind::ContinuouslyThinned)
        throw UnsupportedKind("generator_check supports only the cir and cthin kinds");
    if (!(opts.epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
    if (opts.n_mc < 2) throw ParameterError("n_mc must be >= 2");
    if (!(x0 >= 0.0)) throw ParameterError("x0 must be >= 0");
    const double eps = opts.epsilon;
    const bool use_cv = opts.control_variate.value_or(phi.kind() != TestFunction::Kind::Identity);
    // Both kinds have E[X_eps | x0] = x0 e^{-lambda eps} + (alpha/beta)(1 - e^{-lambda eps}).
    const double cond_mean = x0 * std::exp(-dep.lambda() * eps) + p.mean() * -std::expm1(-dep.lambda() * eps);
    const double slope = phi.d1(x0);

    std::vector<double> y(opts.n_mc);
    parallel_for(opts.n_mc, opts.threads, [&](std::size_t m) {
        RandomSource rng = derive_stream(opts.seed, m);
        const double x = kind == ProcessKind::SquaredOU ? cir_transition_draw(rng, x0, eps, p, dep)
                                                        : cthin_step(rng, x0, eps, p, dep);
        const double h = x - x0;
        double v = h * phi.divided_difference(x0, h);
        if (use_cv) v = h * (phi.divided_difference(x0, h) - slope) + slope * (cond_mean - x0);
        y[m] = v / eps;
    });
    const MomentReport mr = empirical_moments(y);
    const double analytic = generator_apply(kind, phi, x0, p, dep);
    const double z = mr.se_mean > 0.0 ? std::abs(mr.mean - analytic) / mr.se_mean
                                      : (mr.mean == analytic ? 0.0 : std::numeric_limits<double>::infinity());
    return {mr.mean, mr.se_mean, analytic, z};
}

TailReport tail_check(const GammaParams& p, std::span<const double> u_grid) {
    TailReport rep;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        const double u = u_grid[i];
        if (!(u > 0.0)) throw ParameterError("tail_check needs positive u values");
        if (i > 0 && !(u > u_grid[i - 1])) throw ParameterError("tail_check needs an increasing u grid");
        const double s = gamma_survival(u, p);
        const LevyTail lt = levy_tail(u, p);
        const double bu = p.beta * u;
        rep.rows.push_back({u, s, lt.exact, lt.approximant, -std::log(s) / bu, -std::log(lt.exact) / bu,
                            std::log(lt.approximant) / std::log(s)});
    }
    const double tail_start = 5.0 / p.beta;
    const TailRow* prev = nullptr;
    for (const auto& r : rep.rows) {
        if (r.u < tail_start) continue;
        if (prev) {
            auto worse = [](double now, double before) { return std::abs(now - 1.0) > std::abs(before - 1.0) + 1e-12; };
            if (worse(r.neglog_survival_ratio, prev->neglog_survival_ratio) ||
                worse(r.neglog_levy_ratio, prev->neglog_levy_ratio) ||
                worse(r.approx_log_ratio, prev->approx_log_ratio))
                rep.tail_monotone = false;
        }
        prev = &r;
    }
    return rep;
}

std::vector<double> default_omega_axis(const GammaParams& p) {
    std::vector<double> out;
    for (double w : {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0}) out.push_back(w / p.beta);
    return out;
}

}  // namespace sgp
