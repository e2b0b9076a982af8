#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgp/analytic.hpp"
#include "sgp/core.hpp"
#include "sgp/processes.hpp"
#include "sgp/stats.hpp"

namespace sgp::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RawConfig {
    std::string process;
    double alpha = 2.0;
    double beta = 1.0;
    std::optional<double> rho;
    std::optional<double> lambda;
    double t0 = 0.0;
    double dt = 1.0;
    std::optional<std::int64_t> n;
    std::string times_file;
    std::optional<std::size_t> paths;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
    std::string format = "csv";
    std::string cir_method = "exact";
    std::int64_t euler_substeps = 64;
    std::int64_t cthin_steps = 256;
    std::string omega_grid;
};

struct Config {
    ProcessKind kind{};
    GammaParams params{};
    Dependence dep = Dependence::from_lambda(1.0);
    TimeGrid grid{std::vector<double>{0.0}};
    SimulationOptions sim;
    RawConfig raw;
};

void add_common_options(CLI::App& app, RawConfig& c, bool with_grid) {
    app.add_option("--process", c.process, "ar1 | thinned | rm | changepoint | cir | cthin")->required();
    app.add_option("--alpha", c.alpha, "gamma shape")->capture_default_str();
    app.add_option("--beta", c.beta, "gamma rate")->capture_default_str();
    auto* rho = app.add_option("--rho", c.rho, "unit-time correlation exp(-lambda)");
    auto* lam = app.add_option("--lambda", c.lambda, "decay rate");
    rho->excludes(lam);
    lam->excludes(rho);
    if (with_grid) {
        app.add_option("--t0", c.t0, "first grid time")->capture_default_str();
        app.add_option("--dt", c.dt, "grid spacing")->capture_default_str();
        auto* n = app.add_option("--n", c.n, "number of grid points");
        auto* times = app.add_option("--times", c.times_file, "file of grid times (whitespace separated)");
        n->excludes(times);
        times->excludes(n);
    }
    app.add_option("--paths", c.paths, "number of paths");
    app.add_option("--seed", c.seed, "master seed")->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--out", c.out, "output file (default: standard output)");
    app.add_option("--cir-method", c.cir_method, "exact | euler | squared-ou")->capture_default_str();
    app.add_option("--euler-substeps", c.euler_substeps, "substeps per unit time for euler / squared-ou")
        ->capture_default_str();
    app.add_option("--cthin-steps", c.cthin_steps, "cthin lattice steps per unit time")->capture_default_str();
}

std::vector<double> read_times(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open times file '" + path + "'");
    std::vector<double> t;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            t.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::logic_error&) {
            throw ParameterError("times file contains a non-numeric entry '" + tok + "'");
        }
    }
    return t;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::logic_error&) {
            throw ParameterError(std::string(what) + ": cannot parse '" + tok + "'");
        }
    }
    if (out.empty()) throw ParameterError(std::string(what) + " is empty");
    return out;
}

Dependence resolve_dependence(const RawConfig& c, std::optional<double> default_rho) {
    if (c.rho) return Dependence::from_rho(*c.rho);
    if (c.lambda) {
        // Route through rho so that --lambda L and --rho exp(-L) resolve to the same state.
        const Dependence d = Dependence::from_lambda(*c.lambda);
        return d.rho() > 0.0 && d.rho() < 1.0 ? Dependence::from_rho(d.rho()) : d;
    }
    if (default_rho) return Dependence::from_rho(*default_rho);
    throw ParameterError("exactly one of --rho or --lambda is required");
}

Config resolve(const RawConfig& raw, std::int64_t default_n, std::optional<double> default_rho) {
    Config c;
    c.raw = raw;
    const auto kind = parse_process_kind(raw.process);
    if (!kind)
        throw ParameterError("unknown process '" + raw.process + "' (expected ar1, thinned, rm, changepoint, cir or cthin)");
    c.kind = *kind;
    c.params = GammaParams::make(raw.alpha, raw.beta);
    c.dep = resolve_dependence(raw, default_rho);
    c.grid = raw.times_file.empty() ? make_uniform_grid(raw.t0, raw.dt, raw.n.value_or(default_n))
                                    : TimeGrid(read_times(raw.times_file));
    if (raw.euler_substeps < 1) throw ParameterError("--euler-substeps must be >= 1");
    const double dt_sub = 1.0 / static_cast<double>(raw.euler_substeps);
    if (raw.cir_method == "exact")
        c.sim.cir_method = cir::Exact{};
    else if (raw.cir_method == "euler")
        c.sim.cir_method = cir::Euler{dt_sub};
    else if (raw.cir_method == "squared-ou")
        c.sim.cir_method = cir::SquaredOU{dt_sub};
    else
        throw ParameterError("unknown --cir-method '" + raw.cir_method + "' (expected exact, euler or squared-ou)");
    c.sim.cthin.steps_per_unit_time = raw.cthin_steps;
    c.sim.threads = raw.threads;
    if (raw.paths && *raw.paths < 1) throw ParameterError("--paths must be >= 1");
    return c;
}

// Everything that determines the output; the thread count does not.
json config_json(const Config& c, std::size_t paths) {
    json j;
    j["process"] = std::string(to_string(c.kind));
    j["alpha"] = c.params.alpha;
    j["beta"] = c.params.beta;
    j["lambda"] = c.dep.lambda();
    j["rho"] = c.dep.rho();
    j["paths"] = paths;
    j["seed"] = c.raw.seed;
    if (c.kind == ProcessKind::SquaredOU) {
        j["cir_method"] = c.raw.cir_method;
        if (c.raw.cir_method != "exact") j["euler_substeps"] = c.raw.euler_substeps;
    }
    if (c.kind == ProcessKind::ContinuouslyThinned) j["cthin_steps"] = c.raw.cthin_steps;
    return j;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        out.flush();
        if (!out) throw IoError("failed writing to standard output");
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file '" + path + "'");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing output file '" + path + "'");
}

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int cmd_simulate(const RawConfig& raw, std::ostream& out) {
    if (raw.format != "csv" && raw.format != "json")
        throw ParameterError("unknown --format '" + raw.format + "' (expected csv or json)");
    const Config c = resolve(raw, 100, std::nullopt);
    const std::size_t paths = raw.paths.value_or(1);
    const Ensemble e = simulate_ensemble(c.kind, c.grid, c.params, c.dep, paths, raw.seed, c.sim);

    std::string text;
    if (raw.format == "csv") {
        text.reserve(paths * c.grid.size() * 48 + 16);
        text += "path,t,value\n";
        for (std::size_t m = 0; m < paths; ++m) {
            const std::string prefix = std::to_string(m) + ",";
            for (std::size_t k = 0; k < c.grid.size(); ++k) {
                text += prefix;
                text += fmt17(c.grid[k]);
                text += ',';
                text += fmt17(e.paths[m][k]);
                text += '\n';
            }
        }
    } else {
        json j;
        j["version"] = SGP_VERSION;
        j["config"] = config_json(c, paths);
        j["times"] = std::vector<double>(c.grid.times().begin(), c.grid.times().end());
        j["paths"] = e.paths;
        text = j.dump() + "\n";
    }
    emit(text, raw.out, out);
    return kOk;
}

struct Suite {
    json checks = json::array();
    bool passed = true;

    void add(json check) {
        if (check.contains("passed") && !check["passed"].get<bool>()) passed = false;
        checks.push_back(std::move(check));
    }
    void skip(const std::string& name, const std::string& reason) {
        checks.push_back({{"name", name}, {"status", "skipped"}, {"reason", reason}});
    }
};

json check_record(const std::string& name, double statistic, double threshold, bool passed) {
    return {{"name", name},
            {"status", passed ? "pass" : "fail"},
            {"statistic", statistic},
            {"threshold", threshold},
            {"passed", passed}};
}

std::vector<double> omega_axis(const Config& c) {
    return c.raw.omega_grid.empty() ? default_omega_axis(c.params) : parse_list(c.raw.omega_grid, "--omega-grid");
}

std::size_t default_paths(const Config& c, std::size_t fallback) {
    return c.raw.paths.value_or(c.kind == ProcessKind::ContinuouslyThinned ? std::min<std::size_t>(fallback, 20000)
                                                                           : fallback);
}

void suite_marginal(const Config& c, Suite& s) {
    const std::size_t n = c.raw.paths.value_or(100000);
    const Ensemble e =
        simulate_ensemble(c.kind, make_uniform_grid(0.0, 1.0, 2), c.params, c.dep, n, c.raw.seed, c.sim);
    const KsResult ks = ks_statistic(e.column(1), c.params);
    json j = check_record("marginal.ks", ks.statistic, ks.critical_1pct, ks.passes());
    j["n"] = n;
    j["time"] = 1.0;
    s.add(std::move(j));
}

void suite_acf(const Config& c, Suite& s) {
    constexpr int kLags = 5;
    AcfReport r;
    json meta;
    if (c.kind == ProcessKind::RandomMeasure || c.kind == ProcessKind::ContinuouslyThinned) {
        const std::size_t n = default_paths(c, 100000);
        const Ensemble e = simulate_ensemble(c.kind, make_uniform_grid(0.0, 1.0, kLags + 1), c.params, c.dep, n,
                                             c.raw.seed + 1, c.sim);
        r = ensemble_acf(e, kLags);
        meta = {{"estimator", "ensemble"}, {"paths", n}};
    } else {
        const std::int64_t steps = 100000;
        RandomSource rng = derive_stream(c.raw.seed + 1, 0);
        const SamplePath p = simulate_path(c.kind, rng, make_uniform_grid(0.0, 1.0, steps), c.params, c.dep, c.sim);
        r = empirical_acf(p, kLags, c.dep);
        meta = {{"estimator", "batch-means"}, {"steps", steps}, {"batch_length", r.batch_length}};
    }
    for (std::size_t k = 0; k < r.lags.size(); ++k) {
        const double z = std::abs(r.estimates[k] - r.target[k]) / r.standard_errors[k];
        json j = check_record("acf.lag" + std::to_string(r.lags[k]), z, 4.0, z <= 4.0);
        j["estimate"] = r.estimates[k];
        j["target"] = r.target[k];
        j["se"] = r.standard_errors[k];
        j.update(meta);
        s.add(std::move(j));
    }
}

void suite_chf(const Config& c, Suite& s) {
    if (c.kind == ProcessKind::ContinuouslyThinned) {
        s.skip("chf.pair", "the continuously thinned process has no closed-form pair chf");
        return;
    }
    std::optional<ProcessKind> formula;
    if (const char* forced = std::getenv("SGP_VERIFY_FORCE_FORMULA"); forced && *forced) {
        formula = parse_process_kind(forced);
        if (!formula) throw ParameterError(std::string("SGP_VERIFY_FORCE_FORMULA names an unknown process '") + forced + "'");
    }
    const std::size_t n = c.raw.paths.value_or(100000);
    const Ensemble e =
        simulate_ensemble(c.kind, make_uniform_grid(0.0, 1.0, 2), c.params, c.dep, n, c.raw.seed + 2, c.sim);
    std::vector<std::array<double, 2>> omegas;
    for (double a : omega_axis(c))
        for (double b : omega_axis(c)) omegas.push_back({a, b});
    const ChfComparison cmp = chf_gof(e, omegas, 1, formula);
    const double z = cmp.max_z();
    json j = check_record("chf.pair", z, 4.0, z < 4.0);
    j["formula"] = std::string(to_string(formula.value_or(c.kind)));
    j["points"] = omegas.size();
    j["paths"] = n;
    j["argmax_omega"] = cmp.omegas[cmp.argmax()];
    json failing = json::array();
    for (std::size_t i = 0; i < cmp.z_scores.size(); ++i)
        if (!(cmp.z_scores[i] < 4.0)) failing.push_back({{"omega", cmp.omegas[i]}, {"z", cmp.z_scores[i]}});
    j["failing_omegas"] = failing;
    s.add(std::move(j));
}

void suite_generator(const Config& c, Suite& s) {
    if (c.kind != ProcessKind::SquaredOU && c.kind != ProcessKind::ContinuouslyThinned) {
        s.skip("generator", "only the cir and cthin processes have a generator check");
        return;
    }
    std::uint64_t stream = 0;
    for (const auto& [label, phi] : {std::pair{"identity", TestFunction::identity()},
                                     std::pair{"square", TestFunction::square()}}) {
        for (double x0 : {0.5, 2.0}) {
            GeneratorCheckOptions o;
            o.epsilon = 1e-3 / c.dep.lambda();
            o.n_mc = 1000000;
            o.seed = c.raw.seed + 100 + stream++;
            o.threads = c.raw.threads;
            const GeneratorCheck g = generator_check(c.kind, phi, x0, c.params, c.dep, o);
            json j = check_record(std::string("generator.") + label + ".x0=" + fmt17(x0), std::abs(g.z), 4.0,
                                  std::abs(g.z) < 4.0);
            j["fd_estimate"] = g.fd_estimate;
            j["se"] = g.se;
            j["analytic"] = g.analytic;
            s.add(std::move(j));
        }
    }
}

void suite_tail(const Config& c, Suite& s) {
    std::vector<double> u;
    for (double v : {0.1, 1.0, 5.0, 10.0, 20.0, 30.0, 50.0, 100.0}) u.push_back(v / c.params.beta);
    const TailReport t = tail_check(c.params, u);
    json table = json::array();
    for (const auto& r : t.rows)
        table.push_back({{"u", r.u},
                         {"survival", r.survival},
                         {"levy_tail", r.levy_exact},
                         {"approximant", r.approximant},
                         {"neglog_survival_ratio", r.neglog_survival_ratio},
                         {"neglog_levy_ratio", r.neglog_levy_ratio},
                         {"approx_log_ratio", r.approx_log_ratio}});
    json j = {{"name", "tail.monotone"},
              {"status", t.tail_monotone ? "pass" : "fail"},
              {"passed", t.tail_monotone},
              {"tail_start", 5.0 / c.params.beta},
              {"table", table}};
    s.add(std::move(j));
}

int cmd_verify(const RawConfig& raw, const std::string& suite, std::ostream& out) {
    const Config c = resolve(raw, 2, 0.5);
    Suite s;
    const bool all = suite == "all";
    if (!all && suite != "marginal" && suite != "acf" && suite != "chf" && suite != "generator" && suite != "tail")
        throw ParameterError("unknown --suite '" + suite + "' (expected marginal, acf, chf, generator, tail or all)");
    if (all || suite == "marginal") suite_marginal(c, s);
    if (all || suite == "acf") suite_acf(c, s);
    if (all || suite == "chf") suite_chf(c, s);
    if (all || suite == "generator") suite_generator(c, s);
    if (all || suite == "tail") suite_tail(c, s);

    json report;
    report["version"] = SGP_VERSION;
    report["command"] = "verify";
    report["suite"] = suite;
    json cfg = config_json(c, c.raw.paths.value_or(0));
    if (!c.raw.paths) cfg.erase("paths");
    report["config"] = cfg;
    report["checks"] = s.checks;
    report["passed"] = s.passed;
    emit(report.dump(2) + "\n", raw.out, out);
    return s.passed ? kOk : kVerifyFailed;
}

struct CompareB {
    std::string process;
    std::optional<double> alpha, beta, rho, lambda;
    std::optional<std::uint64_t> seed;
};

int cmd_compare(const RawConfig& raw, const CompareB& braw, int points, std::ostream& out) {
    if (points != 2 && points != 3) throw ParameterError("--points must be 2 or 3");
    const Config a = resolve(raw, 3, std::nullopt);
    RawConfig rb = raw;
    rb.process = braw.process;
    if (braw.alpha) rb.alpha = *braw.alpha;
    if (braw.beta) rb.beta = *braw.beta;
    if (braw.rho || braw.lambda) {
        rb.rho = braw.rho;
        rb.lambda = braw.lambda;
    }
    rb.seed = braw.seed.value_or(raw.seed + 1);
    const Config b = resolve(rb, 3, std::nullopt);
    if (a.params.alpha != b.params.alpha || a.params.beta != b.params.beta ||
        std::abs(a.dep.lambda() - b.dep.lambda()) > 1e-12 * a.dep.lambda())
        throw ParameterError("compared processes must share alpha, beta and lambda");
    if (a.grid.size() < static_cast<std::size_t>(points))
        throw ParameterError("grid needs at least " + std::to_string(points) + " points");
    const auto dt = a.grid.uniform_spacing();
    if (!dt) throw ParameterError("compare needs a uniform grid");

    const TimeGrid g(std::vector<double>(a.grid.times().begin(), a.grid.times().begin() + points));
    const std::size_t n = raw.paths.value_or(100000);
    const Ensemble ea = simulate_ensemble(a.kind, g, a.params, a.dep, n, a.raw.seed, a.sim);
    const Ensemble eb = simulate_ensemble(b.kind, g, b.params, a.dep, n, b.raw.seed, b.sim);

    const std::vector<double> axis = omega_axis(a);
    std::vector<std::vector<double>> pairs;
    for (double x : axis)
        for (double y : axis) pairs.push_back({x, y});
    const Discrimination d2 = chf_discrimination(ea, eb, pairs, 2);

    json report;
    report["version"] = SGP_VERSION;
    report["command"] = "compare";
    report["a"] = config_json(a, n);
    report["b"] = config_json(b, n);
    report["points"] = points;
    report["times"] = std::vector<double>(g.times().begin(), g.times().end());
    report["pairwise"] = {{"max_z", d2.max_z}, {"argmax_omega", d2.argmax}, {"omegas", pairs.size()}};
    if (points == 3) {
        std::vector<std::vector<double>> triples;
        if (raw.omega_grid.empty()) {
            const double s = 1.0 / a.params.beta;
            for (const auto& t : std::vector<std::array<double, 3>>{
                     {2, -2, 2},   {2, .5, -2},   {2, -.5, -2}, {2, .25, -2}, {2, -.25, -2}, {2, -1, 2},  {2, 1, -2},
                     {1, .5, -2},  {1, 1, -2},    {2, -1, -2},  {2, -.5, -1}, {1, -2, 2},    {2, -2, 1},  {.5, .5, .5},
                     {1, 1, 1},    {.25, -.5, 1}, {-1, .5, .25}, {.5, -1, .5}, {1, -1, 1},   {2, 2, 2}})
                triples.push_back({t[0] * s, t[1] * s, t[2] * s});
        } else {
            for (double x : axis)
                for (double y : axis)
                    for (double z : axis) triples.push_back({x, y, z});
        }
        const Discrimination d3 = chf_discrimination(ea, eb, triples, 3);
        report["triplet"] = {{"max_z", d3.max_z}, {"argmax_omega", d3.argmax}, {"omegas", triples.size()}};
    }
    emit(report.dump(2) + "\n", raw.out, out);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate and verify stationary gamma processes with exponential autocorrelation", "sgp"};
    app.set_version_flag("--version", SGP_VERSION);
    app.require_subcommand(1);

    RawConfig sim_cfg;
    auto* sim = app.add_subcommand("simulate", "simulate an ensemble of paths");
    add_common_options(*sim, sim_cfg, true);
    sim->add_option("--format", sim_cfg.format, "csv | json")->capture_default_str();

    RawConfig ver_cfg;
    std::string suite = "all";
    auto* ver = app.add_subcommand("verify", "run verification checks and write a JSON report");
    add_common_options(*ver, ver_cfg, false);
    ver->add_option("--suite", suite, "marginal | acf | chf | generator | tail | all")->capture_default_str();
    ver->add_option("--omega-grid", ver_cfg.omega_grid, "comma-separated per-coordinate frequencies");

    RawConfig cmp_cfg;
    CompareB cmp_b;
    int points = 3;
    auto* cmp = app.add_subcommand("compare", "two-sample chf comparison of two processes");
    add_common_options(*cmp, cmp_cfg, true);
    cmp->add_option("--omega-grid", cmp_cfg.omega_grid, "comma-separated per-coordinate frequencies");
    cmp->add_option("--process-b", cmp_b.process, "second process")->required();
    cmp->add_option("--alpha-b", cmp_b.alpha, "must equal --alpha");
    cmp->add_option("--beta-b", cmp_b.beta, "must equal --beta");
    auto* rb = cmp->add_option("--rho-b", cmp_b.rho, "must match the first process");
    auto* lb = cmp->add_option("--lambda-b", cmp_b.lambda, "must match the first process");
    rb->excludes(lb);
    cmp->add_option("--seed-b", cmp_b.seed, "seed of the second ensemble (default: --seed + 1)");
    cmp->add_option("--points", points, "2 (pairs) or 3 (triplets)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) return cmd_simulate(sim_cfg, out);
        if (*ver) return cmd_verify(ver_cfg, suite, out);
        if (*cmp) return cmd_compare(cmp_cfg, cmp_b, points, out);
    } catch (const ParameterError& e) {
        err << "sgp: " << e.what() << "\n";
        return kUsage;
    } catch (const UnsupportedKind& e) {
        err << "sgp: " << e.what() << "\n";
        return kUsage;
    } catch (const IoError& e) {
        err << "sgp: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err << "sgp: " << e.what() << "\n";
        return kVerifyFailed;
    }
    return kUsage;
}

}  // namespace sgp::cli
