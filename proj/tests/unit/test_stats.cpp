#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "sgp/processes.hpp"
#include "sgp/samplers.hpp"
#include "sgp/stats.hpp"

using namespace sgp;

namespace {

std::vector<double> gamma_sample(std::uint64_t seed, std::size_t n, const GammaParams& p) {
    RandomSource rng(seed, 0);
    std::vector<double> v(n);
    for (auto& x : v) x = gamma_draw(rng, p.alpha, p.beta);
    return v;
}

SamplePath path_of(ProcessKind kind, std::uint64_t seed, std::size_t n, const GammaParams& p, const Dependence& dep) {
    RandomSource rng(seed, 0);
    return simulate_path(kind, rng, make_uniform_grid(0, 1, static_cast<std::int64_t>(n)), p, dep);
}

std::vector<std::array<double, 2>> twenty_pairs() {
    const double a[] = {-2, -1, -0.5, 0.5, 1, 2};
    std::vector<std::array<double, 2>> out;
    for (double s : a)
        for (double t : a)
            if (out.size() < 20 && (s + t != 0.0 || s > 0)) out.push_back({s, t});
    return out;
}

std::vector<std::array<double, 3>> twenty_triples() {
    return {{2, -2, 2},   {2, .5, -2},  {2, -.5, -2}, {2, .25, -2},    {2, -.25, -2},
            {2, -1, 2},   {2, 1, -2},   {1, .5, -2},  {1, 1, -2},      {2, -1, -2},
            {2, -.5, -1}, {1, -2, 2},   {2, -2, 1},   {.5, .5, .5},    {1, 1, 1},
            {.25, -.5, 1}, {-1, .5, .25}, {.5, -1, .5}, {1, -1, 1},     {2, 2, 2}};
}

}  // namespace

TEST(Moments, ConstantAndTooShort) {
    const std::vector<double> c(10, 3.5);
    const MomentReport r = empirical_moments(c);
    EXPECT_EQ(r.mean, 3.5);
    EXPECT_EQ(r.variance, 0.0);
    EXPECT_THROW(empirical_moments(std::vector<double>{1.0}), ParameterError);
}

TEST(Moments, GammaDraws) {
    const MomentReport r = empirical_moments(gamma_sample(1, 100000, {2.0, 1.0}));
    EXPECT_NEAR(r.mean, 2.0, 4.0 * r.se_mean);
    EXPECT_NEAR(r.variance, 2.0, 4.0 * r.se_variance);
}

TEST(Moments, MeanStandardErrorMatchesBootstrap) {
    const std::vector<double> x = gamma_sample(2, 2000, {0.7, 1.0});
    const MomentReport r = empirical_moments(x);
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    std::vector<double> means(2000);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[pick(gen)];
        m = s / static_cast<double>(x.size());
    }
    const double boot = std::sqrt(empirical_moments(means).variance);
    EXPECT_NEAR(r.se_mean, boot, 0.1 * boot);
}

TEST(Acf, IndependentSequence) {
    const SamplePath p = path_of(ProcessKind::ChangePoint, 4, 100000, {1.0, 1.0}, Dependence::from_lambda(60.0));
    const AcfReport r = empirical_acf(p, 5, Dependence::from_lambda(1.0));
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(r.estimates[k], 0.0, 4.0 * r.standard_errors[k]);
}

TEST(Acf, Ar1LagTwoAndChangePointLagOne) {
    const Dependence dep = Dependence::from_rho(0.5);
    const AcfReport ar = empirical_acf(path_of(ProcessKind::Ar1, 5, 100000, {1.0, 1.0}, dep), 5, dep);
    EXPECT_NEAR(ar.estimates[1], 0.25, 4.0 * ar.standard_errors[1]);
    EXPECT_EQ(ar.target[1], 0.25);
    const AcfReport cp = empirical_acf(path_of(ProcessKind::ChangePoint, 6, 100000, {1.0, 1.0}, dep), 5, dep);
    EXPECT_NEAR(cp.estimates[0], 0.5, 4.0 * cp.standard_errors[0]);
}

TEST(Acf, TargetsAreGeometricAndEstimatesBounded) {
    const Dependence dep = Dependence::from_lambda(0.37);
    const AcfReport r = empirical_acf(path_of(ProcessKind::Thinned, 7, 20000, {1.0, 1.0}, dep), 8, dep);
    ASSERT_EQ(r.lags.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(r.target[k], std::pow(r.target[0], static_cast<double>(k + 1)));
        EXPECT_LE(std::abs(r.estimates[k]), 1.0);
        EXPECT_GT(r.standard_errors[k], 0.0);
    }
}

TEST(Acf, RejectsShortPaths) {
    const SamplePath p = path_of(ProcessKind::Ar1, 8, 40, {1.0, 1.0}, Dependence::from_rho(0.5));
    EXPECT_THROW(empirical_acf(p, 5, Dependence::from_rho(0.5)), ParameterError);
}

TEST(Acf, EnsembleVersion) {
    const Ensemble e = simulate_ensemble(ProcessKind::RandomMeasure, make_uniform_grid(0, 1, 6), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 100000, 9);
    const AcfReport r = ensemble_acf(e, 5);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(r.estimates[k], r.target[k], 4.0 * r.standard_errors[k]);
}

TEST(Ks, SelfConsistencyOverSeeds) {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        failures += !ks_statistic(gamma_sample(100 + seed, 2000, {1.5, 2.0}), {1.5, 2.0}).passes();
    EXPECT_LE(failures, 7);  // about 2 expected
}

TEST(Ks, WrongScaleDetectedAndShortInputRejected) {
    const KsResult r = ks_statistic(gamma_sample(10, 100000, {2.0, 2.0}), {2.0, 1.0});
    EXPECT_GT(r.statistic, 20.0 * r.critical_1pct);
    EXPECT_THROW(ks_statistic(std::vector<double>(50, 1.0), {1.0, 1.0}), ParameterError);
    EXPECT_THROW(ks_statistic(std::vector<double>{}, {1.0, 1.0}), ParameterError);
}

TEST(EmpiricalChf, ZeroFrequencyAndKnownValue) {
    SampleMatrix m{1, gamma_sample(11, 100000, {1.0, 1.0})};
    const std::vector<std::vector<double>> w{{0.0}, {1.0}, {-1.0}};
    const auto e = empirical_chf(m, w);
    EXPECT_EQ(e[0].value, Complex(1.0, 0.0));
    EXPECT_EQ(e[0].se_re, 0.0);
    EXPECT_EQ(e[0].se_im, 0.0);
    EXPECT_LT(chf_z_score(e[1].value - Complex(0.5, 0.5), e[1].se_re, e[1].se_im), 4.0);
    EXPECT_EQ(e[2].value, std::conj(e[1].value));
    EXPECT_LE(e[1].se_re, 1.0 / std::sqrt(100000.0));
    EXPECT_LE(e[1].se_im, 1.0 / std::sqrt(100000.0));
    const std::vector<std::vector<double>> bad{{1.0, 2.0}};
    EXPECT_THROW(empirical_chf(m, bad), ParameterError);
}

TEST(EmpiricalChf, IntervalCoverage) {
    const GammaParams p{0.8, 1.0};
    const std::vector<std::vector<double>> w{{0.25}, {0.5}, {1.0}, {2.0}};
    int covered = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        SampleMatrix m{1, gamma_sample(1000 + seed, 1000, p)};
        const auto e = empirical_chf(m, w);
        for (std::size_t i = 0; i < w.size(); ++i, ++total)
            covered += chf_z_score(e[i].value - gamma_chf(w[i][0], p), e[i].se_re, e[i].se_im) <= 4.0;
    }
    EXPECT_GE(static_cast<double>(covered) / total, 0.99);
}

TEST(ChfZScore, ZeroStandardError) {
    EXPECT_EQ(chf_z_score({0.0, 0.0}, 0.0, 0.0), 0.0);
    EXPECT_TRUE(std::isinf(chf_z_score({1e-3, 0.0}, 0.0, 0.0)));
    EXPECT_DOUBLE_EQ(chf_z_score({0.3, -0.1}, 0.1, 0.1), 3.0);
}

TEST(ChfGof, Ar1SelfTestAndWrongFormula) {
    const Ensemble e = simulate_ensemble(ProcessKind::Ar1, make_uniform_grid(0, 1, 2), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 100000, 12);
    const auto w = twenty_pairs();
    ASSERT_EQ(w.size(), 20u);
    EXPECT_LT(chf_gof(e, w, 1).max_z(), 4.0);
    const std::array<std::array<double, 2>, 1> w1{{{1.0, -1.0}}};
    EXPECT_GT(chf_gof(e, w1, 1, ProcessKind::Thinned).max_z(), 5.0);
}

TEST(ChfGof, SquaredOuExact) {
    const Ensemble e = simulate_ensemble(ProcessKind::SquaredOU, make_uniform_grid(0, 1, 2), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 100000, 13);
    EXPECT_LT(chf_gof(e, twenty_pairs(), 1).max_z(), 4.0);
}

TEST(ChfGof, LagGreaterThanOne) {
    const Ensemble e = simulate_ensemble(ProcessKind::ChangePoint, make_uniform_grid(0, 0.5, 4), {2.0, 1.0},
                                         Dependence::from_lambda(0.6), 100000, 14);
    EXPECT_LT(chf_gof(e, twenty_pairs(), 3).max_z(), 4.0);
}

TEST(ChfGof, ContinuouslyThinnedUnsupported) {
    const Ensemble e = simulate_ensemble(ProcessKind::ContinuouslyThinned, make_uniform_grid(0, 1, 2), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 10, 15);
    EXPECT_THROW(chf_gof(e, twenty_pairs(), 1), UnsupportedKind);
}

TEST(ChfGof, NullCalibrationOverSeeds) {
    const auto w = twenty_pairs();
    int exceed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Ensemble e = simulate_ensemble(ProcessKind::Thinned, make_uniform_grid(0, 1, 2), {1.0, 1.0},
                                             Dependence::from_rho(0.5), 5000, 500 + seed);
        exceed += chf_gof(e, w, 1).max_z() > 4.0;
    }
    EXPECT_EQ(exceed, 0);
}

TEST(Triplets, NullCalibrationAndSymmetry) {
    const TimeGrid g = make_uniform_grid(0, 1, 3);
    const Ensemble a = simulate_ensemble(ProcessKind::Thinned, g, {1.0, 1.0}, Dependence::from_rho(0.5), 100000, 20);
    const Ensemble b = simulate_ensemble(ProcessKind::Thinned, g, {1.0, 1.0}, Dependence::from_rho(0.5), 100000, 21);
    const auto w = twenty_triples();
    const Discrimination ab = triplet_discrimination(a, b, w);
    const Discrimination ba = triplet_discrimination(b, a, w);
    EXPECT_LT(ab.max_z, 4.0);
    EXPECT_EQ(ab.max_z, ba.max_z);
    EXPECT_EQ(ab.argmax, ba.argmax);
}

TEST(Triplets, NullCalibrationOverSeeds) {
    const TimeGrid g = make_uniform_grid(0, 1, 3);
    const auto w = twenty_triples();
    int exceed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Ensemble a = simulate_ensemble(ProcessKind::RandomMeasure, g, {1.0, 1.0}, Dependence::from_rho(0.5), 5000,
                                             2 * seed + 1000);
        const Ensemble b = simulate_ensemble(ProcessKind::RandomMeasure, g, {1.0, 1.0}, Dependence::from_rho(0.5), 5000,
                                             2 * seed + 1001);
        exceed += triplet_discrimination(a, b, w).max_z > 4.0;
    }
    EXPECT_EQ(exceed, 0);
}

TEST(Triplets, PairsAgreeForThinnedAndRandomMeasure) {
    const TimeGrid g = make_uniform_grid(0, 1, 3);
    const Ensemble a = simulate_ensemble(ProcessKind::Thinned, g, {1.0, 1.0}, Dependence::from_rho(0.5), 100000, 22);
    const Ensemble b =
        simulate_ensemble(ProcessKind::RandomMeasure, g, {1.0, 1.0}, Dependence::from_rho(0.5), 100000, 23);
    std::vector<std::vector<double>> w;
    for (const auto& p : twenty_pairs()) w.push_back({p[0], p[1]});
    EXPECT_LT(chf_discrimination(a, b, w, 2).max_z, 4.0);
}

TEST(Triplets, MismatchedInputsRejected) {
    const Ensemble a = simulate_ensemble(ProcessKind::Thinned, make_uniform_grid(0, 1, 3), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 10, 1);
    const Ensemble b = simulate_ensemble(ProcessKind::Thinned, make_uniform_grid(0, 2, 3), {1.0, 1.0},
                                         Dependence::from_rho(0.5), 10, 1);
    const Ensemble c = simulate_ensemble(ProcessKind::Thinned, make_uniform_grid(0, 1, 3), {2.0, 1.0},
                                         Dependence::from_rho(0.5), 10, 1);
    const auto w = twenty_triples();
    EXPECT_THROW(triplet_discrimination(a, b, w), ParameterError);
    EXPECT_THROW(triplet_discrimination(a, c, w), ParameterError);
}

TEST(Reversibility, SpecExamples) {
    const Dependence dep = Dependence::from_rho(0.5);
    const ReversibilityReport ar = reversibility_check(path_of(ProcessKind::Ar1, 30, 100000, {1.0, 1.0}, dep), dep);
    EXPECT_EQ(ar.forward_violations, 0);
    EXPECT_GT(ar.backward_violation_rate, 0.0);
    EXPECT_EQ(ar.steps, 99999);
    const ReversibilityReport th =
        reversibility_check(path_of(ProcessKind::Thinned, 31, 100000, {1.0, 1.0}, dep), dep);
    EXPECT_GT(th.forward_violations, 0);
}

TEST(Generator, IdentityBothKinds) {
    const GammaParams p{2.0, 1.0};
    const Dependence dep = Dependence::from_lambda(0.8);
    const double target = -0.8 * (1.0 - 2.0);
    for (ProcessKind k : {ProcessKind::SquaredOU, ProcessKind::ContinuouslyThinned}) {
        GeneratorCheckOptions o{1e-3 / 0.8};
        o.seed = 40;
        const GeneratorCheck g = generator_check(k, TestFunction::identity(), 1.0, p, dep, o);
        EXPECT_NEAR(g.analytic, target, 1e-9);
        EXPECT_NEAR(g.fd_estimate, target, 0.05 * std::abs(target)) << to_string(k);
    }
}

TEST(Generator, SquareSeparatesTheKinds) {
    const GammaParams p{1.0, 1.0};
    const Dependence dep = Dependence::from_rho(0.5);
    GeneratorCheckOptions o{1e-3 / dep.lambda()};
    o.seed = 41;
    const GeneratorCheck ou = generator_check(ProcessKind::SquaredOU, TestFunction::square(), 2.0, p, dep, o);
    o.seed = 42;
    const GeneratorCheck ct = generator_check(ProcessKind::ContinuouslyThinned, TestFunction::square(), 2.0, p, dep, o);
    EXPECT_LT(std::abs(ou.z), 4.0);
    EXPECT_LT(std::abs(ct.z), 4.0);
    EXPECT_GT(std::abs(ou.fd_estimate - ct.analytic), 4.0 * ou.se);
    EXPECT_GT(std::abs(ct.fd_estimate - ou.analytic), 4.0 * ct.se);
}

TEST(Generator, UnsupportedKind) {
    EXPECT_THROW(generator_check(ProcessKind::Ar1, TestFunction::identity(), 1.0, {1.0, 1.0}, Dependence::from_rho(0.5),
                                 GeneratorCheckOptions{1e-3}),
                 UnsupportedKind);
}

TEST(Tail, WorkedRowsAndMonotonicity) {
    const std::vector<double> u{0.1, 1.0, 5.0, 10.0, 20.0, 30.0};
    const TailReport t = tail_check({1.0, 1.0}, u);
    ASSERT_EQ(t.rows.size(), u.size());
    const TailRow& r10 = t.rows[3];
    EXPECT_NEAR(r10.survival, 4.540e-5, 5e-8);
    EXPECT_NEAR(r10.approximant, 4.540e-6, 5e-9);
    EXPECT_NEAR(r10.approx_log_ratio, 1.23, 5e-3);
    EXPECT_LT(std::abs(t.rows[5].approx_log_ratio - 1.0), std::abs(r10.approx_log_ratio - 1.0));
    EXPECT_TRUE(t.tail_monotone);
}

TEST(Tail, DefaultOmegaAxis) {
    const auto w = default_omega_axis({1.0, 2.0});
    const std::vector<double> want{-1.0, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 1.0};
    EXPECT_EQ(w, want);
}
