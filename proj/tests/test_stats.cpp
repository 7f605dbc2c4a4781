#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "srde/errors.hpp"
#include "srde/stats.hpp"

using namespace srde;

namespace {

ModelParams example_params(double eps = 0.1, double gamma = 1.0, double sigma = 1.0) {
    ModelParams p;
    p.epsilon = eps;
    p.gamma = gamma;
    p.sigma = sigma;
    p.basis = Basis{8, 1.0};
    p.cutoff.n = 1;
    p.spectrum = NoiseSpectrum::single_mode(8, 2, 1.0);
    return p;
}

bool stats_equal(const EnsembleStats& a, const EnsembleStats& b) {
    return a.n == b.n && a.divergences == b.divergences && a.mean_a == b.mean_a &&
           a.stderr_mean_a == b.stderr_mean_a && a.mean_a2 == b.mean_a2 &&
           a.stderr_mean_a2 == b.stderr_mean_a2 && a.var_a == b.var_a && a.var_a2 == b.var_a2 &&
           a.std_a == b.std_a && a.stderr_std_a == b.stderr_std_a &&
           a.effective_samples == b.effective_samples;
}

}  // namespace

TEST_CASE("stationary mean and variance") {
    SUBCASE("constant signal") {
        const std::vector<double> xs(100, 3.25);
        const auto [mean, var] = stationary_mean_var(std::span<const double>(xs), 0.5);
        CHECK(mean == 3.25);
        CHECK(var == 0.0);
    }
    SUBCASE("linear ramp with burn-in keeping only the last sample") {
        std::vector<double> xs(50);
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
        const auto [mean, var] =
            stationary_mean_var(std::span<const double>(xs), 49.0 / 50.0);
        CHECK(mean == 49.0);
        CHECK(var == 0.0);
    }
    SUBCASE("empty window is rejected") {
        const std::vector<double> xs(10, 1.0);
        CHECK_THROWS_AS(stationary_mean_var(std::span<const double>(xs), 1.0),
                        std::invalid_argument);
        const std::vector<double> empty;
        CHECK_THROWS_AS(stationary_mean_var(std::span<const double>(empty), 0.0),
                        std::invalid_argument);
    }
    SUBCASE("exact OU samples match the analytic variance") {
        SeededRng rng(71, 0);
        const double v = 0.8;
        std::vector<double> xs(200000);
        for (double& x : xs) x = std::sqrt(v) * rng.normal();
        const auto [mean, var] = stationary_mean_var(std::span<const double>(xs), 0.1);
        CHECK(std::abs(mean) <= 3.0 * std::sqrt(v / 180000.0));
        CHECK(var == doctest::Approx(v).epsilon(0.02));
    }
}

TEST_CASE("linear fit") {
    SUBCASE("exact line") {
        const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
        std::vector<double> ys;
        for (double x : xs) ys.push_back(2.5 * x - 0.75);
        const FitResult fit = linear_fit(xs, ys);
        CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(fit.intercept == doctest::Approx(-0.75).epsilon(1e-13));
        CHECK(fit.residual_rms <= 1e-13);
        CHECK(fit.x_min == 0.0);
        CHECK(fit.x_max == 3.0);
    }
    SUBCASE("invariant under reordering") {
        const std::vector<double> xs = {3.0, 0.5, 2.0, 1.0};
        const std::vector<double> ys = {1.2, 0.3, 0.9, 0.55};
        const FitResult a = linear_fit(xs, ys);
        const std::vector<double> xs2 = {0.5, 1.0, 2.0, 3.0};
        const std::vector<double> ys2 = {0.3, 0.55, 0.9, 1.2};
        const FitResult b = linear_fit(xs2, ys2);
        CHECK(a.slope == doctest::Approx(b.slope).epsilon(1e-12));
        CHECK(a.intercept == doctest::Approx(b.intercept).epsilon(1e-12));
    }
    SUBCASE("degenerate abscissae are rejected") {
        const std::vector<double> xs = {1.0, 1.0, 1.0};
        const std::vector<double> ys = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(linear_fit(xs, ys), std::invalid_argument);
        const std::vector<double> one = {1.0};
        CHECK_THROWS_AS(linear_fit(one, one), std::invalid_argument);
    }
}

TEST_CASE("planar fit recovers an exact plane") {
    std::vector<double> xs, ys, zs;
    for (double x : {0.2, 0.4, 0.8}) {
        for (double y : {0.1, 0.3, 0.5}) {
            xs.push_back(x);
            ys.push_back(y);
            zs.push_back(1.5 + 1.32 * x - 0.34 * y);
        }
    }
    const PlaneFit fit = planar_fit(xs, ys, zs);
    CHECK(fit.intercept == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.coef_x == doctest::Approx(1.32).epsilon(1e-12));
    CHECK(fit.coef_y == doctest::Approx(-0.34).epsilon(1e-12));
}

TEST_CASE("convergence order") {
    const std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<double> linear = eps;
    CHECK(convergence_order(eps, linear) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> quadratic;
    for (double e : eps) quadratic.push_back(e * e);
    CHECK(convergence_order(eps, quadratic) == doctest::Approx(2.0).epsilon(1e-12));
    const std::vector<double> bad = {0.1, -0.05, 0.025};
    CHECK_THROWS_AS(convergence_order(eps, bad), std::invalid_argument);
    const std::vector<double> two = {0.1, 0.05};
    CHECK_THROWS_AS(convergence_order(two, two), std::invalid_argument);
}

TEST_CASE("ensemble of one reduces to a single simulation") {
    const ModelParams p = example_params();
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 5.0;
    cfg.record_stride = 5;
    EnsembleConfig ens;
    ens.size = 1;
    ens.base_seed = 99;
    const EnsembleStats stats = run_ensemble(ModelKind::Full, p, cfg, ens);
    SimConfig single = cfg;
    single.seed = 99;
    single.stream = 0;
    const Trajectory traj = simulate_full(p, single);
    const TrajectoryStats ts = summarize_series(traj.amplitude, ens.burn_in);
    CHECK(stats.n == 1);
    CHECK(stats.mean_a == ts.mean_a);
    CHECK(stats.std_a == std::sqrt(ts.var_a));
}

TEST_CASE("sigma = 0 ensembles have zero fluctuation") {
    const ModelParams p = example_params(0.1, 1.0, 0.0);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 60.0;
    cfg.record_stride = 10;
    EnsembleConfig ens;
    ens.size = 4;
    const EnsembleStats stats = run_ensemble(ModelKind::Full, p, cfg, ens);
    // trajectories are identical, so the across-ensemble spread is exactly 0;
    // the time fluctuation is only the deterministic relaxation tail
    CHECK(stats.stderr_mean_a == 0.0);
    CHECK(stats.std_a <= 1e-4);
}

TEST_CASE("standard error shrinks like the square root of the ensemble size") {
    const ModelParams p = example_params();
    SimConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 60.0;
    cfg.record_stride = 10;
    EnsembleConfig small;
    small.size = 48;
    small.base_seed = 7;
    EnsembleConfig large = small;
    large.size = 192;
    const EnsembleStats s = run_ensemble(ModelKind::Manifold, p, cfg, small);
    const EnsembleStats l = run_ensemble(ModelKind::Manifold, p, cfg, large);
    const double ratio = s.stderr_mean_a / l.stderr_mean_a;
    CHECK(ratio > 1.3);
    CHECK(ratio < 3.1);
}

TEST_CASE("standard errors scale as n^{-1/2} on synthetic iid input") {
    SeededRng rng(81, 0);
    std::vector<double> ns, ses;
    for (int n : {100, 1000, 10000}) {
        std::vector<TrajectoryStats> stats(static_cast<std::size_t>(n));
        for (auto& t : stats) {
            t.mean_a = rng.normal();
            t.var_a = 1.0;
            t.mean_a2 = t.mean_a * t.mean_a;
            t.var_a2 = 1.0;
            t.samples = 1;
            t.effective_samples = 1.0;
        }
        const EnsembleStats combined = combine_trajectory_stats(stats, 0, 0.0);
        ns.push_back(static_cast<double>(n));
        ses.push_back(combined.stderr_mean_a);
    }
    const double slope = convergence_order(ns, ses);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("ensembles are deterministic across thread counts") {
    const ModelParams p = example_params();
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 8.0;
    cfg.record_stride = 10;
    EnsembleConfig ens;
    ens.size = 12;
    ens.base_seed = 321;
    ens.threads = 1;
    const EnsembleStats a = run_ensemble(ModelKind::Full, p, cfg, ens);
    ens.threads = 3;
    const EnsembleStats b = run_ensemble(ModelKind::Full, p, cfg, ens);
    CHECK(stats_equal(a, b));

    const EnsembleStats c = run_ensemble(ModelKind::AveragedDeviation, p, cfg, ens);
    ens.threads = 1;
    const EnsembleStats d = run_ensemble(ModelKind::AveragedDeviation, p, cfg, ens);
    CHECK(stats_equal(c, d));
}

TEST_CASE("an all-divergent ensemble fails loudly") {
    const ModelParams p = example_params(1.0, 1.0, 0.0);
    SimConfig cfg;
    cfg.dt = 0.5;
    cfg.t_final = 20.0;
    cfg.init_amplitude = 50.0;  // explicit cubic blows up immediately
    EnsembleConfig ens;
    ens.size = 4;
    CHECK_THROWS_AS(run_ensemble(ModelKind::Full, p, cfg, ens), EnsembleFailureError);
}

TEST_CASE("sweep") {
    const ModelParams p = example_params(1.0, 1.0, 1.0);
    SimConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_final = 40.0;
    cfg.record_stride = 10;
    EnsembleConfig ens;
    ens.size = 8;
    ens.base_seed = 55;

    SUBCASE("single-point grid reduces to run_ensemble") {
        const std::vector<double> grid = {0.6};
        const auto points = sweep(SweepAxis::Gamma, grid, p, cfg, ens);
        REQUIRE(points.size() == 1);
        ModelParams q = p;
        q.gamma = 0.6;
        const EnsembleStats direct = run_ensemble(ModelKind::Full, q, cfg, ens);
        CHECK(!points[0].failed);
        CHECK(stats_equal(points[0].stats, direct));
    }
    SUBCASE("sigma axis adjusts the noise strength") {
        const std::vector<double> grid = {0.25};
        const auto points = sweep(SweepAxis::Sigma, grid, p, cfg, ens);
        REQUIRE(points.size() == 1);
        CHECK(points[0].covariate == 0.25);
        ModelParams q = p;
        q.sigma = 0.5;  // sqrt(0.25 / 1.0)
        const EnsembleStats direct = run_ensemble(ModelKind::Full, q, cfg, ens);
        CHECK(stats_equal(points[0].stats, direct));
    }
    SUBCASE("deterministic pitchfork column at sigma = 0") {
        ModelParams q = p;
        q.sigma = 0.0;
        SimConfig c2 = cfg;
        c2.t_final = 60.0;
        EnsembleConfig e2 = ens;
        e2.size = 2;
        const std::vector<double> grid = {0.2, 0.4};
        const auto points = sweep(SweepAxis::Gamma, grid, q, c2, e2);
        for (const auto& pt : points) {
            REQUIRE(!pt.failed);
            CHECK(pt.stats.mean_a2 ==
                  doctest::Approx(4.0 / 3.0 * pt.covariate).epsilon(0.03));
        }
    }
    SUBCASE("per-point failures do not abort the sweep") {
        SimConfig c2 = cfg;
        c2.dt = 0.2;
        c2.t_final = 200.0;
        // enormous noise drives the explicit cubic unstable at the second point
        const std::vector<double> grid = {0.25, 1.0e6};
        const auto points = sweep(SweepAxis::Sigma, grid, p, c2, ens);
        REQUIRE(points.size() == 2);
        CHECK(!points[0].failed);
        CHECK(points[1].failed);
        CHECK(!points[1].error.empty());
    }
}

TEST_CASE("model comparison") {
    EnsembleStats a;
    a.mean_a = 1.0;
    a.stderr_mean_a = 0.01;
    a.std_a = 0.1;
    a.stderr_std_a = 0.005;
    SUBCASE("identical statistics compare as equal") {
        const ModelComparison c = compare_models(a, a);
        CHECK(c.rel_mean_error == 0.0);
        CHECK(c.rel_std_error == 0.0);
        CHECK(c.mean_ci_overlap);
        CHECK(c.std_ci_overlap);
    }
    SUBCASE("disjoint intervals are flagged") {
        EnsembleStats b = a;
        b.mean_a = 1.2;
        b.std_a = 0.2;
        const ModelComparison c = compare_models(a, b);
        CHECK(!c.mean_ci_overlap);
        CHECK(!c.std_ci_overlap);
        CHECK(c.rel_mean_error == doctest::Approx(0.2 / 1.2));
    }
}
