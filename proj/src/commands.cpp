#include "srde/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "srde/errors.hpp"
#include "srde/verify.hpp"

namespace srde {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

fs::path prepare_out_dir(const Scenario& s) {
    fs::path dir(s.out_dir);
    fs::create_directories(dir);
    write_resolved_scenario(s, (dir / "scenario_resolved.json").string());
    return dir;
}

EnsembleConfig ensemble_config(const Scenario& s) {
    EnsembleConfig e;
    e.size = s.ensemble.size;
    e.burn_in = s.ensemble.burn_in;
    e.base_seed = s.ensemble.base_seed;
    e.threads = s.ensemble.threads;
    return e;
}

void monitored(const Scenario& s, const EnsembleStats& stats, double& mean, double& var,
               double& se) {
    if (s.ensemble.monitor == Monitor::AmplitudeSquared) {
        mean = stats.mean_a2;
        var = stats.var_a2;
        se = stats.stderr_mean_a2;
    } else {
        mean = stats.mean_a;
        var = stats.var_a;
        se = stats.stderr_mean_a;
    }
}

Trajectory single_trajectory(const Scenario& s) {
    SimConfig cfg = s.sim;
    cfg.seed = s.ensemble.base_seed;
    cfg.stream = 0;
    switch (s.model) {
        case ModelKind::Full: return simulate_full(s.params, cfg);
        case ModelKind::Coupled: return simulate_coupled(s.params, cfg);
        case ModelKind::AveragedDeviation:
            return AveragedDeviationModel(s.params, cfg).sample_path(cfg.seed, 1);
        case ModelKind::Manifold: return manifold_path(s.params, cfg, cfg.seed, 2, 3);
    }
    throw std::invalid_argument("unknown model");
}

void write_sweep_csv(const Scenario& s, const std::vector<SweepPoint>& points,
                     const fs::path& path) {
    std::ofstream out = open_csv(path);
    out << "covariate,mean,var,stderr,n,divergences\n";
    for (const SweepPoint& p : points) {
        if (p.failed) {
            out << num(p.covariate) << ",nan,nan,nan,0,-1\n";
            continue;
        }
        double mean = 0.0, var = 0.0, se = 0.0;
        monitored(s, p.stats, mean, var, se);
        out << num(p.covariate) << ',' << num(mean) << ',' << num(var) << ',' << num(se) << ','
            << p.stats.n << ',' << p.stats.divergences << '\n';
    }
}

void write_gnuplot_script(const Scenario& s, const fs::path& dir) {
    std::ofstream out(dir / "plot.gp");
    if (!out) return;
    const bool squared = s.ensemble.monitor == Monitor::AmplitudeSquared;
    out << "set datafile separator ','\n"
        << "set key off\n"
        << "set xlabel '" << (s.sweep.axis == SweepAxis::Gamma ? "eps*gamma" : "eps*sigma^2")
        << "'\n"
        << "set ylabel '" << (squared ? "mean amplitude squared" : "amplitude std dev") << "'\n"
        << "plot 'sweep.csv' skip 1 using 1:" << (squared ? "2" : "(sqrt($3))")
        << " with points pt 7\n";
}

}  // namespace

int cmd_simulate(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);
    try {
        const Trajectory traj = single_trajectory(s);
        write_trajectory_csv(traj, (dir / "trajectory.csv").string());
        if (!traj.snapshots.empty())
            write_snapshots_csv(traj, (dir / "snapshots.csv").string());
        log << "simulate: " << to_string(s.model) << ", " << traj.size() << " samples -> "
            << (dir / "trajectory.csv").string() << "\n";
    } catch (const DivergenceError& e) {
        log << "simulate: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_reduce(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);
    SimConfig cfg = s.sim;
    cfg.seed = s.ensemble.base_seed;
    try {
        const AveragedDeviationModel model(s.params, cfg);
        const std::vector<AveragedState>& averaged = model.averaged();
        const std::vector<DeviationState> deviation = model.sample_deviation(cfg.seed, 1);
        const Trajectory recon = reconstruct(averaged, deviation, s.params.epsilon);
        const Trajectory manifold = manifold_path(s.params, cfg, cfg.seed, 2, 3);

        const int n = s.params.cutoff.n;
        {
            std::ofstream out = open_csv(dir / "averaged.csv");
            out << "t_slow";
            for (int i = 1; i <= n; ++i) out << ",A" << i;
            out << '\n';
            for (const AveragedState& st : averaged) {
                out << num(st.clock);
                for (int i = 0; i < n; ++i) out << ',' << num(st.slow(i));
                out << '\n';
            }
        }
        {
            std::ofstream out = open_csv(dir / "deviation.csv");
            out << "t_slow";
            for (int i = 1; i <= n; ++i) out << ",rho" << i;
            out << '\n';
            for (const DeviationState& st : deviation) {
                out << num(st.clock);
                for (int i = 0; i < n; ++i) out << ',' << num(st.rho(i));
                out << '\n';
            }
        }
        write_trajectory_csv(recon, (dir / "reconstructed.csv").string());
        write_trajectory_csv(manifold, (dir / "manifold.csv").string());
        log << "reduce: averaged/deviation/reconstructed/manifold written to " << dir.string()
            << "\n";
    } catch (const DivergenceError& e) {
        log << "reduce: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);
    const std::vector<SweepPoint> points =
        sweep(s.sweep.axis, s.sweep.grid, s.params, s.sim, ensemble_config(s), s.model);
    write_sweep_csv(s, points, dir / "sweep.csv");
    write_gnuplot_script(s, dir);

    // Straight-line fit of the monitored statistic against the covariate.
    std::vector<double> xs, ys;
    bool any_failed = false;
    for (const SweepPoint& p : points) {
        if (p.failed) {
            any_failed = true;
            log << "sweep: point " << p.covariate << " failed: " << p.error << "\n";
            continue;
        }
        double mean = 0.0, var = 0.0, se = 0.0;
        monitored(s, p.stats, mean, var, se);
        xs.push_back(p.covariate);
        ys.push_back(s.ensemble.monitor == Monitor::AmplitudeSquared ? mean : std::sqrt(var));
    }
    if (xs.size() >= 2) {
        const FitResult fit = linear_fit(xs, ys);
        std::ofstream out = open_csv(dir / "fit.csv");
        out << "slope,intercept,residual_rms,x_min,x_max\n";
        out << num(fit.slope) << ',' << num(fit.intercept) << ',' << num(fit.residual_rms) << ','
            << num(fit.x_min) << ',' << num(fit.x_max) << '\n';
        log << "sweep: fit slope=" << fit.slope << " intercept=" << fit.intercept << "\n";
    }
    log << "sweep: " << points.size() << " points -> " << (dir / "sweep.csv").string() << "\n";
    return any_failed ? 3 : 0;
}

int cmd_compare(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);
    const ModelKind kinds[3] = {ModelKind::Full, ModelKind::AveragedDeviation,
                                ModelKind::Manifold};
    std::ofstream stats_csv = open_csv(dir / "compare.csv");
    stats_csv << "epsilon,model,mean_a,stderr_mean_a,std_a,stderr_std_a,mean_a2,stderr_mean_a2,"
                 "n,divergences\n";
    std::ofstream pairs_csv = open_csv(dir / "compare_pairs.csv");
    pairs_csv << "epsilon,model_a,model_b,rel_mean_error,rel_std_error,mean_ci_overlap,"
                 "std_ci_overlap\n";
    int status = 0;
    for (double eps : s.compare.epsilons) {
        ModelParams p = s.params;
        p.epsilon = eps;
        EnsembleStats results[3];
        bool eps_failed = false;
        for (int k = 0; k < 3; ++k) {
            try {
                results[k] = run_ensemble(kinds[k], p, s.sim, ensemble_config(s));
            } catch (const EnsembleFailureError& e) {
                log << "compare: eps=" << eps << " " << to_string(kinds[k])
                    << " failed: " << e.what() << "\n";
                status = 3;
                eps_failed = true;
                continue;
            }
            const EnsembleStats& r = results[k];
            stats_csv << num(eps) << ',' << to_string(kinds[k]) << ',' << num(r.mean_a) << ','
                      << num(r.stderr_mean_a) << ',' << num(r.std_a) << ',' << num(r.stderr_std_a)
                      << ',' << num(r.mean_a2) << ',' << num(r.stderr_mean_a2) << ',' << r.n << ','
                      << r.divergences << '\n';
        }
        if (eps_failed) continue;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const ModelComparison c = compare_models(results[a], results[b]);
                pairs_csv << num(eps) << ',' << to_string(kinds[a]) << ',' << to_string(kinds[b])
                          << ',' << num(c.rel_mean_error) << ',' << num(c.rel_std_error) << ','
                          << (c.mean_ci_overlap ? 1 : 0) << ',' << (c.std_ci_overlap ? 1 : 0)
                          << '\n';
            }
    }
    log << "compare: results -> " << (dir / "compare.csv").string() << "\n";
    return status;
}

int cmd_verify(const Scenario& s, std::ostream& log) {
    prepare_out_dir(s);
    return run_verification(log) ? 0 : 1;
}

}  // namespace srde
