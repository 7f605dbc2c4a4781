#include "srde/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "srde/errors.hpp"

namespace srde {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Full: return "full";
        case ModelKind::Coupled: return "coupled";
        case ModelKind::AveragedDeviation: return "averaged_deviation";
        case ModelKind::Manifold: return "manifold";
    }
    return "unknown";
}

namespace {

struct Welford {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    double variance() const { return count > 0 ? m2 / static_cast<double>(count) : 0.0; }
    double sample_variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
};

}  // namespace

TrajectoryStats summarize_series(std::span<const double> series, double burn_in_fraction) {
    if (burn_in_fraction < 0.0 || burn_in_fraction > 1.0)
        throw std::invalid_argument("summarize: burn-in fraction must lie in [0, 1]");
    const std::size_t len = series.size();
    const std::size_t start =
        static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(len)));
    if (start >= len) throw std::invalid_argument("summarize: empty window after burn-in");

    Welford wa, wa2;
    for (std::size_t i = start; i < len; ++i) {
        wa.add(series[i]);
        wa2.add(series[i] * series[i]);
    }
    TrajectoryStats s;
    s.samples = wa.count;
    s.mean_a = wa.mean;
    s.var_a = wa.variance();
    s.mean_a2 = wa2.mean;
    s.var_a2 = wa2.variance();

    // Batch means: correlated samples make the naive standard error of the
    // time average optimistic; batches of ~sqrt(L) decorrelate it.
    const std::size_t l = wa.count;
    const std::size_t batches =
        std::max<std::size_t>(2, std::min<std::size_t>(64, static_cast<std::size_t>(std::sqrt(
                                                               static_cast<double>(l)))));
    if (l >= 2 * batches) {
        const std::size_t bsize = l / batches;
        Welford wb;
        for (std::size_t b = 0; b < batches; ++b) {
            double m = 0.0;
            for (std::size_t i = 0; i < bsize; ++i)
                m += series[start + b * bsize + i];
            wb.add(m / static_cast<double>(bsize));
        }
        const double var_bm = wb.sample_variance();
        s.se_mean_batch = std::sqrt(var_bm / static_cast<double>(batches));
        s.effective_samples =
            (s.se_mean_batch > 0.0) ? s.var_a / (s.se_mean_batch * s.se_mean_batch)
                                    : static_cast<double>(l);
    } else {
        s.se_mean_batch = std::sqrt(s.var_a / static_cast<double>(l));
        s.effective_samples = static_cast<double>(l);
    }
    return s;
}

std::pair<double, double> stationary_mean_var(std::span<const double> series,
                                              double burn_in_fraction) {
    const TrajectoryStats s = summarize_series(series, burn_in_fraction);
    return {s.mean_a, s.var_a};
}

std::pair<double, double> stationary_mean_var(const Trajectory& traj, double burn_in_fraction) {
    return stationary_mean_var(std::span<const double>(traj.amplitude), burn_in_fraction);
}

EnsembleStats combine_trajectory_stats(const std::vector<TrajectoryStats>& stats,
                                       int divergences, double burn_in) {
    EnsembleStats out;
    out.burn_in = burn_in;
    out.divergences = divergences;
    out.n = static_cast<int>(stats.size()) + divergences;
    const std::size_t k = stats.size();
    if (k == 0) throw EnsembleFailureError("ensemble: no surviving trajectories");

    Welford m_a, m_a2, v_a, v_a2;
    double eff = 0.0;
    for (const TrajectoryStats& t : stats) {
        m_a.add(t.mean_a);
        m_a2.add(t.mean_a2);
        v_a.add(t.var_a);
        v_a2.add(t.var_a2);
        eff += t.effective_samples;
    }
    out.mean_a = m_a.mean;
    out.mean_a2 = m_a2.mean;
    out.var_a = v_a.mean;
    out.var_a2 = v_a2.mean;
    out.std_a = std::sqrt(std::max(0.0, v_a.mean));
    out.effective_samples = eff;
    if (k > 1) {
        const double dk = static_cast<double>(k);
        out.stderr_mean_a = std::sqrt(m_a.sample_variance() / dk);
        out.stderr_mean_a2 = std::sqrt(m_a2.sample_variance() / dk);
        const double se_var = std::sqrt(v_a.sample_variance() / dk);
        out.stderr_std_a = out.std_a > 0.0 ? se_var / (2.0 * out.std_a) : se_var;
    } else {
        const TrajectoryStats& t = stats.front();
        out.stderr_mean_a = t.se_mean_batch;
        out.stderr_mean_a2 = t.se_mean_batch;  // same correlation structure
        const double neff = std::max(1.0, t.effective_samples);
        const double se_var = t.var_a * std::sqrt(2.0 / neff);
        out.stderr_std_a = out.std_a > 0.0 ? se_var / (2.0 * out.std_a) : se_var;
    }
    return out;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SRDE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int total, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), total);
    if (threads <= 1) {
        for (int i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= total) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

AveragedDeviationModel::AveragedDeviationModel(const ModelParams& params,
                                               const SimConfig& config) {
    params.validate();
    config.validate();
    epsilon_ = params.epsilon;
    slow_modes_ = params.cutoff.n;
    dt_slow_ = params.epsilon * config.dt;
    steps_ = std::llround(config.t_final / config.dt);
    record_stride_ = config.record_stride;

    SpectralField u0(params.basis.total_modes);
    u0.coeff(1) = config.resolved_init_amplitude(params) / std::sqrt(params.epsilon);
    const std::vector<AveragedState> averaged = integrate_averaged(
        u0, params, static_cast<double>(steps_) * dt_slow_, dt_slow_, 1);

    const std::size_t nn = static_cast<std::size_t>(slow_modes_) * slow_modes_;
    drift_flat_.resize(nn * static_cast<std::size_t>(steps_ > 0 ? steps_ : 0));
    noise_flat_.resize(drift_flat_.size());
    DeviationCoeffsBuilder builder(params);
    for (long long k = 0; k < steps_; ++k) {
        const DeviationCoeffs c = builder.evaluate(averaged[static_cast<std::size_t>(k)].slow);
        std::copy(c.drift.data(), c.drift.data() + nn,
                  drift_flat_.begin() + static_cast<std::ptrdiff_t>(nn * static_cast<std::size_t>(k)));
        std::copy(c.noise.data(), c.noise.data() + nn,
                  noise_flat_.begin() + static_cast<std::ptrdiff_t>(nn * static_cast<std::size_t>(k)));
    }
    recorded_.reserve(static_cast<std::size_t>(steps_ / record_stride_ + 2));
    for (long long k = 0; k <= steps_; ++k) {
        if (k == 0 || k % record_stride_ == 0 || k == steps_)
            recorded_.push_back(averaged[static_cast<std::size_t>(k)]);
    }
}

std::vector<DeviationState> AveragedDeviationModel::sample_deviation(std::uint64_t seed,
                                                                     std::uint64_t stream) const {
    SeededRng rng(seed, stream);
    DeviationState state = make_deviation_state(slow_modes_);
    std::vector<DeviationState> recorded;
    recorded.reserve(recorded_.size());
    recorded.push_back(state);
    const std::size_t nn = static_cast<std::size_t>(slow_modes_) * slow_modes_;
    for (long long k = 1; k <= steps_; ++k) {
        const std::size_t at = nn * static_cast<std::size_t>(k - 1);
        deviation_step_raw(&drift_flat_[at], &noise_flat_[at], slow_modes_, state, dt_slow_, rng);
        if (k % record_stride_ == 0 || k == steps_) recorded.push_back(state);
    }
    return recorded;
}

Trajectory AveragedDeviationModel::sample_path(std::uint64_t seed, std::uint64_t stream) const {
    return reconstruct(recorded_, sample_deviation(seed, stream), epsilon_);
}

Trajectory manifold_path(const ModelParams& params, const SimConfig& config, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t init_stream) {
    params.validate();
    config.validate();
    const ManifoldCoeffs coeffs = manifold_coeffs(params);
    ManifoldState state;
    state.a = config.resolved_init_amplitude(params);
    {
        SeededRng init_rng(seed, init_stream);
        manifold_init_history(state, params, init_rng);
    }
    SeededRng rng(seed, stream);
    Trajectory traj;
    traj.backend = Backend::Spectral;
    const long long n = std::llround(config.t_final / config.dt);
    auto record = [&](long long k) {
        traj.times.push_back(static_cast<double>(k) * config.dt);
        traj.amplitude.push_back(state.a);
    };
    record(0);
    for (long long k = 1; k <= n; ++k) {
        manifold_step_with(coeffs, state, config.dt, rng);
        if (k % config.record_stride == 0 || k == n) record(k);
    }
    return traj;
}

namespace {

Trajectory model_trajectory(ModelKind kind, const ModelParams& params, const SimConfig& config,
                            const AveragedDeviationModel* shared, std::uint64_t seed,
                            std::uint64_t stream_base) {
    switch (kind) {
        case ModelKind::Full: {
            SimConfig c = config;
            c.seed = seed;
            c.stream = stream_base;
            return simulate_full(params, c);
        }
        case ModelKind::Coupled: {
            SimConfig c = config;
            c.seed = seed;
            c.stream = stream_base;
            return simulate_coupled(params, c);
        }
        case ModelKind::AveragedDeviation:
            return shared->sample_path(seed, stream_base + 1);
        case ModelKind::Manifold:
            return manifold_path(params, config, seed, stream_base + 2, stream_base + 3);
    }
    throw std::invalid_argument("unknown model kind");
}

}  // namespace

EnsembleStats run_ensemble(ModelKind kind, const ModelParams& params, const SimConfig& config,
                           const EnsembleConfig& ensemble) {
    if (ensemble.size < 1) throw std::invalid_argument("ensemble: size must be >= 1");
    params.validate();
    config.validate();

    std::unique_ptr<AveragedDeviationModel> shared;
    if (kind == ModelKind::AveragedDeviation)
        shared = std::make_unique<AveragedDeviationModel>(params, config);

    struct Slot {
        TrajectoryStats stats;
        bool diverged = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(ensemble.size));
    parallel_for(ensemble.size, ensemble.threads, [&](int i) {
        const std::uint64_t stream_base =
            ensemble.stream_offset + 4ULL * static_cast<std::uint64_t>(i);
        try {
            const Trajectory traj = model_trajectory(kind, params, config, shared.get(),
                                                     ensemble.base_seed, stream_base);
            slots[static_cast<std::size_t>(i)].stats =
                summarize_series(traj.amplitude, ensemble.burn_in);
        } catch (const DivergenceError&) {
            slots[static_cast<std::size_t>(i)].diverged = true;
        }
    });

    std::vector<TrajectoryStats> kept;
    kept.reserve(slots.size());
    int divergences = 0;
    for (const Slot& s : slots) {
        if (s.diverged) {
            ++divergences;
        } else {
            kept.push_back(s.stats);
        }
    }
    if (divergences > 0 &&
        static_cast<double>(divergences) > 0.01 * static_cast<double>(ensemble.size))
        throw EnsembleFailureError("ensemble: " + std::to_string(divergences) + " of " +
                                   std::to_string(ensemble.size) + " trajectories diverged");
    return combine_trajectory_stats(kept, divergences, ensemble.burn_in);
}

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (xs.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
    double x_min = xs[0], x_max = xs[0];
    double sx = 0.0, sy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        x_min = std::min(x_min, xs[i]);
        x_max = std::max(x_max, xs[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.x_min = x_min;
    fit.x_max = x_max;
    return fit;
}

PlaneFit planar_fit(std::span<const double> xs, std::span<const double> ys,
                    std::span<const double> zs) {
    if (xs.size() != ys.size() || xs.size() != zs.size())
        throw std::invalid_argument("planar_fit: size mismatch");
    if (xs.size() < 3) throw std::invalid_argument("planar_fit: need at least three points");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        a(static_cast<Eigen::Index>(i), 0) = 1.0;
        a(static_cast<Eigen::Index>(i), 1) = xs[i];
        a(static_cast<Eigen::Index>(i), 2) = ys[i];
        b(static_cast<Eigen::Index>(i)) = zs[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 3) throw std::invalid_argument("planar_fit: degenerate covariates");
    const Eigen::VectorXd c = qr.solve(b);
    PlaneFit fit;
    fit.intercept = c(0);
    fit.coef_x = c(1);
    fit.coef_y = c(2);
    fit.residual_rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(xs.size()));
    return fit;
}

std::vector<SweepPoint> sweep(SweepAxis axis, std::span<const double> grid,
                              const ModelParams& params, const SimConfig& config,
                              const EnsembleConfig& ensemble, ModelKind kind) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<SweepPoint> out;
    out.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double covariate = grid[j];
        SweepPoint point;
        point.covariate = covariate;
        ModelParams p = params;
        if (axis == SweepAxis::Gamma) {
            p.gamma = covariate / p.epsilon;
        } else {
            if (covariate < 0.0) throw std::invalid_argument("sweep: eps*sigma^2 must be >= 0");
            p.sigma = std::sqrt(covariate / p.epsilon);
        }
        EnsembleConfig e = ensemble;
        e.stream_offset =
            ensemble.stream_offset + static_cast<std::uint64_t>(j) *
                                         (4ULL * static_cast<std::uint64_t>(ensemble.size) + 16ULL);
        try {
            point.stats = run_ensemble(kind, p, config, e);
        } catch (const EnsembleFailureError& err) {
            point.failed = true;
            point.error = err.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

namespace {
double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}
}  // namespace

ModelComparison compare_models(const EnsembleStats& a, const EnsembleStats& b) {
    ModelComparison c;
    c.rel_mean_error = rel_err(a.mean_a, b.mean_a);
    c.rel_std_error = rel_err(a.std_a, b.std_a);
    c.mean_ci_overlap =
        std::abs(a.mean_a - b.mean_a) <= 1.96 * (a.stderr_mean_a + b.stderr_mean_a);
    c.std_ci_overlap = std::abs(a.std_a - b.std_a) <= 1.96 * (a.stderr_std_a + b.stderr_std_a);
    return c;
}

double convergence_order(std::span<const double> epsilons, std::span<const double> errors) {
    if (epsilons.size() != errors.size())
        throw std::invalid_argument("convergence_order: size mismatch");
    if (epsilons.size() < 3)
        throw std::invalid_argument("convergence_order: need at least three points");
    std::vector<double> lx, ly;
    lx.reserve(epsilons.size());
    ly.reserve(errors.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !(errors[i] > 0.0))
            throw std::invalid_argument("convergence_order: values must be positive");
        lx.push_back(std::log(epsilons[i]));
        ly.push_back(std::log(errors[i]));
    }
    return linear_fit(lx, ly).slope;
}

}  // namespace srde
