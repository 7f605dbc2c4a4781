#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srde/fullsim.hpp"
#include "srde/reduced.hpp"

namespace srde {

enum class ModelKind { Full, Coupled, AveragedDeviation, Manifold };
enum class Monitor { Amplitude, AmplitudeSquared };

std::string to_string(ModelKind kind);

/// Post-burn-in time statistics of one trajectory.
struct TrajectoryStats {
    double mean_a = 0.0;
    double var_a = 0.0;
    double mean_a2 = 0.0;
    double var_a2 = 0.0;
    std::size_t samples = 0;
    double se_mean_batch = 0.0;      // batch-means standard error of mean_a
    double effective_samples = 0.0;  // autocorrelation-corrected sample count
};

TrajectoryStats summarize_series(std::span<const double> series, double burn_in_fraction);

/// Time-average statistics of the retained window (mean, population variance).
std::pair<double, double> stationary_mean_var(std::span<const double> series,
                                              double burn_in_fraction);
std::pair<double, double> stationary_mean_var(const Trajectory& traj, double burn_in_fraction);

/// Monte Carlo summary over an ensemble of independent trajectories.
/// Means carry across-trajectory standard errors; the stationary fluctuation
/// std pools the per-trajectory time variances.
struct EnsembleStats {
    int n = 0;
    double burn_in = 0.5;
    double mean_a = 0.0, stderr_mean_a = 0.0;
    double mean_a2 = 0.0, stderr_mean_a2 = 0.0;
    double var_a = 0.0;   // pooled time-fluctuation variance of a
    double var_a2 = 0.0;  // pooled time-fluctuation variance of a^2
    double std_a = 0.0, stderr_std_a = 0.0;
    int divergences = 0;
    double effective_samples = 0.0;
};

EnsembleStats combine_trajectory_stats(const std::vector<TrajectoryStats>& stats,
                                       int divergences, double burn_in);

struct EnsembleConfig {
    int size = 100;
    double burn_in = 0.5;
    std::uint64_t base_seed = 1;
    std::uint64_t stream_offset = 0;
    int threads = 0;  // 0: SRDE_THREADS environment variable, then hardware
};

/// n independent trajectories on streams (base_seed, offset + 4i + slot.)
/// Deterministic for fixed (seed, size) regardless of thread count; an
/// ensemble with more than 1% divergent trajectories fails loudly.
EnsembleStats run_ensemble(ModelKind kind, const ModelParams& params, const SimConfig& config,
                           const EnsembleConfig& ensemble);

/// Ordinary least squares line fit.
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
};

FitResult linear_fit(std::span<const double> xs, std::span<const double> ys);

/// Two-covariate least squares z = intercept + coef_x x + coef_y y.
struct PlaneFit {
    double coef_x = 0.0;
    double coef_y = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

PlaneFit planar_fit(std::span<const double> xs, std::span<const double> ys,
                    std::span<const double> zs);

enum class SweepAxis { Gamma, Sigma };

/// One sweep point: the covariate is eps*gamma (gamma axis) or eps*sigma^2
/// (sigma axis); the underlying parameter is adjusted at fixed eps.
struct SweepPoint {
    double covariate = 0.0;
    EnsembleStats stats;
    bool failed = false;
    std::string error;
};

std::vector<SweepPoint> sweep(SweepAxis axis, std::span<const double> grid,
                              const ModelParams& params, const SimConfig& config,
                              const EnsembleConfig& ensemble, ModelKind kind = ModelKind::Full);

/// Relative differences and 95% confidence-interval overlap of two ensembles.
struct ModelComparison {
    double rel_mean_error = 0.0;
    double rel_std_error = 0.0;
    bool mean_ci_overlap = false;
    bool std_ci_overlap = false;
};

ModelComparison compare_models(const EnsembleStats& a, const EnsembleStats& b);

/// Log-log least-squares slope of errors against epsilons.
double convergence_order(std::span<const double> epsilons, std::span<const double> errors);

/// Deterministic-output parallel loop: fn(i) for i in [0, total).
void parallel_for(int total, int threads, const std::function<void(int)>& fn);

int resolve_threads(int requested);

/// Reduced model with the deterministic averaged trajectory and the deviation
/// coefficients along it precomputed once and shared across an ensemble.
class AveragedDeviationModel {
public:
    AveragedDeviationModel(const ModelParams& params, const SimConfig& config);

    Trajectory sample_path(std::uint64_t seed, std::uint64_t stream) const;
    std::vector<DeviationState> sample_deviation(std::uint64_t seed, std::uint64_t stream) const;
    const std::vector<AveragedState>& averaged() const { return recorded_; }

private:
    double epsilon_;
    int slow_modes_;
    double dt_slow_;
    long long steps_;
    int record_stride_;
    std::vector<double> drift_flat_;  // steps x n x n, column-major per step
    std::vector<double> noise_flat_;
    std::vector<AveragedState> recorded_;
};

/// One manifold-model path with coefficients computed once.
Trajectory manifold_path(const ModelParams& params, const SimConfig& config, std::uint64_t seed,
                         std::uint64_t stream, std::uint64_t init_stream);

}  // namespace srde
