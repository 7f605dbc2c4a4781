#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "srde/params.hpp"
#include "srde/rng.hpp"

namespace srde {

enum class Backend { Spectral, FiniteDifference };

struct SimConfig {
    double dt = 1e-3;       // fast-time step
    double t_final = 100.0; // fast-time horizon
    Backend backend = Backend::Spectral;
    int grid_points = 15;   // interior points, finite-difference backend
    int record_stride = 10;
    int snapshot_stride = 0;  // 0 disables snapshots
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    bool linear_only = false;  // drop the cubic term (linear test problems)
    // Mode-1 amplitude at t = 0; NaN selects the deterministic equilibrium.
    double init_amplitude = std::numeric_limits<double>::quiet_NaN();

    void validate() const;
    double resolved_init_amplitude(const ModelParams& p) const;
};

/// Time grid plus the slow amplitude a(t) = <w, e_1>, with optional field
/// snapshots (mode coefficients or grid values, per the backend).
struct Trajectory {
    std::vector<double> times;
    std::vector<double> amplitude;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots;
    Backend backend = Backend::Spectral;

    std::size_t size() const { return times.size(); }
};

double slow_amplitude(const SpectralField& w);

/// Semi-implicit Euler-Maruyama stepper for the full equation in spectral
/// form: linear part implicit per mode, cubic explicit, additive noise.
class FullStepper {
public:
    FullStepper(const ModelParams& params, double dt, bool linear_only = false);

    void step(SpectralField& state, SeededRng& rng);
    double time() const { return time_; }

private:
    ModelParams params_;
    double dt_;
    bool linear_only_;
    double time_ = 0.0;
    std::vector<double> inv_denom_;   // 1 / (1 + dt (alpha_i - eps gamma))
    std::vector<double> noise_amp_;   // sigma sqrt(eps lambda_i dt)
    CubicEvaluator cubic_;
    SpectralField drift_;
};

/// Same scheme for the artificially separated system: slow-mode diffusion
/// scaled by eps through the high-pass operator, noise on fast modes only.
/// At eps = 1 the update coincides with FullStepper exactly.
class CoupledStepper {
public:
    CoupledStepper(const ModelParams& params, double dt, bool linear_only = false);

    void step(SpectralField& state, SeededRng& rng);
    double time() const { return time_; }

private:
    ModelParams params_;
    double dt_;
    bool linear_only_;
    double time_ = 0.0;
    std::vector<double> inv_denom_;
    std::vector<double> noise_amp_;
    CubicEvaluator cubic_;
    SpectralField drift_;
};

/// One step of the full equation; convenience wrapper over FullStepper.
SpectralField step_full(const SpectralField& state, const ModelParams& params, double dt,
                        SeededRng& rng);

Trajectory simulate_full(const ModelParams& params, const SimConfig& config);
Trajectory simulate_full(const SpectralField& w0, const ModelParams& params,
                         const SimConfig& config);

Trajectory simulate_coupled(const ModelParams& params, const SimConfig& config);
Trajectory simulate_coupled(const SpectralField& w0, const ModelParams& params,
                            const SimConfig& config);

/// Coupled simulation that also records the trajectory of one fast-mode
/// coefficient (for checking the fast stationary law).
Trajectory simulate_coupled_tracking_mode(const SpectralField& w0, const ModelParams& params,
                                          const SimConfig& config, int mode,
                                          std::vector<double>& mode_series);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_snapshots_csv(const Trajectory& traj, const std::string& path);

}  // namespace srde
