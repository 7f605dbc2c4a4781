#include "srde/fullsim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "srde/errors.hpp"

namespace srde {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

long long step_count(double t_final, double dt) {
    return std::llround(t_final / dt);
}

void check_finite(const SpectralField& w, double time) {
    if (!w.is_finite())
        throw DivergenceError(time, "trajectory diverged at t = " + std::to_string(time));
}
}  // namespace

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("sim config: dt must be positive");
    if (t_final < 0.0) throw std::invalid_argument("sim config: t_final must be >= 0");
    if (grid_points < 3) throw std::invalid_argument("sim config: need at least 3 grid points");
    if (record_stride < 1) throw std::invalid_argument("sim config: record_stride must be >= 1");
    if (snapshot_stride < 0) throw std::invalid_argument("sim config: snapshot_stride must be >= 0");
}

double SimConfig::resolved_init_amplitude(const ModelParams& p) const {
    if (std::isnan(init_amplitude)) return default_initial_amplitude(p);
    return init_amplitude;
}

double slow_amplitude(const SpectralField& w) { return w.coeff(1); }

FullStepper::FullStepper(const ModelParams& params, double dt, bool linear_only)
    : params_(params),
      dt_(dt),
      linear_only_(linear_only),
      cubic_(params.basis.total_modes),
      drift_(params.basis.total_modes) {
    params_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
    const int m = params_.basis.total_modes;
    inv_denom_.resize(static_cast<std::size_t>(m));
    noise_amp_.resize(static_cast<std::size_t>(m));
    const double eg = params_.epsilon * params_.gamma;
    for (int i = 1; i <= m; ++i) {
        inv_denom_[static_cast<std::size_t>(i - 1)] =
            1.0 / (1.0 + dt * (params_.basis.eigenvalue(i) - eg));
        noise_amp_[static_cast<std::size_t>(i - 1)] =
            params_.sigma * std::sqrt(params_.epsilon * params_.spectrum.lambda(i) * dt);
    }
}

void FullStepper::step(SpectralField& state, SeededRng& rng) {
    const int m = params_.basis.total_modes;
    if (state.modes() != m) throw std::invalid_argument("stepper: state size mismatch");
    if (linear_only_) {
        for (int i = 1; i <= m; ++i) drift_.coeff(i) = 0.0;
    } else {
        cubic_.apply(state, params_.c0, drift_);
    }
    for (int i = 1; i <= m; ++i) {
        double v = state.coeff(i) + dt_ * drift_.coeff(i);
        const double na = noise_amp_[static_cast<std::size_t>(i - 1)];
        if (na != 0.0) v += na * rng.normal();
        state.coeff(i) = v * inv_denom_[static_cast<std::size_t>(i - 1)];
    }
    time_ += dt_;
    check_finite(state, time_);
}

CoupledStepper::CoupledStepper(const ModelParams& params, double dt, bool linear_only)
    : params_(params),
      dt_(dt),
      linear_only_(linear_only),
      cubic_(params.basis.total_modes),
      drift_(params.basis.total_modes) {
    params_.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
    const int m = params_.basis.total_modes;
    const double eps = params_.epsilon;
    const double eg = eps * params_.gamma;
    inv_denom_.resize(static_cast<std::size_t>(m));
    noise_amp_.resize(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        // High-pass filter: slow diffusion scaled by eps; the reaction term
        // eps*gamma w applies to every mode.
        const double diffusion =
            (i <= params_.cutoff.n ? eps : 1.0) * params_.basis.eigenvalue(i);
        inv_denom_[static_cast<std::size_t>(i - 1)] = 1.0 / (1.0 + dt * (diffusion - eg));
        noise_amp_[static_cast<std::size_t>(i - 1)] =
            params_.sigma * std::sqrt(eps * params_.spectrum.lambda(i) * dt);
    }
}

void CoupledStepper::step(SpectralField& state, SeededRng& rng) {
    const int m = params_.basis.total_modes;
    if (state.modes() != m) throw std::invalid_argument("stepper: state size mismatch");
    if (linear_only_) {
        for (int i = 1; i <= m; ++i) drift_.coeff(i) = 0.0;
    } else {
        cubic_.apply(state, params_.c0, drift_);
    }
    for (int i = 1; i <= m; ++i) {
        double v = state.coeff(i) + dt_ * drift_.coeff(i);
        const double na = noise_amp_[static_cast<std::size_t>(i - 1)];
        if (na != 0.0) v += na * rng.normal();
        state.coeff(i) = v * inv_denom_[static_cast<std::size_t>(i - 1)];
    }
    time_ += dt_;
    check_finite(state, time_);
}

SpectralField step_full(const SpectralField& state, const ModelParams& params, double dt,
                        SeededRng& rng) {
    check_finite(state, 0.0);
    FullStepper stepper(params, dt);
    SpectralField next = state;
    stepper.step(next, rng);
    return next;
}

namespace {

template <typename Stepper>
Trajectory run_spectral(Stepper& stepper, SpectralField state, const SimConfig& config,
                        SeededRng& rng, int tracked_mode, std::vector<double>* mode_series) {
    Trajectory traj;
    traj.backend = Backend::Spectral;
    const long long n = step_count(config.t_final, config.dt);
    auto record = [&](long long k) {
        traj.times.push_back(static_cast<double>(k) * config.dt);
        traj.amplitude.push_back(slow_amplitude(state));
        if (mode_series) mode_series->push_back(state.coeff(tracked_mode));
    };
    auto snapshot = [&](long long k) {
        traj.snapshot_times.push_back(static_cast<double>(k) * config.dt);
        traj.snapshots.emplace_back(state.coeffs().begin(), state.coeffs().end());
    };
    record(0);
    if (config.snapshot_stride > 0) snapshot(0);
    for (long long k = 1; k <= n; ++k) {
        stepper.step(state, rng);
        if (k % config.record_stride == 0 || k == n) record(k);
        if (config.snapshot_stride > 0 && (k % config.snapshot_stride == 0 || k == n))
            snapshot(k);
    }
    return traj;
}

/// Finite-difference backend: second-order central differences on a uniform
/// grid with Dirichlet zeros, linear part implicit (constant tridiagonal
/// solve), cubic pointwise explicit, noise injected at the grid points.
class FiniteDifferenceStepper {
public:
    FiniteDifferenceStepper(const ModelParams& params, const SimConfig& config)
        : params_(params), dt_(config.dt), linear_only_(config.linear_only),
          n_(config.grid_points) {
        params_.validate();
        h_ = kPi / (n_ + 1);
        const double eg = params_.epsilon * params_.gamma;
        const double r = dt_ / (h_ * h_);
        diag_ = 1.0 + 2.0 * r - dt_ * (params_.basis.shift + eg);
        off_ = -r;
        // Thomas forward-elimination coefficients for the constant matrix.
        cp_.resize(static_cast<std::size_t>(n_));
        cp_[0] = off_ / diag_;
        for (int j = 1; j < n_; ++j)
            cp_[static_cast<std::size_t>(j)] = off_ / (diag_ - off_ * cp_[static_cast<std::size_t>(j - 1)]);
        sin_table_.resize(static_cast<std::size_t>(n_) * params_.basis.total_modes);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < params_.basis.total_modes; ++i)
                sin_table_[static_cast<std::size_t>(j) * params_.basis.total_modes + i] =
                    std::sin((i + 1) * (j + 1) * h_);
        rhs_.resize(static_cast<std::size_t>(n_));
        noise_amp_.resize(static_cast<std::size_t>(params_.basis.total_modes));
        for (int i = 1; i <= params_.basis.total_modes; ++i)
            noise_amp_[static_cast<std::size_t>(i - 1)] =
                params_.sigma * std::sqrt(params_.epsilon * params_.spectrum.lambda(i) * dt_);
    }

    std::vector<double> initial_state(double amplitude) const {
        std::vector<double> w(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) w[static_cast<std::size_t>(j)] = amplitude * table(j, 1);
        return w;
    }

    void step(std::vector<double>& w, SeededRng& rng) {
        for (int j = 0; j < n_; ++j) {
            const double v = w[static_cast<std::size_t>(j)];
            rhs_[static_cast<std::size_t>(j)] =
                v + (linear_only_ ? 0.0 : -dt_ * params_.c0 * v * v * v);
        }
        for (int i = 1; i <= params_.basis.total_modes; ++i) {
            const double na = noise_amp_[static_cast<std::size_t>(i - 1)];
            if (na == 0.0) continue;
            const double xi = rng.normal();
            for (int j = 0; j < n_; ++j) rhs_[static_cast<std::size_t>(j)] += na * xi * table(j, i);
        }
        // Thomas solve (diag_, off_) w' = rhs
        w[0] = rhs_[0] / diag_;
        for (int j = 1; j < n_; ++j)
            w[static_cast<std::size_t>(j)] =
                (rhs_[static_cast<std::size_t>(j)] - off_ * w[static_cast<std::size_t>(j - 1)]) /
                (diag_ - off_ * cp_[static_cast<std::size_t>(j - 1)]);
        for (int j = n_ - 2; j >= 0; --j)
            w[static_cast<std::size_t>(j)] -= cp_[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j + 1)];
        time_ += dt_;
        for (double v : w) {
            if (!std::isfinite(v))
                throw DivergenceError(time_, "trajectory diverged at t = " + std::to_string(time_));
        }
    }

    /// Discrete sine transform onto mode 1: the weighted inner product <w, e_1>.
    double amplitude(const std::vector<double>& w) const {
        double a = 0.0;
        for (int j = 0; j < n_; ++j) a += w[static_cast<std::size_t>(j)] * table(j, 1);
        return a * 2.0 / (n_ + 1);
    }

    double time() const { return time_; }

private:
    double table(int j, int mode) const {
        return sin_table_[static_cast<std::size_t>(j) * params_.basis.total_modes + (mode - 1)];
    }

    ModelParams params_;
    double dt_;
    bool linear_only_;
    int n_;
    double h_ = 0.0;
    double diag_ = 0.0;
    double off_ = 0.0;
    double time_ = 0.0;
    std::vector<double> cp_;
    std::vector<double> sin_table_;
    std::vector<double> rhs_;
    std::vector<double> noise_amp_;
};

Trajectory run_finite_difference(const ModelParams& params, const SimConfig& config,
                                 SeededRng& rng) {
    FiniteDifferenceStepper stepper(params, config);
    std::vector<double> w = stepper.initial_state(config.resolved_init_amplitude(params));
    Trajectory traj;
    traj.backend = Backend::FiniteDifference;
    const long long n = step_count(config.t_final, config.dt);
    auto record = [&](long long k) {
        traj.times.push_back(static_cast<double>(k) * config.dt);
        traj.amplitude.push_back(stepper.amplitude(w));
    };
    auto snapshot = [&](long long k) {
        traj.snapshot_times.push_back(static_cast<double>(k) * config.dt);
        traj.snapshots.push_back(w);
    };
    record(0);
    if (config.snapshot_stride > 0) snapshot(0);
    for (long long k = 1; k <= n; ++k) {
        stepper.step(w, rng);
        if (k % config.record_stride == 0 || k == n) record(k);
        if (config.snapshot_stride > 0 && (k % config.snapshot_stride == 0 || k == n))
            snapshot(k);
    }
    return traj;
}

}  // namespace

Trajectory simulate_full(const ModelParams& params, const SimConfig& config) {
    config.validate();
    params.validate();
    if (config.backend == Backend::FiniteDifference) {
        SeededRng rng(config.seed, config.stream);
        return run_finite_difference(params, config, rng);
    }
    SpectralField w0(params.basis.total_modes);
    w0.coeff(1) = config.resolved_init_amplitude(params);
    return simulate_full(w0, params, config);
}

Trajectory simulate_full(const SpectralField& w0, const ModelParams& params,
                         const SimConfig& config) {
    config.validate();
    params.validate();
    if (config.backend == Backend::FiniteDifference)
        throw std::invalid_argument("simulate_full: explicit initial fields require the spectral backend");
    SeededRng rng(config.seed, config.stream);
    FullStepper stepper(params, config.dt, config.linear_only);
    return run_spectral(stepper, w0, config, rng, 1, nullptr);
}

Trajectory simulate_coupled(const ModelParams& params, const SimConfig& config) {
    SpectralField w0(params.basis.total_modes);
    w0.coeff(1) = config.resolved_init_amplitude(params);
    return simulate_coupled(w0, params, config);
}

Trajectory simulate_coupled(const SpectralField& w0, const ModelParams& params,
                            const SimConfig& config) {
    config.validate();
    params.validate();
    if (config.backend == Backend::FiniteDifference)
        throw std::invalid_argument("simulate_coupled: only the spectral backend is supported");
    SeededRng rng(config.seed, config.stream);
    CoupledStepper stepper(params, config.dt, config.linear_only);
    return run_spectral(stepper, w0, config, rng, 1, nullptr);
}

Trajectory simulate_coupled_tracking_mode(const SpectralField& w0, const ModelParams& params,
                                          const SimConfig& config, int mode,
                                          std::vector<double>& mode_series) {
    config.validate();
    params.validate();
    if (mode < 1 || mode > params.basis.total_modes)
        throw std::invalid_argument("tracked mode out of range");
    SeededRng rng(config.seed, config.stream);
    CoupledStepper stepper(params, config.dt, config.linear_only);
    mode_series.clear();
    return run_spectral(stepper, w0, config, rng, mode, &mode_series);
}

namespace {
void write_row(std::ofstream& out, std::span<const double> values) {
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        if (i) out << ',';
        out << buf;
    }
    out << '\n';
}
}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,a\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double row[2] = {traj.times[i], traj.amplitude[i]};
        write_row(out, row);
    }
}

void write_snapshots_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const std::size_t width = traj.snapshots.empty() ? 0 : traj.snapshots.front().size();
    out << "t";
    const char* prefix = traj.backend == Backend::Spectral ? "c" : "w";
    for (std::size_t i = 1; i <= width; ++i) out << ',' << prefix << i;
    out << '\n';
    std::vector<double> row;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        row.clear();
        row.push_back(traj.snapshot_times[i]);
        row.insert(row.end(), traj.snapshots[i].begin(), traj.snapshots[i].end());
        write_row(out, row);
    }
}

}  // namespace srde
