#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "srde/fullsim.hpp"
#include "srde/params.hpp"
#include "srde/rng.hpp"

namespace srde {

/// Slow-mode state of the averaged equation: coefficients of modes 1..N and a
/// slow-time clock. Fast modes are identically zero by construction.
struct AveragedState {
    Eigen::VectorXd slow;
    double clock = 0.0;
};

/// Gaussian deviation of the slow modes; starts at zero by definition.
struct DeviationState {
    Eigen::VectorXd rho;
    double clock = 0.0;
};

DeviationState make_deviation_state(int slow_modes);

/// Amplitude plus the two exponential history convolutions of the driving
/// noise that shape the stochastic slow manifold.
struct ManifoldState {
    double a = 0.0;
    double h1 = 0.0;  // exp(-alpha t) * dbeta
    double h2 = 0.0;  // exp(-alpha t) * exp(-alpha t) * dbeta
    double clock = 0.0;
};

/// Symmetric positive semidefinite covariance with its symmetric square root.
/// Eigenvalues below -1e-12 (relative to the matrix scale) raise
/// CovarianceError; small negative ones are clamped to zero.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(const Eigen::MatrixXd& b);

    const Eigen::MatrixXd& matrix() const { return b_; }
    const Eigen::MatrixXd& sqrt() const { return sqrt_; }
    int size() const { return static_cast<int>(b_.rows()); }

private:
    Eigen::MatrixXd b_;
    Eigen::MatrixXd sqrt_;
};

/// Stationary mean square of the fast OU field per mode,
/// sigma^2 lambda_i / (2 alpha_i); zero on unforced modes.
std::vector<double> eta_mean_square(const ModelParams& params);

/// Right-hand side of the averaged slow equation in slow time:
/// -alpha_i u_i + gamma u_i - c0 P_N(u^3 + 3 u E[eta^2]).
/// The returned field is slow-only.
SpectralField averaged_drift(const SpectralField& u_slow, const ModelParams& params);

/// Jacobian of averaged_drift as a linear map on the slow modes:
/// diag(-alpha_i + gamma) - 3 c0 P_N[(u^2 + E[eta^2]) . ].
Eigen::MatrixXd averaged_derivative_drift(const SpectralField& u_slow,
                                          const ModelParams& params);

/// Classical fourth-order integration of the deterministic averaged equation.
std::vector<AveragedState> integrate_averaged(const SpectralField& u0,
                                              const ModelParams& params, double t_slow,
                                              double dt_slow, int record_stride = 1);

/// Noise covariance transmitted to the slow modes through the cubic term:
/// B_ij = 2 int_0^inf Cov(<F(t), e_i>, <F(0), e_j>) dt with
/// F = P_N f0(u + eta) - P_N mean(f0(u + eta)). Assembled from Wick pairings
/// of the OU autocovariances; every lag integral is an exponential and is
/// evaluated in closed form, so no quadrature tolerance enters.
CovarianceMatrix covariance_quadrature(const SpectralField& u_slow, const ModelParams& params);

/// Closed form sigma^4 A^2 / 24 of the single-forced-mode example.
double covariance_closed_single_mode(double amplitude, double sigma);

/// Drift and diffusion of the deviation equation frozen at one slow state.
struct DeviationCoeffs {
    Eigen::MatrixXd drift;  // -alpha + gamma - 3 c0 (u^2 + E[eta^2]) coupling
    Eigen::MatrixXd noise;  // symmetric square root of the covariance
};

DeviationCoeffs deviation_coeffs(const SpectralField& u_slow, const ModelParams& params);

/// Caches the drift operator and covariance assembly so the coefficients can
/// be evaluated along a whole averaged trajectory without rebuilding the
/// coupling tables at every step.
class DeviationCoeffsBuilder {
public:
    explicit DeviationCoeffsBuilder(const ModelParams& params);
    ~DeviationCoeffsBuilder();

    DeviationCoeffs evaluate(const Eigen::VectorXd& slow) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Euler-Maruyama step of d rho = drift(u) rho dt + sqrt(B(u)) dW.
void deviation_step(DeviationState& state, const SpectralField& u_slow,
                    const ModelParams& params, double dt_slow, SeededRng& rng);
void deviation_step_with(const DeviationCoeffs& coeffs, DeviationState& state, double dt_slow,
                         SeededRng& rng);
/// Same step on column-major n x n coefficient arrays; no allocation.
void deviation_step_raw(const double* drift, const double* noise, int n, DeviationState& state,
                        double dt_slow, SeededRng& rng);

/// Fast-time slow amplitude a(t) = sqrt(eps) A(eps t) + eps rho_1(eps t).
/// Both inputs must share the slow time grid.
Trajectory reconstruct(const std::vector<AveragedState>& averaged,
                       const std::vector<DeviationState>& deviation, double epsilon);

/// Drift/noise coefficients of the manifold amplitude SDE (exposed for tests).
struct ManifoldCoeffs {
    double linear = 0.0;  // eps (gamma - 3 c0 v g)
    double cubic = 0.0;   // c0 <e1^3, e1>
    double noise = 0.0;   // eps * 3 c0 g v sqrt(2/alpha), multiplies a
    int forced_mode = 0;
    double alpha = 0.0;
};
ManifoldCoeffs manifold_coeffs(const ModelParams& params);

/// One Euler-Maruyama step of the slow-manifold amplitude equation in fast
/// time, with the history convolutions advanced by their exact joint Gaussian
/// transition. Requires a single forced fast mode.
void manifold_step(ManifoldState& state, const ModelParams& params, double dt,
                   SeededRng& rng);
void manifold_step_with(const ManifoldCoeffs& coeffs, ManifoldState& state, double dt,
                        SeededRng& rng);

/// Draw the history convolutions from their joint stationary law.
void manifold_init_history(ManifoldState& state, const ModelParams& params, SeededRng& rng);

/// Field on the stochastic slow manifold for the current amplitude and noise
/// history.
SpectralField manifold_shape(const ManifoldState& state, const ModelParams& params);

}  // namespace srde
