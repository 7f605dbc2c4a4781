#pragma once

#include <span>
#include <vector>

#include "srde/rng.hpp"
#include "srde/spectral.hpp"

namespace srde {

/// Diagonal Q-Wiener spectrum: lambda_i per mode, zero on the slow modes.
struct NoiseSpectrum {
    std::vector<double> lambdas;

    static NoiseSpectrum zero(int modes);
    static NoiseSpectrum single_mode(int modes, int mode, double value);

    int modes() const { return static_cast<int>(lambdas.size()); }
    double lambda(int mode) const { return lambdas[static_cast<std::size_t>(mode - 1)]; }
    double& lambda(int mode) { return lambdas[static_cast<std::size_t>(mode - 1)]; }
    double trace() const;

    void validate(SlowCutoff cutoff) const;
};

/// One Q-Wiener increment over dt: mode i receives sqrt(lambda_i) N(0, dt),
/// modes with lambda_i = 0 stay exactly zero.
SpectralField wiener_increment(const NoiseSpectrum& spec, double dt, SeededRng& rng);

/// Fast stationary Ornstein-Uhlenbeck field, stepped in slow time. Per forced
/// mode the decay rate is alpha_i/eps and the diffusion sigma sqrt(lambda_i/eps),
/// so the stationary variance sigma^2 lambda_i / (2 alpha_i) is independent of
/// eps.
struct OUState {
    std::vector<double> values;     // eta_i, zero on unforced modes
    std::vector<double> decay;      // alpha_i / eps on forced modes, else 0
    std::vector<double> diffusion;  // sigma sqrt(lambda_i / eps) on forced modes
    double clock = 0.0;             // slow time

    int modes() const { return static_cast<int>(values.size()); }
    SpectralField field() const;
};

OUState ou_initial_state(const Basis& basis, const NoiseSpectrum& spec, double eps,
                         double sigma);

/// Exact Gaussian transition over a slow-time step dt: no discretization bias.
void ou_exact_step(OUState& state, double dt, SeededRng& rng);

/// One draw from the stationary law N(0, sigma^2 lambda_i / (2 alpha_i)) per
/// forced mode.
OUState ou_stationary_sample(const Basis& basis, const NoiseSpectrum& spec, double eps,
                             double sigma, SeededRng& rng);

/// Stationary autocovariance of one OU mode at a fast-time lag:
/// (sigma^2 lambda_i / (2 alpha_i)) exp(-alpha_i lag).
double ou_autocovariance(int mode, double lag, const Basis& basis, const NoiseSpectrum& spec,
                         double sigma);

/// Stationary variance of the linear stochastic convolution in one fast mode;
/// analytic oracle for the simulated process.
double stochastic_convolution_variance(int mode, const Basis& basis, const NoiseSpectrum& spec,
                                       double sigma, SlowCutoff cutoff);

/// Mixed moment E[prod_k X_k^{p_k}] of centered jointly Gaussian variables
/// with the given covariance matrix, by pair-partition enumeration. Odd total
/// degree gives 0.
double isserlis_moment(std::span<const double> covariance, int variables,
                       std::span<const int> powers);

}  // namespace srde
