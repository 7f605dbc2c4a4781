#pragma once

#include "srde/noise.hpp"
#include "srde/spectral.hpp"

namespace srde {

/// Single source of truth for the model: the stochastic reaction-diffusion
/// equation d_t w = (d_xx + shift) w + eps*gamma w - c0 w^3 + sigma sqrt(eps) dW
/// on (0, pi) with Dirichlet boundaries, its slow/fast split at the cutoff,
/// and the diagonal noise spectrum.
struct ModelParams {
    double epsilon = 1.0;  // timescale separation, in (0, 1]
    double gamma = 1.0;    // bifurcation parameter
    double sigma = 1.0;    // noise strength, >= 0
    double c0 = 1.0;       // cubic coefficient, > 0
    SlowCutoff cutoff{1};
    Basis basis{8, 1.0};
    NoiseSpectrum spectrum = NoiseSpectrum::single_mode(8, 2, 1.0);

    void validate() const;
};

inline OUState ou_initial_state(const ModelParams& p) {
    return ou_initial_state(p.basis, p.spectrum, p.epsilon, p.sigma);
}
inline OUState ou_stationary_sample(const ModelParams& p, SeededRng& rng) {
    return ou_stationary_sample(p.basis, p.spectrum, p.epsilon, p.sigma, rng);
}
inline double ou_autocovariance(int mode, double lag, const ModelParams& p) {
    return ou_autocovariance(mode, lag, p.basis, p.spectrum, p.sigma);
}
inline double stochastic_convolution_variance(int mode, const ModelParams& p) {
    return stochastic_convolution_variance(mode, p.basis, p.spectrum, p.sigma, p.cutoff);
}

/// Amplitude of the stable deterministic equilibrium of the unforced slow
/// dynamics, used as the standard initial condition.
double default_initial_amplitude(const ModelParams& p);

}  // namespace srde
