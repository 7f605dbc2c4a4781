#include "srde/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "srde/errors.hpp"

namespace srde {

NoiseSpectrum NoiseSpectrum::zero(int modes) {
    NoiseSpectrum s;
    s.lambdas.assign(static_cast<std::size_t>(modes), 0.0);
    return s;
}

NoiseSpectrum NoiseSpectrum::single_mode(int modes, int mode, double value) {
    NoiseSpectrum s = zero(modes);
    if (mode < 1 || mode > modes) throw std::invalid_argument("noise spectrum: mode out of range");
    s.lambda(mode) = value;
    return s;
}

double NoiseSpectrum::trace() const {
    double t = 0.0;
    for (double l : lambdas) t += l;
    return t;
}

void NoiseSpectrum::validate(SlowCutoff cutoff) const {
    for (int i = 1; i <= modes(); ++i) {
        if (lambda(i) < 0.0)
            throw std::invalid_argument("noise spectrum: lambda must be nonnegative");
        if (i <= cutoff.n && lambda(i) != 0.0)
            throw std::invalid_argument("noise spectrum: slow modes must be unforced");
    }
}

SpectralField wiener_increment(const NoiseSpectrum& spec, double dt, SeededRng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("wiener increment: dt must be positive");
    SpectralField out(spec.modes());
    const double sqrt_dt = std::sqrt(dt);
    for (int i = 1; i <= spec.modes(); ++i) {
        const double l = spec.lambda(i);
        if (l > 0.0) out.coeff(i) = std::sqrt(l) * sqrt_dt * rng.normal();
    }
    return out;
}

SpectralField OUState::field() const {
    SpectralField f(modes());
    for (int i = 1; i <= modes(); ++i) f.coeff(i) = values[static_cast<std::size_t>(i - 1)];
    return f;
}

OUState ou_initial_state(const Basis& basis, const NoiseSpectrum& spec, double eps,
                         double sigma) {
    if (!(eps > 0.0)) throw std::invalid_argument("ou state: eps must be positive");
    if (spec.modes() != basis.total_modes)
        throw std::invalid_argument("ou state: spectrum/basis size mismatch");
    OUState s;
    const int m = basis.total_modes;
    s.values.assign(static_cast<std::size_t>(m), 0.0);
    s.decay.assign(static_cast<std::size_t>(m), 0.0);
    s.diffusion.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 1; i <= m; ++i) {
        const double l = spec.lambda(i);
        if (l <= 0.0) continue;
        const double alpha = basis.eigenvalue(i);
        if (alpha <= 0.0)
            throw DegenerateDecayError("ou state: forced mode " + std::to_string(i) +
                                       " has non-positive decay rate");
        s.decay[static_cast<std::size_t>(i - 1)] = alpha / eps;
        s.diffusion[static_cast<std::size_t>(i - 1)] = sigma * std::sqrt(l / eps);
    }
    return s;
}

void ou_exact_step(OUState& state, double dt, SeededRng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("ou step: dt must be positive");
    for (std::size_t i = 0; i < state.values.size(); ++i) {
        const double theta = state.decay[i];
        if (theta <= 0.0) {
            if (state.diffusion[i] != 0.0)
                throw DegenerateDecayError("ou step: forced mode without decay");
            continue;
        }
        const double decay = std::exp(-theta * dt);
        const double d = state.diffusion[i];
        double noise = 0.0;
        if (d != 0.0) {
            const double var = d * d / (2.0 * theta) * (1.0 - decay * decay);
            noise = std::sqrt(var) * rng.normal();
        }
        state.values[i] = state.values[i] * decay + noise;
    }
    state.clock += dt;
}

OUState ou_stationary_sample(const Basis& basis, const NoiseSpectrum& spec, double eps,
                             double sigma, SeededRng& rng) {
    OUState s = ou_initial_state(basis, spec, eps, sigma);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double theta = s.decay[i];
        if (theta <= 0.0) continue;
        const double d = s.diffusion[i];
        s.values[i] = std::sqrt(d * d / (2.0 * theta)) * rng.normal();
    }
    return s;
}

double ou_autocovariance(int mode, double lag, const Basis& basis, const NoiseSpectrum& spec,
                         double sigma) {
    if (lag < 0.0) throw std::invalid_argument("ou autocovariance: lag must be >= 0");
    const double l = spec.lambda(mode);
    if (l == 0.0) return 0.0;
    const double alpha = basis.eigenvalue(mode);
    if (alpha <= 0.0) throw DegenerateDecayError("ou autocovariance: non-positive decay rate");
    return sigma * sigma * l / (2.0 * alpha) * std::exp(-alpha * lag);
}

double stochastic_convolution_variance(int mode, const Basis& basis, const NoiseSpectrum& spec,
                                       double sigma, SlowCutoff cutoff) {
    if (mode <= cutoff.n)
        throw std::invalid_argument("stochastic convolution: mode is not noise-forced");
    const double l = spec.lambda(mode);
    if (l == 0.0) return 0.0;
    const double alpha = basis.eigenvalue(mode);
    if (alpha <= 0.0) throw DegenerateDecayError("stochastic convolution: non-positive decay");
    return sigma * sigma * l / (2.0 * alpha);
}

namespace {

double matchings(std::vector<int>& items, const std::span<const double>& cov, int n) {
    // Sum over perfect pairings of the remaining items of the product of
    // covariances. items holds variable indices; -1 marks consumed slots.
    int first = -1;
    const int size = static_cast<int>(items.size());
    for (int i = 0; i < size; ++i) {
        if (items[static_cast<std::size_t>(i)] >= 0) {
            first = i;
            break;
        }
    }
    if (first < 0) return 1.0;
    const int a = items[static_cast<std::size_t>(first)];
    items[static_cast<std::size_t>(first)] = -1;
    double sum = 0.0;
    for (int j = first + 1; j < size; ++j) {
        const int b = items[static_cast<std::size_t>(j)];
        if (b < 0) continue;
        const double c = cov[static_cast<std::size_t>(a) * n + b];
        if (c != 0.0) {
            items[static_cast<std::size_t>(j)] = -1;
            sum += c * matchings(items, cov, n);
            items[static_cast<std::size_t>(j)] = b;
        }
    }
    items[static_cast<std::size_t>(first)] = a;
    return sum;
}

}  // namespace

double isserlis_moment(std::span<const double> covariance, int variables,
                       std::span<const int> powers) {
    if (static_cast<int>(powers.size()) != variables)
        throw std::invalid_argument("isserlis: powers size mismatch");
    if (covariance.size() != static_cast<std::size_t>(variables) * variables)
        throw std::invalid_argument("isserlis: covariance size mismatch");
    int degree = 0;
    for (int p : powers) {
        if (p < 0) throw std::invalid_argument("isserlis: negative power");
        degree += p;
    }
    if (degree == 0) return 1.0;
    if (degree % 2 != 0) return 0.0;
    if (degree > 16) throw std::invalid_argument("isserlis: total degree too large");

    std::vector<int> items;
    items.reserve(static_cast<std::size_t>(degree));
    for (int v = 0; v < variables; ++v)
        for (int k = 0; k < powers[static_cast<std::size_t>(v)]; ++k) items.push_back(v);
    return matchings(items, covariance, variables);
}

}  // namespace srde
