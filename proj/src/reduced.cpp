#include "srde/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srde/errors.hpp"

namespace srde {

namespace {

Eigen::VectorXd slow_part(const SpectralField& u, const ModelParams& p) {
    if (u.modes() != p.basis.total_modes)
        throw std::invalid_argument("reduced: field/basis size mismatch");
    const int n = p.cutoff.n;
    for (int i = n + 1; i <= u.modes(); ++i) {
        if (u.coeff(i) != 0.0)
            throw std::invalid_argument("reduced: state must be supported on the slow modes");
    }
    Eigen::VectorXd v(n);
    for (int i = 1; i <= n; ++i) v(i - 1) = u.coeff(i);
    return v;
}

SpectralField to_field(const Eigen::VectorXd& slow, const ModelParams& p) {
    SpectralField f(p.basis.total_modes);
    for (int i = 0; i < slow.size(); ++i) f.coeff(i + 1) = slow(i);
    return f;
}

std::vector<int> forced_modes(const ModelParams& p) {
    std::vector<int> out;
    for (int i = p.cutoff.n + 1; i <= p.basis.total_modes; ++i) {
        if (p.spectrum.lambda(i) > 0.0) {
            if (p.basis.eigenvalue(i) <= 0.0)
                throw DegenerateDecayError("reduced: forced mode " + std::to_string(i) +
                                           " has non-positive decay rate");
            out.push_back(i);
        }
    }
    return out;
}

double quad_integral(int a, int b, int c, int d) {
    const int idx[4] = {a, b, c, d};
    return sine_product_integral(std::span<const int>(idx, 4));
}

/// Precomputed slow-drift operator: linear diagonal, noise-correction
/// coupling, and the cubic self-interaction tensor restricted to slow modes.
struct AveragedOp {
    explicit AveragedOp(const ModelParams& p) : n(p.cutoff.n), c0(p.c0) {
        lin = Eigen::VectorXd(n);
        for (int i = 1; i <= n; ++i) lin(i - 1) = -p.basis.eigenvalue(i) + p.gamma;
        corr = Eigen::MatrixXd::Zero(n, n);
        const std::vector<double> vsq = eta_mean_square(p);
        for (int l = 1; l <= n; ++l)
            for (int a = 1; a <= n; ++a) {
                double s = 0.0;
                for (int q = p.cutoff.n + 1; q <= p.basis.total_modes; ++q) {
                    const double v = vsq[static_cast<std::size_t>(q - 1)];
                    if (v != 0.0) s += v * quad_integral(a, q, q, l);
                }
                corr(l - 1, a - 1) = 3.0 * c0 * s;
            }
        cubic.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k)
                    for (int l = 1; l <= n; ++l)
                        cubic[idx(i, j, k, l)] = quad_integral(i, j, k, l);
    }

    std::size_t idx(int i, int j, int k, int l) const {
        const std::size_t m = static_cast<std::size_t>(n);
        return (((static_cast<std::size_t>(i - 1) * m) + (j - 1)) * m + (k - 1)) * m + (l - 1);
    }

    Eigen::VectorXd drift(const Eigen::VectorXd& u) const {
        Eigen::VectorXd out = lin.cwiseProduct(u) - corr * u;
        for (int l = 1; l <= n; ++l) {
            double s = 0.0;
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    for (int k = 1; k <= n; ++k)
                        s += u(i - 1) * u(j - 1) * u(k - 1) * cubic[idx(i, j, k, l)];
            out(l - 1) -= c0 * s;
        }
        return out;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
        Eigen::MatrixXd out = Eigen::MatrixXd(lin.asDiagonal()) - corr;
        for (int l = 1; l <= n; ++l)
            for (int i = 1; i <= n; ++i) {
                double s = 0.0;
                for (int j = 1; j <= n; ++j)
                    for (int k = 1; k <= n; ++k)
                        s += u(j - 1) * u(k - 1) * cubic[idx(i, j, k, l)];
                out(l - 1, i - 1) -= 3.0 * c0 * s;
            }
        return out;
    }

    int n;
    double c0;
    Eigen::VectorXd lin;
    Eigen::MatrixXd corr;
    std::vector<double> cubic;
};

struct PairItem {
    int mode;   // index into the forced-mode list
    bool late;  // belongs to the lag-t factor
};

/// Sum over Wick pairings of prod(covariances) integrated over the lag.
/// Same-time pairs contribute the stationary variance; crossed pairs carry
/// v_p e^{-alpha_p t}, so a completed pairing with crossing rate R integrates
/// to prod / R. Pairings with no crossing reproduce the product of the two
/// means and are dropped, which is exactly the centering of the integrand.
double pair_rec(std::vector<PairItem>& items, std::vector<bool>& used, double prod, double rate,
                const std::vector<double>& variance, const std::vector<double>& decay) {
    int first = -1;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!used[i]) {
            first = static_cast<int>(i);
            break;
        }
    }
    if (first < 0) return rate > 0.0 ? prod / rate : 0.0;
    used[static_cast<std::size_t>(first)] = true;
    double total = 0.0;
    const PairItem a = items[static_cast<std::size_t>(first)];
    for (std::size_t j = static_cast<std::size_t>(first) + 1; j < items.size(); ++j) {
        if (used[j]) continue;
        const PairItem b = items[j];
        if (b.mode != a.mode) continue;  // independent modes: zero covariance
        used[j] = true;
        const double extra = (a.late != b.late) ? decay[static_cast<std::size_t>(a.mode)] : 0.0;
        total += pair_rec(items, used, prod * variance[static_cast<std::size_t>(a.mode)],
                          rate + extra, variance, decay);
        used[j] = false;
    }
    used[static_cast<std::size_t>(first)] = false;
    return total;
}

/// Closed-form evaluation of the noise covariance transmitted to the slow
/// modes.
///
/// The centered slow projection of the cubic splits into Gaussian monomials
/// in the forced OU modes:
///   degree 1:  -3 c0 sum_{a,b} U_a U_b <e_a e_b e_p, e_i>  eta_p
///   degree 2:  -3 c0 sum_a U_a <e_a e_p e_q, e_i>  eta_p eta_q
///   degree 3:    -c0 <e_p e_q e_r, e_i>  eta_p eta_q eta_r
/// The lag covariance of two monomials is assembled from Wick pairings of OU
/// autocovariances; every lag integral is an exponential and is evaluated in
/// closed form.
class SlowNoiseCovariance {
public:
    explicit SlowNoiseCovariance(const ModelParams& p)
        : n_(p.cutoff.n), c0_(p.c0), forced_(forced_modes(p)) {
        const std::vector<double> vsq = eta_mean_square(p);
        for (int m : forced_) {
            variance_.push_back(vsq[static_cast<std::size_t>(m - 1)]);
            decay_.push_back(p.basis.eigenvalue(m));
        }
        const int f = static_cast<int>(forced_.size());
        for (int a = 0; a < f; ++a) skeletons_.push_back({{a, -1, -1}});
        for (int a = 0; a < f; ++a)
            for (int b = a; b < f; ++b) skeletons_.push_back({{a, b, -1}});
        for (int a = 0; a < f; ++a)
            for (int b = a; b < f; ++b)
                for (int c = b; c < f; ++c) skeletons_.push_back({{a, b, c}});
        const std::size_t s = skeletons_.size();
        pair_integral_.assign(s * s, 0.0);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                pair_integral_[i * s + j] = integrate_pairings(skeletons_[i], skeletons_[j]);

        t_lin_.assign(static_cast<std::size_t>(n_) * n_ * f * n_, 0.0);
        for (int a = 1; a <= n_; ++a)
            for (int b = 1; b <= n_; ++b)
                for (int pi = 0; pi < f; ++pi)
                    for (int l = 1; l <= n_; ++l)
                        t_lin_[lin_idx(a, b, pi, l)] = quad_integral(a, b, forced_[static_cast<std::size_t>(pi)], l);
        t_quad_.assign(static_cast<std::size_t>(n_) * f * f * n_, 0.0);
        for (int a = 1; a <= n_; ++a)
            for (int pi = 0; pi < f; ++pi)
                for (int qi = 0; qi < f; ++qi)
                    for (int l = 1; l <= n_; ++l)
                        t_quad_[quad_idx(a, pi, qi, l)] =
                            quad_integral(a, forced_[static_cast<std::size_t>(pi)],
                                          forced_[static_cast<std::size_t>(qi)], l);
        t_cub_.assign(static_cast<std::size_t>(f) * f * f * n_, 0.0);
        for (int pi = 0; pi < f; ++pi)
            for (int qi = 0; qi < f; ++qi)
                for (int ri = 0; ri < f; ++ri)
                    for (int l = 1; l <= n_; ++l)
                        t_cub_[cub_idx(pi, qi, ri, l)] =
                            quad_integral(forced_[static_cast<std::size_t>(pi)],
                                          forced_[static_cast<std::size_t>(qi)],
                                          forced_[static_cast<std::size_t>(ri)], l);
    }

    Eigen::MatrixXd evaluate(const Eigen::VectorXd& u) const {
        const int f = static_cast<int>(forced_.size());
        const std::size_t s = skeletons_.size();
        if (s == 0) return Eigen::MatrixXd::Zero(n_, n_);
        Eigen::MatrixXd kappa = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s), n_);
        for (int l = 1; l <= n_; ++l) {
            std::size_t row = 0;
            for (int a = 0; a < f; ++a, ++row) {
                double c = 0.0;
                for (int i = 1; i <= n_; ++i)
                    for (int j = 1; j <= n_; ++j)
                        c += u(i - 1) * u(j - 1) * t_lin_[lin_idx(i, j, a, l)];
                kappa(static_cast<Eigen::Index>(row), l - 1) = -3.0 * c0_ * c;
            }
            for (int a = 0; a < f; ++a)
                for (int b = a; b < f; ++b, ++row) {
                    double c = 0.0;
                    for (int i = 1; i <= n_; ++i) c += u(i - 1) * t_quad_[quad_idx(i, a, b, l)];
                    const double mult = (a == b) ? 1.0 : 2.0;
                    kappa(static_cast<Eigen::Index>(row), l - 1) = -3.0 * c0_ * mult * c;
                }
            for (int a = 0; a < f; ++a)
                for (int b = a; b < f; ++b)
                    for (int c3 = b; c3 < f; ++c3, ++row) {
                        double mult = 6.0;
                        if (a == b && b == c3) mult = 1.0;
                        else if (a == b || b == c3 || a == c3) mult = 3.0;
                        kappa(static_cast<Eigen::Index>(row), l - 1) =
                            -c0_ * mult * t_cub_[cub_idx(a, b, c3, l)];
                    }
        }
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_, n_);
        for (std::size_t m = 0; m < s; ++m)
            for (std::size_t m2 = 0; m2 < s; ++m2) {
                const double integral = pair_integral_[m * s + m2];
                if (integral == 0.0) continue;
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j)
                        b(i, j) += 2.0 * kappa(static_cast<Eigen::Index>(m), i) *
                                   kappa(static_cast<Eigen::Index>(m2), j) * integral;
            }
        return 0.5 * (b + b.transpose());
    }

private:
    struct Skeleton {
        int m[3];  // forced-mode list indices, -1 marks unused slots
    };

    std::size_t lin_idx(int a, int b, int p, int l) const {
        const std::size_t f = forced_.size();
        return ((static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(n_) + (b - 1)) * f +
                static_cast<std::size_t>(p)) * static_cast<std::size_t>(n_) + (l - 1);
    }
    std::size_t quad_idx(int a, int p, int q, int l) const {
        const std::size_t f = forced_.size();
        return ((static_cast<std::size_t>(a - 1) * f + static_cast<std::size_t>(p)) * f +
                static_cast<std::size_t>(q)) * static_cast<std::size_t>(n_) + (l - 1);
    }
    std::size_t cub_idx(int p, int q, int r, int l) const {
        const std::size_t f = forced_.size();
        return ((static_cast<std::size_t>(p) * f + static_cast<std::size_t>(q)) * f +
                static_cast<std::size_t>(r)) * static_cast<std::size_t>(n_) + (l - 1);
    }

    double integrate_pairings(const Skeleton& left, const Skeleton& right) const {
        std::vector<PairItem> items;
        for (int k = 0; k < 3; ++k)
            if (left.m[k] >= 0) items.push_back({left.m[k], true});
        for (int k = 0; k < 3; ++k)
            if (right.m[k] >= 0) items.push_back({right.m[k], false});
        if (items.size() % 2 != 0) return 0.0;
        std::vector<bool> used(items.size(), false);
        return pair_rec(items, used, 1.0, 0.0, variance_, decay_);
    }

    int n_;
    double c0_;
    std::vector<int> forced_;
    std::vector<double> variance_;
    std::vector<double> decay_;
    std::vector<Skeleton> skeletons_;
    std::vector<double> pair_integral_;
    std::vector<double> t_lin_, t_quad_, t_cub_;
};

}  // namespace

std::vector<double> eta_mean_square(const ModelParams& params) {
    params.validate();
    std::vector<double> out(static_cast<std::size_t>(params.basis.total_modes), 0.0);
    for (int i = params.cutoff.n + 1; i <= params.basis.total_modes; ++i) {
        const double l = params.spectrum.lambda(i);
        if (l <= 0.0) continue;
        const double alpha = params.basis.eigenvalue(i);
        if (alpha <= 0.0)
            throw DegenerateDecayError("eta_mean_square: forced mode " + std::to_string(i) +
                                       " has non-positive decay rate");
        out[static_cast<std::size_t>(i - 1)] = params.sigma * params.sigma * l / (2.0 * alpha);
    }
    return out;
}

SpectralField averaged_drift(const SpectralField& u_slow, const ModelParams& params) {
    const Eigen::VectorXd u = slow_part(u_slow, params);
    AveragedOp op(params);
    return to_field(op.drift(u), params);
}

Eigen::MatrixXd averaged_derivative_drift(const SpectralField& u_slow,
                                          const ModelParams& params) {
    const Eigen::VectorXd u = slow_part(u_slow, params);
    AveragedOp op(params);
    return op.jacobian(u);
}

std::vector<AveragedState> integrate_averaged(const SpectralField& u0,
                                              const ModelParams& params, double t_slow,
                                              double dt_slow, int record_stride) {
    if (!(dt_slow > 0.0)) throw std::invalid_argument("integrate_averaged: dt must be positive");
    if (t_slow < 0.0) throw std::invalid_argument("integrate_averaged: horizon must be >= 0");
    if (record_stride < 1) throw std::invalid_argument("integrate_averaged: bad record stride");
    AveragedOp op(params);
    Eigen::VectorXd u = slow_part(u0, params);
    const long long n = std::llround(t_slow / dt_slow);
    std::vector<AveragedState> out;
    out.reserve(static_cast<std::size_t>(n / record_stride + 2));
    out.push_back({u, 0.0});
    for (long long k = 1; k <= n; ++k) {
        const Eigen::VectorXd k1 = op.drift(u);
        const Eigen::VectorXd k2 = op.drift(u + 0.5 * dt_slow * k1);
        const Eigen::VectorXd k3 = op.drift(u + 0.5 * dt_slow * k2);
        const Eigen::VectorXd k4 = op.drift(u + dt_slow * k3);
        u += dt_slow / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = static_cast<double>(k) * dt_slow;
        if (!u.allFinite())
            throw DivergenceError(t, "averaged equation diverged at t' = " + std::to_string(t));
        if (k % record_stride == 0 || k == n) out.push_back({u, t});
    }
    return out;
}

CovarianceMatrix::CovarianceMatrix(const Eigen::MatrixXd& b) {
    if (b.rows() != b.cols()) throw CovarianceError("covariance: matrix must be square");
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw CovarianceError("covariance: matrix is not symmetric");
    b_ = 0.5 * (b + b.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b_);
    Eigen::VectorXd values = eig.eigenvalues();
    for (int i = 0; i < values.size(); ++i) {
        if (values(i) < -1e-12 * scale)
            throw CovarianceError("covariance: negative eigenvalue beyond tolerance");
        values(i) = std::max(values(i), 0.0);
    }
    sqrt_ = eig.eigenvectors() * values.cwiseSqrt().asDiagonal() *
            eig.eigenvectors().transpose();
}

CovarianceMatrix covariance_quadrature(const SpectralField& u_slow, const ModelParams& params) {
    const Eigen::VectorXd u = slow_part(u_slow, params);
    SlowNoiseCovariance cov(params);
    return CovarianceMatrix(cov.evaluate(u));
}

double covariance_closed_single_mode(double amplitude, double sigma) {
    const double s2 = sigma * sigma;
    return s2 * s2 * amplitude * amplitude / 24.0;
}

DeviationState make_deviation_state(int slow_modes) {
    DeviationState s;
    s.rho = Eigen::VectorXd::Zero(slow_modes);
    return s;
}

struct DeviationCoeffsBuilder::Impl {
    explicit Impl(const ModelParams& p) : op(p), cov(p) {}
    AveragedOp op;
    SlowNoiseCovariance cov;
};

DeviationCoeffsBuilder::DeviationCoeffsBuilder(const ModelParams& params)
    : impl_(std::make_unique<Impl>(params)) {}

DeviationCoeffsBuilder::~DeviationCoeffsBuilder() = default;

DeviationCoeffs DeviationCoeffsBuilder::evaluate(const Eigen::VectorXd& slow) const {
    DeviationCoeffs c;
    c.drift = impl_->op.jacobian(slow);
    c.noise = CovarianceMatrix(impl_->cov.evaluate(slow)).sqrt();
    return c;
}

DeviationCoeffs deviation_coeffs(const SpectralField& u_slow, const ModelParams& params) {
    const Eigen::VectorXd u = slow_part(u_slow, params);
    return DeviationCoeffsBuilder(params).evaluate(u);
}

void deviation_step_raw(const double* drift, const double* noise, int n, DeviationState& state,
                        double dt_slow, SeededRng& rng) {
    if (!(dt_slow > 0.0)) throw std::invalid_argument("deviation step: dt must be positive");
    constexpr int kMax = 32;
    if (n < 1 || n > kMax) throw std::invalid_argument("deviation step: unsupported mode count");
    double xi[kMax];
    double upd[kMax];
    for (int i = 0; i < n; ++i) xi[i] = rng.normal();
    const double sqrt_dt = std::sqrt(dt_slow);
    double* rho = state.rho.data();
    for (int i = 0; i < n; ++i) {
        double d = 0.0;
        double w = 0.0;
        for (int j = 0; j < n; ++j) {
            d += drift[i + j * n] * rho[j];   // column-major
            w += noise[i + j * n] * xi[j];
        }
        upd[i] = dt_slow * d + sqrt_dt * w;
    }
    bool finite = true;
    for (int i = 0; i < n; ++i) {
        rho[i] += upd[i];
        finite = finite && std::isfinite(rho[i]);
    }
    state.clock += dt_slow;
    if (!finite)
        throw DivergenceError(state.clock,
                              "deviation diverged at t' = " + std::to_string(state.clock));
}

void deviation_step_with(const DeviationCoeffs& coeffs, DeviationState& state, double dt_slow,
                         SeededRng& rng) {
    const int n = static_cast<int>(state.rho.size());
    if (coeffs.drift.rows() != n || coeffs.noise.rows() != n)
        throw std::invalid_argument("deviation step: coefficient size mismatch");
    deviation_step_raw(coeffs.drift.data(), coeffs.noise.data(), n, state, dt_slow, rng);
}

void deviation_step(DeviationState& state, const SpectralField& u_slow,
                    const ModelParams& params, double dt_slow, SeededRng& rng) {
    deviation_step_with(deviation_coeffs(u_slow, params), state, dt_slow, rng);
}

Trajectory reconstruct(const std::vector<AveragedState>& averaged,
                       const std::vector<DeviationState>& deviation, double epsilon) {
    if (averaged.size() != deviation.size())
        throw GridMismatchError("reconstruct: trajectories have different lengths");
    if (!(epsilon > 0.0)) throw std::invalid_argument("reconstruct: epsilon must be positive");
    Trajectory traj;
    traj.backend = Backend::Spectral;
    const double sqrt_eps = std::sqrt(epsilon);
    traj.times.reserve(averaged.size());
    traj.amplitude.reserve(averaged.size());
    for (std::size_t k = 0; k < averaged.size(); ++k) {
        const double ta = averaged[k].clock;
        const double td = deviation[k].clock;
        if (std::abs(ta - td) > 1e-9 * std::max(1.0, std::abs(ta)))
            throw GridMismatchError("reconstruct: slow time grids disagree");
        traj.times.push_back(ta / epsilon);
        traj.amplitude.push_back(sqrt_eps * averaged[k].slow(0) + epsilon * deviation[k].rho(0));
    }
    return traj;
}

ManifoldCoeffs manifold_coeffs(const ModelParams& params) {
    params.validate();
    if (params.cutoff.n != 1)
        throw std::invalid_argument("manifold: model requires a single slow mode");
    const std::vector<int> forced = forced_modes(params);
    if (forced.size() != 1)
        throw std::invalid_argument("manifold: model requires exactly one forced fast mode");
    const int p = forced.front();
    const double alpha = params.basis.eigenvalue(p);
    const double v = params.sigma * params.sigma * params.spectrum.lambda(p) / (2.0 * alpha);
    const double g = quad_integral(1, p, p, 1);
    ManifoldCoeffs c;
    c.forced_mode = p;
    c.alpha = alpha;
    c.linear = params.epsilon * (params.gamma - 3.0 * params.c0 * v * g);
    c.cubic = params.c0 * quad_integral(1, 1, 1, 1);
    c.noise = params.epsilon * 3.0 * params.c0 * g * v * std::sqrt(2.0 / alpha);
    return c;
}

void manifold_step(ManifoldState& state, const ModelParams& params, double dt, SeededRng& rng) {
    manifold_step_with(manifold_coeffs(params), state, dt, rng);
}

void manifold_step_with(const ManifoldCoeffs& c, ManifoldState& state, double dt,
                        SeededRng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("manifold step: dt must be positive");
    const double a = state.a;
    state.a = a + dt * (c.linear * a - c.cubic * a * a * a) +
              c.noise * a * std::sqrt(dt) * rng.normal();

    // Exact joint transition of (h1, h2): both decay at rate alpha, h2
    // integrates h1, and only h1 is driven.
    const double r = c.alpha;
    const double decay = std::exp(-r * dt);
    const double d2 = decay * decay;
    const double q11 = (1.0 - d2) / (2.0 * r);
    const double q12 = (1.0 - (1.0 + 2.0 * r * dt) * d2) / (4.0 * r * r);
    const double q22 = 1.0 / (4.0 * r * r * r) -
                       d2 * (dt * dt / (2.0 * r) + dt / (2.0 * r * r) + 1.0 / (4.0 * r * r * r));
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double s1 = std::sqrt(q11);
    const double cross = q12 / s1;
    const double s2 = std::sqrt(std::max(0.0, q22 - cross * cross));
    const double h1 = state.h1;
    state.h2 = decay * (state.h2 + dt * h1) + cross * z1 + s2 * z2;
    state.h1 = decay * h1 + s1 * z1;
    state.clock += dt;
    if (!std::isfinite(state.a))
        throw DivergenceError(state.clock,
                              "manifold amplitude diverged at t = " + std::to_string(state.clock));
}

void manifold_init_history(ManifoldState& state, const ModelParams& params, SeededRng& rng) {
    const ManifoldCoeffs c = manifold_coeffs(params);
    const double r = c.alpha;
    const double var1 = 1.0 / (2.0 * r);
    const double cov = 1.0 / (4.0 * r * r);
    const double var2 = 1.0 / (4.0 * r * r * r);
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double s1 = std::sqrt(var1);
    const double cross = cov / s1;
    const double s2 = std::sqrt(std::max(0.0, var2 - cross * cross));
    state.h1 = s1 * z1;
    state.h2 = cross * z1 + s2 * z2;
}

SpectralField manifold_shape(const ManifoldState& state, const ModelParams& params) {
    const ManifoldCoeffs c = manifold_coeffs(params);
    const int m = params.basis.total_modes;
    SpectralField f(m);
    f.coeff(1) = state.a;
    if (m >= 3) {
        const double alpha3 = params.basis.eigenvalue(3);
        if (alpha3 > 0.0) {
            // Static Galerkin balance of mode 3 against the cubic forcing.
            f.coeff(3) = params.c0 * state.a * state.a * state.a / (4.0 * alpha3);
        }
    }
    const int p = c.forced_mode;
    if (p <= m) {
        const double sl = std::sqrt(params.spectrum.lambda(p));
        const double eps = params.epsilon;
        f.coeff(p) = std::sqrt(eps) * params.sigma * sl * state.h1 +
                     eps * std::sqrt(eps) * params.gamma * params.sigma * sl * state.h2;
    }
    return f;
}

}  // namespace srde
