#pragma once

#include <span>
#include <vector>

namespace srde {

/// Sine eigenbasis e_i(x) = sin(ix) on (0, pi) with the weighted inner
/// product <u,v> = (2/pi) integral(u v), under which the e_i are orthonormal.
/// The linear operator is d_xx + shift with eigenvalues -alpha_i,
/// alpha_i = i^2 - shift (shift = 0 gives the plain Laplacian, shift = 1 the
/// shifted operator whose fundamental mode is neutral).
struct Basis {
    int total_modes = 8;
    double shift = 0.0;

    double eigenvalue(int mode) const {
        return static_cast<double>(mode) * mode - shift;
    }
    void validate() const;
};

/// Number of slow (low-wavenumber) modes kept by the projections.
struct SlowCutoff {
    int n = 1;
};

/// Coefficient vector of a function on (0, pi) in the sine basis.
/// coeff(i) multiplies sin(ix), i = 1..modes().
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(int modes) : c_(static_cast<std::size_t>(modes), 0.0) {}

    static SpectralField unit(int modes, int mode, double amplitude = 1.0);

    int modes() const { return static_cast<int>(c_.size()); }
    double coeff(int mode) const { return c_[static_cast<std::size_t>(mode - 1)]; }
    double& coeff(int mode) { return c_[static_cast<std::size_t>(mode - 1)]; }
    std::span<const double> coeffs() const { return c_; }
    std::span<double> coeffs() { return c_; }

    /// Point value sum(coeff_i sin(ix)).
    double evaluate(double x) const;

    /// Weighted L2 norm; by Parseval this is the plain l2 norm of the
    /// coefficients.
    double norm() const;

    bool is_finite() const;

private:
    std::vector<double> c_;
};

void validate_cutoff(SlowCutoff cutoff, int total_modes);

SpectralField project_slow(const SpectralField& w, SlowCutoff cutoff);
SpectralField project_fast(const SpectralField& w, SlowCutoff cutoff);

/// Diagonal action of the high-pass operator (Q_N + eps P_N)(d_xx + shift):
/// modes at or below the cutoff are scaled by -eps*alpha_i, modes above it by
/// -alpha_i. At eps = 1 this is the full linear operator.
SpectralField apply_high_pass(const SpectralField& w, double eps, SlowCutoff cutoff,
                              const Basis& basis);

/// Exact weighted integral (2/pi) integral_0^pi prod_k sin(i_k x) dx for 2 to
/// 4 indices, evaluated by product-to-sum expansion (no quadrature).
double sine_product_integral(std::span<const int> indices);
double sine_product_integral(std::initializer_list<int> indices);

enum class CubicBackend { Collocation, ModeCoupling };

/// Galerkin coefficients of -c0 w^3 truncated to the field's modes.
SpectralField cubic_galerkin(const SpectralField& w, double c0,
                             CubicBackend backend = CubicBackend::Collocation);

/// Collocation backend with cached transform tables. The 2x padded grid makes
/// the cubic product exact for the retained modes: frequencies up to 3M alias
/// onto modes above M on a grid of 2M interior points, so truncation removes
/// them. Holds scratch buffers, so one instance per thread.
class CubicEvaluator {
public:
    explicit CubicEvaluator(int modes);

    void apply(const SpectralField& w, double c0, SpectralField& out);
    void apply(std::span<const double> coeffs, double c0, std::span<double> out);

    int modes() const { return modes_; }

private:
    int modes_ = 0;
    int points_ = 0;
    std::vector<double> table_;   // points x modes values of sin(i x_j)
    std::vector<double> values_;  // scratch: field at collocation points
};

/// Dense mode-coupling tensor T(i,j,k,l) = <e_i e_j e_k, e_l>; the direct
/// O(M^3) summation backend.
class CubicCoupling {
public:
    explicit CubicCoupling(int modes);

    void apply(const SpectralField& w, double c0, SpectralField& out) const;

    double coupling(int i, int j, int k, int l) const;
    int modes() const { return modes_; }

private:
    int modes_ = 0;
    std::vector<double> t_;
};

}  // namespace srde
