#include "srde/spectral.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace srde {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

void Basis::validate() const {
    if (total_modes < 1) throw std::invalid_argument("basis: total_modes must be >= 1");
}

void validate_cutoff(SlowCutoff cutoff, int total_modes) {
    if (cutoff.n < 1) throw std::invalid_argument("slow cutoff must be >= 1");
    if (cutoff.n >= total_modes)
        throw std::invalid_argument("slow cutoff must be smaller than the truncation");
}

SpectralField SpectralField::unit(int modes, int mode, double amplitude) {
    if (mode < 1 || mode > modes) throw std::invalid_argument("unit: mode out of range");
    SpectralField f(modes);
    f.coeff(mode) = amplitude;
    return f;
}

double SpectralField::evaluate(double x) const {
    double sum = 0.0;
    for (int i = 1; i <= modes(); ++i) sum += coeff(i) * std::sin(i * x);
    return sum;
}

double SpectralField::norm() const {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return std::sqrt(s);
}

bool SpectralField::is_finite() const {
    for (double v : c_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

SpectralField project_slow(const SpectralField& w, SlowCutoff cutoff) {
    validate_cutoff(cutoff, w.modes());
    SpectralField out(w.modes());
    for (int i = 1; i <= cutoff.n; ++i) out.coeff(i) = w.coeff(i);
    return out;
}

SpectralField project_fast(const SpectralField& w, SlowCutoff cutoff) {
    validate_cutoff(cutoff, w.modes());
    SpectralField out(w.modes());
    for (int i = cutoff.n + 1; i <= w.modes(); ++i) out.coeff(i) = w.coeff(i);
    return out;
}

SpectralField apply_high_pass(const SpectralField& w, double eps, SlowCutoff cutoff,
                              const Basis& basis) {
    validate_cutoff(cutoff, w.modes());
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("high pass: eps must lie in [0,1]");
    SpectralField out(w.modes());
    for (int i = 1; i <= w.modes(); ++i) {
        const double scale = (i <= cutoff.n) ? eps : 1.0;
        out.coeff(i) = -scale * basis.eigenvalue(i) * w.coeff(i);
    }
    return out;
}

double sine_product_integral(std::span<const int> indices) {
    if (indices.size() < 2 || indices.size() > 4)
        throw std::invalid_argument("sine_product_integral: need 2 to 4 indices");
    for (int i : indices) {
        if (i < 1) throw std::invalid_argument("sine_product_integral: indices must be positive");
    }

    // Expand the product into a trigonometric polynomial. A product of an
    // even number of sines is a cosine sum, of an odd number a sine sum;
    // the map holds frequency -> coefficient in the current representation.
    std::map<int, double> terms{{indices[0], 1.0}};
    bool sin_form = true;

    for (std::size_t n = 1; n < indices.size(); ++n) {
        const int m = indices[n];
        std::map<int, double> next;
        auto add_cos = [&next](int k, double a) {
            next[std::abs(k)] += a;  // cos(-k) = cos(k)
        };
        auto add_sin = [&next](int k, double a) {
            if (k == 0) return;               // sin(0) = 0
            next[std::abs(k)] += (k < 0) ? -a : a;  // sin(-k) = -sin(k)
        };
        for (const auto& [k, a] : terms) {
            if (sin_form) {
                // sin(kx) sin(mx) = (cos((k-m)x) - cos((k+m)x)) / 2
                add_cos(k - m, 0.5 * a);
                add_cos(k + m, -0.5 * a);
            } else {
                // cos(kx) sin(mx) = (sin((k+m)x) - sin((k-m)x)) / 2
                add_sin(k + m, 0.5 * a);
                add_sin(k - m, -0.5 * a);
            }
        }
        terms = std::move(next);
        sin_form = !sin_form;
    }

    double integral = 0.0;  // plain integral over (0, pi)
    if (!sin_form) {
        // cosine sum: only the constant term survives
        auto it = terms.find(0);
        if (it != terms.end()) integral = it->second * kPi;
    } else {
        // sine sum: integral sin(kx) = (1 - cos(k pi)) / k
        for (const auto& [k, a] : terms) {
            if (k != 0 && k % 2 != 0) integral += a * 2.0 / k;
        }
    }
    return integral * 2.0 / kPi;
}

double sine_product_integral(std::initializer_list<int> indices) {
    return sine_product_integral(std::span<const int>(indices.begin(), indices.size()));
}

CubicEvaluator::CubicEvaluator(int modes) : modes_(modes), points_(2 * modes) {
    if (modes < 1) throw std::invalid_argument("cubic evaluator: modes must be >= 1");
    table_.resize(static_cast<std::size_t>(points_) * modes_);
    values_.resize(static_cast<std::size_t>(points_));
    const double h = kPi / (points_ + 1);
    for (int j = 0; j < points_; ++j) {
        for (int i = 0; i < modes_; ++i) {
            table_[static_cast<std::size_t>(j) * modes_ + i] = std::sin((i + 1) * (j + 1) * h);
        }
    }
}

void CubicEvaluator::apply(const SpectralField& w, double c0, SpectralField& out) {
    if (out.modes() != modes_) out = SpectralField(modes_);
    apply(w.coeffs(), c0, out.coeffs());
}

void CubicEvaluator::apply(std::span<const double> coeffs, double c0, std::span<double> out) {
    if (static_cast<int>(coeffs.size()) != modes_ || static_cast<int>(out.size()) != modes_)
        throw std::invalid_argument("cubic evaluator: size mismatch");
    for (int j = 0; j < points_; ++j) {
        const double* row = &table_[static_cast<std::size_t>(j) * modes_];
        double v = 0.0;
        for (int i = 0; i < modes_; ++i) v += row[i] * coeffs[static_cast<std::size_t>(i)];
        values_[static_cast<std::size_t>(j)] = v * v * v;
    }
    const double scale = -c0 * 2.0 / (points_ + 1);
    for (int i = 0; i < modes_; ++i) {
        double b = 0.0;
        for (int j = 0; j < points_; ++j)
            b += table_[static_cast<std::size_t>(j) * modes_ + i] * values_[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = scale * b;
    }
}

CubicCoupling::CubicCoupling(int modes) : modes_(modes) {
    if (modes < 1) throw std::invalid_argument("cubic coupling: modes must be >= 1");
    const std::size_t m = static_cast<std::size_t>(modes);
    t_.resize(m * m * m * m);
    for (int i = 1; i <= modes; ++i)
        for (int j = 1; j <= modes; ++j)
            for (int k = 1; k <= modes; ++k)
                for (int l = 1; l <= modes; ++l) {
                    const int idx[4] = {i, j, k, l};
                    t_[(((static_cast<std::size_t>(i - 1) * m) + (j - 1)) * m + (k - 1)) * m +
                       (l - 1)] = sine_product_integral(std::span<const int>(idx, 4));
                }
}

double CubicCoupling::coupling(int i, int j, int k, int l) const {
    const std::size_t m = static_cast<std::size_t>(modes_);
    return t_[(((static_cast<std::size_t>(i - 1) * m) + (j - 1)) * m + (k - 1)) * m + (l - 1)];
}

void CubicCoupling::apply(const SpectralField& w, double c0, SpectralField& out) const {
    if (w.modes() != modes_) throw std::invalid_argument("cubic coupling: size mismatch");
    if (out.modes() != modes_) out = SpectralField(modes_);
    for (int l = 1; l <= modes_; ++l) {
        double sum = 0.0;
        for (int i = 1; i <= modes_; ++i) {
            const double wi = w.coeff(i);
            if (wi == 0.0) continue;
            for (int j = 1; j <= modes_; ++j) {
                const double wij = wi * w.coeff(j);
                if (wij == 0.0) continue;
                for (int k = 1; k <= modes_; ++k) sum += wij * w.coeff(k) * coupling(i, j, k, l);
            }
        }
        out.coeff(l) = -c0 * sum;
    }
}

SpectralField cubic_galerkin(const SpectralField& w, double c0, CubicBackend backend) {
    SpectralField out(w.modes());
    if (backend == CubicBackend::Collocation) {
        CubicEvaluator eval(w.modes());
        eval.apply(w, c0, out);
    } else {
        CubicCoupling coupling(w.modes());
        coupling.apply(w, c0, out);
    }
    return out;
}

}  // namespace srde
