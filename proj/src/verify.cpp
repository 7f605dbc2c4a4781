#include "srde/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

#include "srde/reduced.hpp"
#include "srde/stats.hpp"

namespace srde {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    double sum = f(a) + f(b);
    const double h = (b - a) / intervals;
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

struct Reporter {
    std::ostream& out;
    bool all_ok = true;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        out << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << "\n";
        all_ok = all_ok && ok;
    }
};

ModelParams example_params(double sigma = 1.0, double gamma = 1.0) {
    ModelParams p;
    p.epsilon = 0.1;
    p.gamma = gamma;
    p.sigma = sigma;
    p.c0 = 1.0;
    p.cutoff.n = 1;
    p.basis = Basis{8, 1.0};
    p.spectrum = NoiseSpectrum::single_mode(8, 2, 1.0);
    return p;
}

bool projections_exact(SeededRng& rng) {
    const int m = 8;
    const SlowCutoff cutoff{3};
    for (int rep = 0; rep < 32; ++rep) {
        SpectralField w(m);
        for (int i = 1; i <= m; ++i) w.coeff(i) = rng.normal();
        const SpectralField slow = project_slow(w, cutoff);
        const SpectralField fast = project_fast(w, cutoff);
        double inner = 0.0;
        for (int i = 1; i <= m; ++i) {
            if (slow.coeff(i) + fast.coeff(i) != w.coeff(i)) return false;
            inner += slow.coeff(i) * fast.coeff(i);
            if (project_slow(slow, cutoff).coeff(i) != slow.coeff(i)) return false;
            if (project_fast(fast, cutoff).coeff(i) != fast.coeff(i)) return false;
        }
        if (inner != 0.0) return false;
    }
    return true;
}

double sine_vs_simpson_max_err() {
    double worst = 0.0;
    std::vector<std::vector<int>> tuples;
    for (int a = 1; a <= 6; ++a)
        for (int b = a; b <= 6; ++b) {
            tuples.push_back({a, b});
            for (int c = b; c <= 6; ++c) {
                tuples.push_back({a, b, c});
                for (int d = c; d <= 6; ++d) tuples.push_back({a, b, c, d});
            }
        }
    for (const auto& t : tuples) {
        const double exact = sine_product_integral(std::span<const int>(t.data(), t.size()));
        const double quad = 2.0 / kPi * simpson(
                                [&](double x) {
                                    double p = 1.0;
                                    for (int i : t) p *= std::sin(i * x);
                                    return p;
                                },
                                0.0, kPi, 10000);
        worst = std::max(worst, std::abs(exact - quad));
    }
    return worst;
}

bool ou_variance_ci(Reporter& rep) {
    // 3-sigma Monte Carlo interval at 1e5 stationary draws, one forced mode
    // in the example configuration and a multi-mode spectrum.
    bool ok = true;
    {
        const ModelParams p = example_params();
        SeededRng rng(2024, 7);
        const int n = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const OUState s = ou_stationary_sample(p, rng);
            const double v = s.values[1];
            sum += v;
            sum2 += v * v;
        }
        const double var = sum2 / n - (sum / n) * (sum / n);
        const double expect = p.sigma * p.sigma / 6.0;
        const double se = expect * std::sqrt(2.0 / n);
        ok = std::abs(var - expect) <= 3.0 * se;
        rep.check("ou stationary variance (single forced mode)", ok,
                  "var=" + std::to_string(var) + " expected=" + std::to_string(expect));
        if (!ok) return false;
    }
    {
        ModelParams p = example_params(0.8);
        p.spectrum = NoiseSpectrum::zero(8);
        p.spectrum.lambda(2) = 1.0;
        p.spectrum.lambda(3) = 0.4;
        p.spectrum.lambda(5) = 0.2;
        SeededRng rng(2024, 8);
        const int n = 100000;
        std::vector<double> sum2(8, 0.0);
        for (int k = 0; k < n; ++k) {
            const OUState s = ou_stationary_sample(p, rng);
            for (int i = 0; i < 8; ++i) sum2[static_cast<std::size_t>(i)] += s.values[static_cast<std::size_t>(i)] * s.values[static_cast<std::size_t>(i)];
        }
        for (int mode : {2, 3, 5}) {
            const double var = sum2[static_cast<std::size_t>(mode - 1)] / n;
            const double expect = p.sigma * p.sigma * p.spectrum.lambda(mode) /
                                  (2.0 * p.basis.eigenvalue(mode));
            const double se = expect * std::sqrt(2.0 / n);
            if (std::abs(var - expect) > 3.0 * se) ok = false;
        }
        rep.check("ou stationary variance (general spectrum)", ok);
    }
    return ok;
}

bool covariance_vs_closed_form(Reporter& rep) {
    double worst = 0.0;
    for (double amp : {0.0, 0.5, 1.0, 2.0}) {
        for (double sigma : {0.5, 1.0, 1.5}) {
            const ModelParams p = example_params(sigma);
            SpectralField u(8);
            u.coeff(1) = amp;
            const double quad = covariance_quadrature(u, p).matrix()(0, 0);
            const double closed = covariance_closed_single_mode(amp, sigma);
            const double scale = std::max({std::abs(quad), std::abs(closed), 1e-300});
            const double rel = (quad == closed) ? 0.0 : std::abs(quad - closed) / scale;
            worst = std::max(worst, rel);
        }
    }
    const bool ok = worst <= 1e-6;
    rep.check("covariance quadrature vs closed form", ok, "max rel err=" + std::to_string(worst));
    return ok;
}

bool landau_equilibrium(Reporter& rep) {
    const ModelParams p = example_params(1.0, 1.0);
    SpectralField u0(8);
    u0.coeff(1) = 0.5;
    const std::vector<AveragedState> traj = integrate_averaged(u0, p, 40.0, 1e-3, 1000);
    const double final_a = traj.back().slow(0);
    const bool ok = std::abs(final_a - 1.0) <= 1e-6;
    rep.check("averaged equation equilibrium", ok, "A(T)=" + std::to_string(final_a));
    return ok;
}

bool jacobian_vs_finite_difference(Reporter& rep) {
    ModelParams p = example_params(0.9);
    p.cutoff.n = 2;
    p.spectrum = NoiseSpectrum::zero(8);
    p.spectrum.lambda(3) = 0.7;
    p.spectrum.lambda(4) = 0.3;
    SeededRng rng(99, 0);
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 4; ++rep_i) {
        SpectralField u(8);
        for (int i = 1; i <= p.cutoff.n; ++i) u.coeff(i) = rng.normal();
        const Eigen::MatrixXd jac = averaged_derivative_drift(u, p);
        const double h = 1e-5;
        Eigen::MatrixXd fd(p.cutoff.n, p.cutoff.n);
        for (int j = 1; j <= p.cutoff.n; ++j) {
            SpectralField up = u, dn = u;
            up.coeff(j) += h;
            dn.coeff(j) -= h;
            const SpectralField dp = averaged_drift(up, p);
            const SpectralField dm = averaged_drift(dn, p);
            for (int i = 1; i <= p.cutoff.n; ++i)
                fd(i - 1, j - 1) = (dp.coeff(i) - dm.coeff(i)) / (2.0 * h);
        }
        const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
        worst = std::max(worst, (jac - fd).cwiseAbs().maxCoeff() / scale);
    }
    const bool ok = worst <= 1e-6;
    rep.check("drift jacobian vs finite differences", ok, "max rel err=" + std::to_string(worst));
    return ok;
}

}  // namespace

bool run_verification(std::ostream& out) {
    Reporter rep{out};
    SeededRng rng(4242, 0);
    rep.check("projection algebra exact", projections_exact(rng));
    {
        const double err = sine_vs_simpson_max_err();
        rep.check("sine product integrals vs Simpson", err <= 1e-10,
                  "max abs err=" + std::to_string(err));
    }
    ou_variance_ci(rep);
    covariance_vs_closed_form(rep);
    landau_equilibrium(rep);
    jacobian_vs_finite_difference(rep);
    out << (rep.all_ok ? "verification passed\n" : "verification FAILED\n");
    return rep.all_ok;
}

}  // namespace srde
