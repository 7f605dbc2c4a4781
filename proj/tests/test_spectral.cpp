#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "srde/rng.hpp"
#include "srde/spectral.hpp"

using namespace srde;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    double sum = f(a) + f(b);
    const double h = (b - a) / intervals;
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

SpectralField random_field(int modes, SeededRng& rng) {
    SpectralField w(modes);
    for (int i = 1; i <= modes; ++i) w.coeff(i) = rng.normal();
    return w;
}

// Quadrature oracle for the Galerkin coefficients of -c0 w^3.
double cubic_coefficient_quadrature(const SpectralField& w, double c0, int mode) {
    return 2.0 / kPi *
           simpson(
               [&](double x) {
                   const double v = w.evaluate(x);
                   return -c0 * v * v * v * std::sin(mode * x);
               },
               0.0, kPi, 20000);
}

}  // namespace

TEST_CASE("sine product integrals: orthonormality") {
    CHECK(sine_product_integral({1, 1}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sine_product_integral({1, 2}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sine_product_integral({4, 4}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sine product integrals: known values") {
    // <e1^2, e2^2> = 1/2 drives the sigma^2/4 Landau coefficient.
    CHECK(sine_product_integral({1, 1, 2, 2}) == doctest::Approx(0.5).epsilon(1e-14));
    // <e1^3, e1> = 3/4 drives the cubic Landau coefficient.
    CHECK(sine_product_integral({1, 1, 1, 1}) == doctest::Approx(0.75).epsilon(1e-14));
    // <e2^3, e1> = 0: the pure fast cubic does not force the fundamental.
    CHECK(sine_product_integral({2, 2, 2, 1}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sine product integrals match Simpson quadrature") {
    double worst = 0.0;
    for (int a = 1; a <= 6; ++a)
        for (int b = a; b <= 6; ++b)
            for (int c = b; c <= 7; ++c)
                for (int d = c; d <= 7; ++d) {
                    const int t2[2] = {a, b};
                    const int t3[3] = {a, b, c};
                    const int t4[4] = {a, b, c, d};
                    for (auto span : {std::span<const int>(t2, 2), std::span<const int>(t3, 3),
                                      std::span<const int>(t4, 4)}) {
                        const double exact = sine_product_integral(span);
                        const double quad = 2.0 / kPi * simpson(
                                                [&](double x) {
                                                    double p = 1.0;
                                                    for (int i : span) p *= std::sin(i * x);
                                                    return p;
                                                },
                                                0.0, kPi, 10000);
                        worst = std::max(worst, std::abs(exact - quad));
                    }
                }
    CHECK(worst <= 1e-10);
}

TEST_CASE("sine product integrals reject bad input") {
    CHECK_THROWS_AS(sine_product_integral({1}), std::invalid_argument);
    CHECK_THROWS_AS(sine_product_integral({1, 2, 3, 4, 5}), std::invalid_argument);
    CHECK_THROWS_AS(sine_product_integral({0, 1}), std::invalid_argument);
}

TEST_CASE("projections split and reassemble") {
    SpectralField w(4);
    w.coeff(1) = 1.0;
    w.coeff(2) = 1.0;
    const SpectralField slow = project_slow(w, SlowCutoff{1});
    const SpectralField fast = project_fast(w, SlowCutoff{1});
    CHECK(slow.coeff(1) == 1.0);
    CHECK(slow.coeff(2) == 0.0);
    CHECK(fast.coeff(1) == 0.0);
    CHECK(fast.coeff(2) == 1.0);

    const SpectralField zero(4);
    CHECK(project_slow(zero, SlowCutoff{2}).norm() == 0.0);

    SeededRng rng(11, 0);
    for (int rep = 0; rep < 16; ++rep) {
        const SpectralField v = random_field(8, rng);
        const SpectralField p = project_slow(v, SlowCutoff{3});
        const SpectralField q = project_fast(v, SlowCutoff{3});
        double inner = 0.0;
        for (int i = 1; i <= 8; ++i) {
            CHECK(p.coeff(i) + q.coeff(i) == v.coeff(i));  // exact reassembly
            CHECK(project_slow(p, SlowCutoff{3}).coeff(i) == p.coeff(i));
            CHECK(project_fast(q, SlowCutoff{3}).coeff(i) == q.coeff(i));
            inner += p.coeff(i) * q.coeff(i);
        }
        CHECK(inner == 0.0);
    }
}

TEST_CASE("projections reject an invalid cutoff") {
    SpectralField w(4);
    CHECK_THROWS_AS(project_slow(w, SlowCutoff{4}), std::invalid_argument);
    CHECK_THROWS_AS(project_fast(w, SlowCutoff{9}), std::invalid_argument);
    CHECK_THROWS_AS(project_slow(w, SlowCutoff{0}), std::invalid_argument);
}

TEST_CASE("high pass operator") {
    const Basis plain{4, 0.0};

    SUBCASE("eps = 1 is the full operator") {
        SeededRng rng(3, 0);
        const SpectralField w = random_field(4, rng);
        const SpectralField out = apply_high_pass(w, 1.0, SlowCutoff{2}, plain);
        for (int i = 1; i <= 4; ++i)
            CHECK(out.coeff(i) == doctest::Approx(-plain.eigenvalue(i) * w.coeff(i)));
    }
    SUBCASE("eps = 0 annihilates the slow modes") {
        SeededRng rng(4, 0);
        const SpectralField w = random_field(4, rng);
        const SpectralField out = apply_high_pass(w, 0.0, SlowCutoff{2}, plain);
        CHECK(out.coeff(1) == 0.0);
        CHECK(out.coeff(2) == 0.0);
        CHECK(out.coeff(3) != 0.0);
    }
    SUBCASE("diagonal scaling") {
        const SpectralField e1 = SpectralField::unit(4, 1);
        const SpectralField out = apply_high_pass(e1, 0.5, SlowCutoff{1}, plain);
        CHECK(out.coeff(1) == doctest::Approx(-0.5));
    }
    SUBCASE("linear in the field") {
        SeededRng rng(5, 0);
        const SpectralField u = random_field(4, rng);
        const SpectralField v = random_field(4, rng);
        SpectralField sum(4);
        for (int i = 1; i <= 4; ++i) sum.coeff(i) = 2.0 * u.coeff(i) - 3.0 * v.coeff(i);
        const SpectralField lhs = apply_high_pass(sum, 0.3, SlowCutoff{1}, plain);
        const SpectralField au = apply_high_pass(u, 0.3, SlowCutoff{1}, plain);
        const SpectralField av = apply_high_pass(v, 0.3, SlowCutoff{1}, plain);
        for (int i = 1; i <= 4; ++i)
            CHECK(lhs.coeff(i) == doctest::Approx(2.0 * au.coeff(i) - 3.0 * av.coeff(i)));
    }
    SUBCASE("eps out of range") {
        SpectralField w(4);
        CHECK_THROWS_AS(apply_high_pass(w, -0.1, SlowCutoff{1}, plain), std::invalid_argument);
        CHECK_THROWS_AS(apply_high_pass(w, 1.5, SlowCutoff{1}, plain), std::invalid_argument);
    }
}

TEST_CASE("cubic galerkin: zero and single mode") {
    const SpectralField zero(8);
    CHECK(cubic_galerkin(zero, 1.0).norm() == 0.0);

    const double amp = 1.3;
    SpectralField w(8);
    w.coeff(1) = amp;
    const SpectralField out = cubic_galerkin(w, 1.0);
    // <e1^3, e1> = 3/4, so the fundamental receives -(3/4) A^3.
    CHECK(out.coeff(1) == doctest::Approx(-0.75 * amp * amp * amp).epsilon(1e-12));
    CHECK(out.coeff(1) ==
          doctest::Approx(cubic_coefficient_quadrature(w, 1.0, 1)).epsilon(1e-9));
}

TEST_CASE("cubic galerkin matches quadrature for a mixed field") {
    SpectralField w(6);
    w.coeff(1) = 1.0;
    w.coeff(2) = 1.0;
    const SpectralField out = cubic_galerkin(w, 0.7);
    for (int mode = 1; mode <= 6; ++mode)
        CHECK(out.coeff(mode) ==
              doctest::Approx(cubic_coefficient_quadrature(w, 0.7, mode)).epsilon(1e-8));
}

TEST_CASE("cubic galerkin backends agree") {
    SeededRng rng(17, 0);
    for (int modes : {3, 5, 8}) {
        for (int rep = 0; rep < 8; ++rep) {
            const SpectralField w = random_field(modes, rng);
            const SpectralField a = cubic_galerkin(w, 1.0, CubicBackend::Collocation);
            const SpectralField b = cubic_galerkin(w, 1.0, CubicBackend::ModeCoupling);
            double scale = std::max(1.0, a.norm());
            for (int i = 1; i <= modes; ++i)
                CHECK(std::abs(a.coeff(i) - b.coeff(i)) / scale <= 1e-10);
        }
    }
}

TEST_CASE("field evaluation and Parseval norm") {
    SpectralField w(3);
    w.coeff(1) = 2.0;
    w.coeff(3) = -1.0;
    CHECK(w.evaluate(kPi / 2) == doctest::Approx(2.0 + 1.0));
    const double l2 = 2.0 / kPi * simpson([&](double x) { const double v = w.evaluate(x); return v * v; },
                                          0.0, kPi, 4000);
    CHECK(w.norm() * w.norm() == doctest::Approx(l2).epsilon(1e-10));
}
