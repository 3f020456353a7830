#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"
#include "support.hpp"

using namespace kgl;
constexpr double pi = 3.14159265358979323846;

TEST_CASE("J_n matches the 50-digit reference table across all evaluation regimes")
{
    const auto rows = testsupport::read_csv("bessel_reference.csv");
    REQUIRE(rows.size() == 140);
    for (const auto& r : rows) {
        const int n = int(r[0]);
        CAPTURE(n);
        CAPTURE(r[1]);
        CHECK(std::abs(specfun::bessel_j(n, r[1]) - r[2]) < 1e-14);
    }
}

TEST_CASE("J_0 and J_1 shortcuts agree with the general routine")
{
    for (double x : testsupport::linspace(0.0, 60.0, 241)) {
        CHECK(specfun::bessel_j0(x) == doctest::Approx(specfun::bessel_j(0, x)).epsilon(1e-13));
        CHECK(specfun::bessel_j1(x) == doctest::Approx(specfun::bessel_j(1, x)).epsilon(1e-13));
    }
}

TEST_CASE("three-term recurrence holds at random arguments")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.05, 300.0);
    double worst = 0.0;
    for (int trial = 0; trial < 400; ++trial) {
        const double x = ux(rng);
        for (int n = 1; n <= 25; ++n) {
            const double res = specfun::bessel_j(n - 1, x) + specfun::bessel_j(n + 1, x) - 2.0 * n / x * specfun::bessel_j(n, x);
            worst = std::max(worst, std::abs(res));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("|J_n| <= 1 and J_n(0) = delta_n0")
{
    CHECK(specfun::bessel_j(0, 0.0) == 1.0);
    for (int n = 1; n < 10; ++n) CHECK(specfun::bessel_j(n, 0.0) == 0.0);
    for (int n = 0; n <= 30; ++n)
        for (double x : testsupport::linspace(0.0, 200.0, 801)) CHECK(std::abs(specfun::bessel_j(n, x)) <= 1.0);
}

TEST_CASE("sqrt(x) |J_n(x)| / <n>^{1/2} stays below 2 on [1, 1e4]")
{
    for (int n = 0; n <= 2; ++n) {
        double worst = 0.0;
        for (double x : testsupport::logspace(1.0, 1e4, 4000))
            worst = std::max(worst, std::abs(specfun::bessel_j(n, x)) * std::sqrt(x) / std::sqrt(1.0 + n * n));
        CAPTURE(n);
        CHECK(worst <= 2.0);
    }
}

TEST_CASE("integral of J_1 over [0, T] equals 1 - J_0(T)")
{
    for (double T : { 10.0, 50.0, 200.0 }) {
        auto f = [](double x) -> quad::cplx { return specfun::bessel_j1(x); };
        double acc = 0.0;
        const int panels = int(std::ceil(T / pi));
        for (int i = 0; i < panels; ++i) acc += quad::adaptive(f, T * i / panels, T * (i + 1) / panels, 1e-15).value.real();
        CHECK(std::abs(acc + specfun::bessel_j0(T) - 1.0) < 1e-9);
        CHECK(specfun::j1_tail_integral(T) == doctest::Approx(specfun::bessel_j0(T)).epsilon(1e-14));
    }
}

TEST_CASE("slow integral representation agrees with the fast path")
{
    for (int n : { 0, 1, 4 })
        for (double x : { 0.3, 3.0, 13.0, 40.0 }) CHECK(std::abs(specfun::bessel_j_integral(n, x) - specfun::bessel_j(n, x)) < 1e-10);
}

TEST_CASE("J_1(z)/z is smooth through the origin")
{
    CHECK(specfun::j1_over_z(0.0) == 0.5);
    CHECK(specfun::j1_over_z(1e-8) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(specfun::j1_over_z(3.0) == doctest::Approx(specfun::bessel_j1(3.0) / 3.0).epsilon(1e-14));
}

TEST_CASE("Y_0 and Y_1 agree with Boost")
{
    for (double x : { 0.01, 0.5, 1.0, 5.0, 11.9, 12.1, 17.5, 40.0, 300.0 }) {
        CHECK(specfun::bessel_y0(x) == doctest::Approx(boost::math::cyl_neumann(0, x)).epsilon(1e-12));
        CHECK(specfun::bessel_y1(x) == doctest::Approx(boost::math::cyl_neumann(1, x)).epsilon(1e-12));
    }
}

TEST_CASE("Hankel functions: real axis and imaginary axis")
{
    for (double x : { 0.5, 4.0, 30.0 }) {
        const auto hp = specfun::hankel_h1_plus({ x, 0.0 });
        const auto hm = specfun::hankel_h1_minus({ x, 0.0 });
        CHECK(hp.real() == doctest::Approx(specfun::bessel_j1(x)).epsilon(1e-13));
        CHECK(hp.imag() == doctest::Approx(specfun::bessel_y1(x)).epsilon(1e-13));
        CHECK(hm == std::conj(hp));
    }
    // H_1^{(1)}(i y) = -(2/pi) K_1(y)
    for (double y : { 0.3, 2.0, 10.0, 25.0 }) {
        const auto h = specfun::hankel_h1_plus({ 0.0, y });
        const double k = -2.0 / pi * boost::math::cyl_bessel_k(1, y);
        CHECK(h.real() == doctest::Approx(k).epsilon(1e-10));
        CHECK(std::abs(h.imag()) < 1e-12);
    }
    // complex argument: Wronskian-free check via the series at small |z| against the
    // asymptotic branch at the crossover
    const std::complex<double> z1(16.9, 0.4), z2(17.1, 0.4);
    const auto a = specfun::hankel_h1_plus(z1), b = specfun::hankel_h1_plus(z2);
    CHECK(std::abs(b - a) < 0.05);
}

TEST_CASE("Bessel zeros are roots")
{
    for (int k = 1; k <= 20; ++k) {
        CHECK(std::abs(specfun::bessel_j0(specfun::bessel_zero(0, k))) < 1e-13);
        CHECK(std::abs(specfun::bessel_j1(specfun::bessel_zero(1, k))) < 1e-13);
    }
    CHECK(specfun::bessel_zero(0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-14));
}

TEST_CASE("complex Gamma: factorials, reflection and Boost on the real line")
{
    CHECK(specfun::gamma(5.0).real() == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(specfun::gamma(0.5).real() == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    for (double x : { 0.1, 1.7, 3.3, 7.9, -0.5, -2.3 }) CHECK(specfun::gamma(x).real() == doctest::Approx(boost::math::tgamma(x)).epsilon(1e-12));
    for (std::complex<double> z : { std::complex<double>(0.3, 0.7), { 1.2, -2.0 }, { -0.4, 1.1 } }) {
        const auto lhs = specfun::gamma(z) * specfun::gamma(1.0 - z);
        const auto rhs = pi / std::sin(pi * z);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
        CHECK(std::abs(specfun::gamma(z + 1.0) - z * specfun::gamma(z)) < 1e-12 * std::abs(specfun::gamma(z + 1.0)));
    }
}
