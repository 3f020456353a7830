#include <doctest.h>

#include <cmath>

#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"

using namespace kgl;
using quad::cplx;

TEST_CASE("Gauss-Kronrod integrates polynomials exactly")
{
    auto f = [](double x) -> cplx { return std::pow(x, 20); };
    const auto e = quad::gauss_kronrod(f, 0.0, 1.0);
    CHECK(e.value.real() == doctest::Approx(1.0 / 21.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature of smooth and peaked integrands")
{
    auto s = [](double x) -> cplx { return std::sin(x); };
    CHECK(quad::adaptive(s, 0.0, M_PI, 1e-14).value.real() == doctest::Approx(2.0).epsilon(1e-13));
    auto g = [](double x) -> cplx { return std::exp(-1e4 * x * x); };
    CHECK(quad::adaptive(g, -1.0, 1.0, 1e-14).value.real() == doctest::Approx(std::sqrt(M_PI) / 100.0).epsilon(1e-10));
}

TEST_CASE("Wynn epsilon accelerates the alternating harmonic series")
{
    quad::Epsilon eps;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
        s += (k % 2 ? 1.0 : -1.0) / k;
        eps.add(s);
    }
    CHECK(std::abs(s - std::log(2.0)) > 1e-2);
    CHECK(std::abs(eps.estimate().real() - std::log(2.0)) < 1e-10);
}

TEST_CASE("J_1 tail integral reproduces J_0 at the lower limit")
{
    for (double a : { 0.0, 1.0, 7.3, 40.0 }) {
        quad::IntegralSpec sp;
        sp.form = quad::Form::j1;
        sp.lower = a;
        sp.target_error = 1e-13;
        const auto res = quad::integrate_bessel_weighted(sp);
        CHECK(res.value.real() == doctest::Approx(specfun::bessel_j0(a)).epsilon(1e-11));
        CHECK(res.error_estimate <= 1e-11);
    }
}

TEST_CASE("static Hankel integral equals e^{-r}/r and the J_1 form gives the same value")
{
    for (double r : { 0.5, 1.0, 3.0, 8.0 }) {
        quad::IntegralSpec y;
        y.form = quad::Form::yukawa;
        y.r = r;
        y.target_error = 1e-13;
        const double right = quad::integrate_bessel_weighted(y).value.real();
        quad::IntegralSpec c = y;
        c.form = quad::Form::c1;
        const double left = 1.0 / r - quad::integrate_bessel_weighted(c).value.real();
        CAPTURE(r);
        CHECK(std::abs(left - right) < 1e-8);
        CHECK(right == doctest::Approx(std::exp(-r) / r).epsilon(1e-9));
        CHECK(right <= std::pow(r, -1.5) + 1e-15);
    }
}

TEST_CASE("finite upper limit matches direct adaptive integration")
{
    quad::IntegralSpec sp;
    sp.form = quad::Form::c1;
    sp.r = 2.0;
    sp.lower = 1.0;
    sp.upper = 30.0;
    sp.target_error = 1e-13;
    auto f = [](double s) -> cplx { return specfun::bessel_j1(s) / std::sqrt(4.0 + s * s); };
    double ref = 0.0;
    for (int i = 0; i < 29; ++i) ref += quad::adaptive(f, 1.0 + i, 2.0 + i, 1e-15).value.real();
    CHECK(quad::integrate_bessel_weighted(sp).value.real() == doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("fractional forms refuse Re alpha >= 5/2")
{
    quad::IntegralSpec sp;
    sp.form = quad::Form::fractional;
    sp.r = 1.0;
    sp.t = 3.0;
    sp.alpha = 2.6;
    sp.lower = std::sqrt(8.0);
    CHECK_THROWS_AS(quad::integrate_bessel_weighted(sp), quad::convergence_error);
    sp.alpha = -0.1;
    CHECK_THROWS_AS(quad::integrate_bessel_weighted(sp), std::domain_error);
}

TEST_CASE("tail bounds: power envelope scaling and monotonicity")
{
    CHECK(quad::power_tail_bound(100.0, 1.5) == doctest::Approx(0.2));
    CHECK(quad::power_tail_bound(100.0, 1.5) / quad::power_tail_bound(200.0, 1.5) >= std::sqrt(2.0) - 1e-12);
    CHECK_THROWS_AS(quad::power_tail_bound(1.0, 1.0), std::domain_error);

    quad::IntegralSpec sp;
    sp.form = quad::Form::j1;
    double prev = 1e300;
    for (double T = 1.0; T < 500.0; T *= 1.3) {
        const double b = quad::oscillatory_tail_bound(T, sp);
        CHECK(b <= prev);
        CHECK(b >= std::abs(specfun::bessel_j0(T)));
        prev = b;
    }
    // at a zero of J_0 the true tail vanishes; the bound is at most the next half-oscillation envelope
    const double z = specfun::bessel_zero(0, 10);
    CHECK(quad::oscillatory_tail_bound(z, sp) <= 2.0 * std::sqrt(2.0 / (M_PI * z)));
}

TEST_CASE("argument validation")
{
    quad::IntegralSpec sp;
    sp.lower = -1.0;
    CHECK_THROWS_AS(quad::integrate_bessel_weighted(sp), std::domain_error);
    sp.lower = 0.0;
    sp.target_error = 0.0;
    CHECK_THROWS_AS(quad::integrate_bessel_weighted(sp), std::domain_error);
}
