#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kgl/norms.hpp"
#include "support.hpp"

using namespace kgl;
using norms::LorentzSpec;

TEST_CASE("exponent specs parse and print")
{
    CHECK(LorentzSpec::parse("2").p == 2.0);
    CHECK(LorentzSpec::parse("2").q == 2.0);
    CHECK(std::isinf(LorentzSpec::parse("inf").p));
    const auto w = LorentzSpec::parse("4/3,inf");
    CHECK(w.p == doctest::Approx(4.0 / 3.0));
    CHECK(std::isinf(w.q));
    CHECK(LorentzSpec::parse("6,2").q == 2.0);
    CHECK_THROWS_AS(LorentzSpec::parse("abc"), std::invalid_argument);
    CHECK_THROWS_AS(LorentzSpec({ 0.5, 2.0 }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(LorentzSpec({ norms::inf, 2.0 }).validate(), std::invalid_argument);
}

TEST_CASE("indicator of a set of measure m has Lorentz norm (p/q)^{1/q} m^{1/p}")
{
    const std::vector<double> v(10, 1.0), w(10, 0.3);
    for (double p : { 1.0, 2.0, 4.0 / 3.0, 6.0 })
        for (double q : { 1.0, 2.0, 5.0 }) {
            CAPTURE(p);
            CAPTURE(q);
            CHECK(norms::lorentz_norm(v, w, { p, q }) == doctest::Approx(std::pow(p / q, 1.0 / q) * std::pow(3.0, 1.0 / p)).epsilon(1e-13));
        }
    CHECK(norms::lorentz_norm(v, w, LorentzSpec::weak(2.0)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(norms::lorentz_norm(v, w, LorentzSpec::lebesgue(norms::inf)) == 1.0);
}

TEST_CASE("q = p reproduces the weighted L^p sum; norms are rearrangement invariant and homogeneous")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.01, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(200), w(200);
        for (auto& x : v) x = nd(rng);
        for (auto& x : w) x = ud(rng);
        for (double p : { 1.0, 2.0, 3.5 }) {
            double s = 0.0;
            for (size_t i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p) * w[i];
            CHECK(norms::lorentz_norm(v, w, LorentzSpec::lebesgue(p)) == doctest::Approx(std::pow(s, 1.0 / p)).epsilon(1e-12));
        }
        std::vector<size_t> perm(v.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> v2(v.size()), w2(v.size()), v3(v.size());
        for (size_t i = 0; i < v.size(); ++i) {
            v2[i] = v[perm[i]];
            w2[i] = w[perm[i]];
            v3[i] = -2.5 * v[i];
        }
        for (const auto spec : { LorentzSpec{ 4.0, norms::inf }, LorentzSpec{ 6.0, 2.0 }, LorentzSpec{ 16.0 / 3.0, 2.0 } }) {
            const double n = norms::lorentz_norm(v, w, spec);
            CHECK(norms::lorentz_norm(v2, w2, spec) == doctest::Approx(n).epsilon(1e-13));
            CHECK(norms::lorentz_norm(v3, w, spec) == doctest::Approx(2.5 * n).epsilon(1e-13));
        }
    }
}

TEST_CASE("weak L^p quasi-norm of t^{-1/p} is 1")
{
    const auto t = testsupport::logspace(1e-6, 1e4, 20001);
    const auto w = norms::cell_measures(t);
    std::vector<double> v(t.size());
    for (size_t i = 0; i < t.size(); ++i) v[i] = std::pow(t[i], -0.5);
    CHECK(norms::lorentz_norm(v, w, LorentzSpec::weak(2.0)) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("weak-L^4 norm of the light-cone profile scales like r^{-5/4}")
{
    // F_r(t) = chi_{t > r} / (t (t^2 - r^2)^{1/4}) = r^{-3/2} F_1(t / r)
    const auto s = testsupport::logspace(1e-8, 1e3, 4001);
    auto norm_at = [&](double r) {
        std::vector<double> t(s.size()), v(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            t[i] = r * (1.0 + s[i]);
            v[i] = 1.0 / (t[i] * std::pow(t[i] * t[i] - r * r, 0.25));
        }
        return norms::lorentz_norm(v, norms::cell_measures(t), LorentzSpec::weak(4.0));
    };
    const double n1 = norm_at(1.0);
    CHECK(std::isfinite(n1));
    CHECK(n1 > 0.0);
    for (double r : { 2.0, 8.0, 40.0 }) CHECK(norm_at(r) / n1 == doctest::Approx(std::pow(r, -1.25)).epsilon(1e-12));
}

TEST_CASE("mixed norm of a separable field factorizes")
{
    const auto r = testsupport::linspace(0.1, 5.0, 50), t = testsupport::linspace(0.0, 3.0, 40);
    std::vector<double> a(r.size()), b(t.size()), f(r.size() * t.size());
    for (size_t i = 0; i < r.size(); ++i) a[i] = std::exp(-r[i]);
    for (size_t j = 0; j < t.size(); ++j) b[j] = 1.0 + std::sin(t[j]);
    for (size_t i = 0; i < r.size(); ++i)
        for (size_t j = 0; j < t.size(); ++j) f[i * t.size() + j] = a[i] * b[j];
    auto wr = norms::cell_measures(r);
    for (size_t i = 0; i < r.size(); ++i) wr[i] *= 4.0 * M_PI * r[i] * r[i];
    const LorentzSpec outer{ 6.0, 2.0 }, inner = LorentzSpec::lebesgue(norms::inf);
    const double expect = norms::lorentz_norm(a, wr, outer) * norms::lorentz_norm(b, norms::cell_measures(t), inner);
    CHECK(norms::mixed_norm(r, t, f, outer, inner) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(norms::mixed_norm({}, t, {}, outer, inner), norms::empty_input_error);
}

TEST_CASE("power-law fit recovers exact exponents and rejects thin ranges")
{
    const auto x = testsupport::logspace(2.0, 200.0, 20);
    std::vector<double> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * std::pow(x[i], -0.75);
    const auto fit = norms::fit_power_law(x, y);
    CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(fit.constant == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.max_residual < 1e-12);
    const auto narrow = testsupport::logspace(2.0, 10.0, 20);
    CHECK_THROWS_AS(norms::fit_power_law(narrow, std::vector<double>(20, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(norms::fit_power_law({ 1, 10 }, { 1, 1 }), std::invalid_argument);
    CHECK_THROWS_AS(norms::lorentz_norm(std::vector<double>{}, std::vector<double>{}, LorentzSpec::lebesgue(2.0)), norms::empty_input_error);
}

TEST_CASE("C_1 L^1_t decay scan: slope -1/2, independent of worker count")
{
    norms::ScanConfig cfg;
    cfg.kernel = "C1";
    cfg.spec = LorentzSpec::lebesgue(1.0);
    cfg.lo = 4.0;
    cfg.hi = 64.0;
    cfg.points_per_decade = 8;
    const auto a = norms::decay_scan(cfg);
    CHECK(a.fit.exponent == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(a.fit.exponent + 0.5) <= 0.1);
    cfg.jobs = 2;
    const auto b = norms::decay_scan(cfg);
    CHECK(a.fit.exponent == b.fit.exponent);
    cfg.max_residual = 1e-9;
    CHECK_THROWS_AS(norms::decay_scan(cfg), norms::fit_quality_error);
}
