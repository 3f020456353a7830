#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "kgl/kernels.hpp"
#include "kgl/quadrature.hpp"
#include "kgl/spectral.hpp"
#include "support.hpp"

using namespace kgl;
using namespace kgl::spectral;
constexpr double pi = 3.14159265358979323846;

namespace {
std::vector<double> gaussian_profile(const RadialGrid1D& g, double width = 1.0)
{
    std::vector<double> f(g.N);
    for (int j = 0; j < g.N; ++j) f[j] = std::exp(-(g.r(j) / width) * (g.r(j) / width));
    return f;
}
}

TEST_CASE("grid and potential construction")
{
    const auto g = RadialGrid1D::make(10.0, 99);
    CHECK(g.h == doctest::Approx(0.1));
    CHECK(g.r(0) == doctest::Approx(0.1));
    CHECK(g.r(98) == doctest::Approx(9.9));
    CHECK_THROWS_AS(RadialGrid1D::make(-1.0, 99), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid1D::make(1.0, 4), std::invalid_argument);

    CHECK(PotentialSpec::gaussian(-8.0, 2.0)(2.0) == doctest::Approx(-8.0 * std::exp(-1.0)));
    CHECK(PotentialSpec::box(3.0, 1.0)(0.5) == 3.0);
    CHECK(PotentialSpec::box(3.0, 1.0)(1.5) == 0.0);
    CHECK_THROWS_AS(PotentialSpec::gaussian(1.0, 0.0), std::invalid_argument);

    const auto path = std::filesystem::temp_directory_path() / "kgl_potential_table.txt";
    {
        std::ofstream out(path);
        out << "0 -2\n1 -1\n2 0\n";
    }
    const auto tab = PotentialSpec::from_file(path.string());
    CHECK(tab(0.5) == doctest::Approx(-1.5));
    CHECK(tab(5.0) == 0.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(PotentialSpec::from_file("/nonexistent/table"), std::invalid_argument);
}

TEST_CASE("orthonormal sine transform is an involution and preserves l^2")
{
    SineBasis S(255);
    std::vector<double> x(255), y(255), z(255);
    for (int i = 0; i < 255; ++i) x[i] = std::sin(0.37 * i) + 0.1 * i;
    S.apply(x.data(), y.data());
    S.apply(y.data(), z.data());
    double e = 0.0, nx = 0.0, ny = 0.0;
    for (int i = 0; i < 255; ++i) {
        e = std::max(e, std::abs(z[i] - x[i]));
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    CHECK(e < 1e-12);
    CHECK(ny == doctest::Approx(nx).epsilon(1e-12));
}

TEST_CASE("free Hamiltonian has the exact Dirichlet spectrum")
{
    const auto g = RadialGrid1D::make(20.0, 255);
    const auto H = build_hamiltonian(PotentialSpec::zero(), g);
    CHECK(H.negative.empty());
    CHECK_FALSE(H.resonance_flag);
    for (int k = 0; k < 255; k += 17) CHECK(H.mu[k] == doctest::Approx(std::pow(pi * (k + 1) / g.R, 2)).epsilon(1e-10));
    CHECK(H.orthonormality_error() < 1e-12);
}

TEST_CASE("bound states of Gaussian wells: pseudospectral and finite-difference Laplacians agree")
{
    const auto g = RadialGrid1D::make(30.0, 1023);
    for (const auto& pot : { PotentialSpec::gaussian(-8.0, 1.0), PotentialSpec::gaussian(-12.0, 1.5) }) {
        const auto Hs = build_hamiltonian(pot, g);
        const auto Hf = build_hamiltonian(pot, g, Laplacian::finite_difference);
        REQUIRE(Hs.negative.size() == Hf.negative.size());
        for (int k : Hs.negative) CHECK(Hs.mu[k] == doctest::Approx(Hf.mu[k]).epsilon(2e-3));
        CHECK(Hs.orthonormality_error() < 1e-12);
        CHECK(Hs.pc_idempotence_error() < 1e-12);
    }
    const auto H8 = build_hamiltonian(PotentialSpec::gaussian(-8.0, 1.0), g);
    REQUIRE(H8.negative.size() == 1);
    CHECK(H8.mu[0] == doctest::Approx(-1.5678).epsilon(1e-3));
}

TEST_CASE("resonance proxy fires at the critical Gaussian coupling only")
{
    const auto g = RadialGrid1D::make(64.0, 1023);
    CHECK(build_hamiltonian(PotentialSpec::gaussian(-2.684, 1.0), g).resonance_flag);
    CHECK_FALSE(build_hamiltonian(PotentialSpec::gaussian(-2.0, 1.0), g).resonance_flag);
    CHECK_FALSE(build_hamiltonian(PotentialSpec::gaussian(-3.0, 1.0), g).resonance_flag);
}

TEST_CASE("free sine evolution equals convolution with the kernel (wave part plus Bessel part)")
{
    const auto g = RadialGrid1D::make(60.0, 2047);
    const auto f = gaussian_profile(g);
    const double t = 5.0;
    const auto F = evolve_free(g, f, 0.5, kernels::Kind::S, { t });
    auto fr = [](double s) { return std::exp(-s * s); };
    double num = 0.0, den = 0.0;
    for (double r : testsupport::linspace(0.25, 9.0, 36)) {
        // sgn(t) delta(|t|-rho)/(4 pi rho): Kirchhoff spherical mean
        auto sf = [&](double s) -> quad::cplx { return s * fr(s); };
        double u = quad::adaptive(sf, std::abs(r - t), r + t, 1e-14).value.real() / (2.0 * r);
        // Bessel part: (2 pi / r) int s f(s) int_{|r-s|}^{min(r+s, t)} B(rho, t) rho drho ds
        auto outer = [&](double s) -> quad::cplx {
            const double a = std::abs(r - s), b = std::min(r + s, t);
            if (b <= a) return 0.0;
            auto inner = [&](double rho) -> quad::cplx { return kernels::sine_bessel_part(rho, t) * rho; };
            return s * fr(s) * quad::adaptive(inner, a, b, 1e-13).value;
        };
        u += 2.0 * pi / r * quad::adaptive(outer, 0.0, 7.0, 1e-12).value.real();
        const double ref = u;
        // interpolate the grid solution linearly to r
        const double x = r / g.h - 1.0;
        const int j0 = int(std::floor(x));
        const double th = x - j0;
        const double v = (1.0 - th) * F.at(0, j0).real() + th * F.at(0, j0 + 1).real();
        num += (v - ref) * (v - ref);
        den += ref * ref;
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("evolution at t = 0 and energy conservation")
{
    const auto g = RadialGrid1D::make(40.0, 511);
    const auto f = gaussian_profile(g);
    const auto S0 = evolve_free(g, f, 0.5, kernels::Kind::S, { 0.0 });
    for (int j = 0; j < g.N; ++j) CHECK(std::abs(S0.at(0, j)) < 1e-14);
    const auto C0 = evolve_free(g, f, 0.0, kernels::Kind::C, { 0.0 });
    for (int j = 0; j < g.N; j += 50) CHECK(C0.at(0, j).real() == doctest::Approx(f[j]).epsilon(1e-10));

    CauchyData d{ f, std::vector<double>(g.N, 0.0) };
    const auto sol = free_cauchy_evolution(g, d, { 0.0, 3.0, 10.0 });
    std::vector<double> e;
    for (size_t it = 0; it < 3; ++it) {
        std::vector<double> u(g.N), ut(g.N);
        for (int j = 0; j < g.N; ++j) {
            u[j] = sol.u.at(it, j).real();
            ut[j] = sol.ut.at(it, j).real();
        }
        e.push_back(energy_norm(g, u, ut));
    }
    CHECK(e[1] == doctest::Approx(e[0]).epsilon(1e-10));
    CHECK(e[2] == doctest::Approx(e[0]).epsilon(1e-10));
    CHECK(e[0] == doctest::Approx(d.norm_h1l2(g)).epsilon(1e-10));
}

TEST_CASE("under-resolved data is rejected")
{
    const auto g = RadialGrid1D::make(40.0, 63);
    CHECK_THROWS_AS(evolve_free(g, gaussian_profile(g, 0.2), 0.5, kernels::Kind::S, { 1.0 }), resolution_error);
}

TEST_CASE("a bound state with -1 < mu < 0 oscillates without decay unless projected out")
{
    const auto g = RadialGrid1D::make(30.0, 511);
    const auto H = build_hamiltonian(PotentialSpec::gaussian(-5.0, 1.0), g);
    REQUIRE(H.negative.size() == 1);
    const double mu = H.mu[0];
    REQUIRE(mu > -1.0);
    REQUIRE(mu < 0.0);
    std::vector<double> f(g.N);
    for (int j = 0; j < g.N; ++j) f[j] = H.mode(0)[j] / g.r(j);
    const auto times = testsupport::linspace(0.0, 60.0, 31);
    const auto free_mode = evolve_perturbed(H, f, 0.0, kernels::Kind::E, times, false).sup_in_space();
    for (double s : free_mode) CHECK(s == doctest::Approx(free_mode.front()).epsilon(1e-10));
    const auto cosine = evolve_perturbed(H, f, 0.0, kernels::Kind::C, { 0.0, pi / std::sqrt(1.0 + mu) }, false);
    for (int j = 0; j < g.N; j += 40) CHECK(cosine.at(1, j).real() == doctest::Approx(-f[j]).epsilon(1e-9));
    const auto projected = evolve_perturbed(H, f, 0.0, kernels::Kind::E, times, true).sup_in_space();
    for (double s : projected) CHECK(s < 1e-10 * free_mode.front());
    const auto deep = build_hamiltonian(PotentialSpec::gaussian(-12.0, 1.5), g);
    CHECK_THROWS_AS(evolve_perturbed(deep, gaussian_profile(g), 0.0, kernels::Kind::C, { 1.0 }, false), hypothesis_error);
}

TEST_CASE("perturbed cosine evolution with P_c decays like 1/t")
{
    const auto g = RadialGrid1D::make(64.0, 1023);
    const auto H = build_hamiltonian(PotentialSpec::gaussian(-8.0, 1.0), g);
    const auto f = gaussian_profile(g);
    const auto t = testsupport::logspace(2.0, 50.0, 25);
    const auto sup = evolve_perturbed(H, f, 1.0, kernels::Kind::C, t).sup_in_space();
    // t sup|u| on the late half of the log range never exceeds its early-half maximum by 20%
    double early = 0.0, late = 0.0;
    for (size_t i = 0; i < t.size(); ++i) (t[i] < 10.0 ? early : late) = std::max(t[i] < 10.0 ? early : late, t[i] * sup[i]);
    CHECK(late <= 1.2 * early);
}

TEST_CASE("free Bessel-part kernel from the spectral difference matches the closed form")
{
    const auto g = RadialGrid1D::make(100.0, 2047);
    const auto H = build_hamiltonian(PotentialSpec::zero(), g);
    const std::vector<int> idx{ int(std::lround(2.0 / g.h)) - 1 };
    const auto t = testsupport::linspace(3.0, 13.0, 41);
    const auto K = perturbed_bessel_kernel(H, idx, t);
    for (size_t i = 0; i < t.size(); ++i) CHECK(std::abs(K[i][0] - kernels::sine_bessel_part(g.r(idx[0]), t[i])) < 1e-6);
}

TEST_CASE("Agmon decay of bound states and preconditions")
{
    const auto g = RadialGrid1D::make(30.0, 1023);
    const auto H = build_hamiltonian(PotentialSpec::gaussian(-12.0, 1.5), g);
    REQUIRE(H.negative.size() == 2);
    for (int k : H.negative) {
        const auto a = agmon_check(H, k);
        CHECK(a.expected == doctest::Approx(-std::sqrt(-H.mu[k])));
        CHECK(std::abs(a.fit.exponent / a.expected - 1.0) < 0.05);
    }
    CHECK_THROWS_AS(agmon_check(H, 2), precondition_error);
    CHECK_THROWS_AS(agmon_check(H, g.N), std::out_of_range);
}

TEST_CASE("cosine multiplier identity: both sides agree, zero outside the cone")
{
    for (auto [r, t] : { std::pair{ 1.0, 3.0 }, { 0.5, 2.0 }, { 2.0, 5.0 }, { 3.0, 2.0 }, { 1.0, -3.0 } }) {
        const auto c = spectral_identity_check(r, t, 400.0);
        CAPTURE(r);
        CAPTURE(t);
        CHECK(std::abs(c.left - c.right) < 1e-3);
        CHECK(c.left_half_normalized == doctest::Approx(pi / 2.0 * c.left).epsilon(1e-12));
        if (r > std::abs(t)) CHECK(c.right == 0.0);
        else CHECK(c.right == doctest::Approx(4.0 * pi * kernels::sine_bessel_part(r, std::abs(t))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(spectral_identity_check(1.0, 0.0, 400.0), precondition_error);
    CHECK_THROWS_AS(spectral_identity_check(1.0, 1.001, 400.0), precondition_error);
}

TEST_CASE("Strichartz ratio check: admissibility and a short free run")
{
    const auto g = RadialGrid1D::make(64.0, 511);
    const auto data = random_bump_data(g, 99, 2);
    CHECK(data == random_bump_data(g, 99, 2));
    CHECK(data != random_bump_data(g, 100, 2));
    CHECK_THROWS_AS(strichartz_norm_check(nullptr, g, data, 2.0, 4.0, { 10.0 }, 0.1), precondition_error);
    const auto rep = strichartz_norm_check(nullptr, g, data, 2.0, 6.0, { 20.0, 40.0 }, 0.1);
    CHECK(rep.sigma == doctest::Approx(5.0 / 12.0));
    CHECK(rep.ratios.size() == 2);
    CHECK(rep.max_growth < 0.1);
    for (const auto& r : rep.ratios) CHECK(r[1] >= r[0]);
}
