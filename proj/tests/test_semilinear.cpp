#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "kgl/semilinear.hpp"

using namespace kgl;
using namespace kgl::semilinear;

namespace {
NonlinearConfig small_config(double eps)
{
    NonlinearConfig c;
    c.T = 10.0;
    c.dt = 0.01;
    c.R = 32.0;
    c.N = 511;
    c.epsilon = eps;
    return c;
}

double max_abs(const Field& u)
{
    double m = 0.0;
    for (const auto& v : u.values) m = std::max(m, std::abs(v));
    return m;
}
}

TEST_CASE("configuration validation")
{
    auto c = small_config(1e-2);
    CHECK_NOTHROW(c.validate());
    c.sign = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config(-1.0);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config(1e-2);
    c.dt = 20.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config(1e-2);
    c.forcing.amplitude = 1.0;
    c.forcing.width = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(small_config(1e-2).times().size() == 1001);
}

TEST_CASE("zero data without forcing stays zero")
{
    const auto c = small_config(0.0);
    const auto st = picard_iterate(c, gaussian_data(c.grid(), 0.0));
    CHECK(st.converged);
    CHECK(max_abs(st.u) == 0.0);
    CHECK(st.data_norm == 0.0);
    for (const auto& n : reversed_ledger(st.u, st.data_norm)) CHECK(n.ratio == 0.0);
}

TEST_CASE("Picard limit is a fixed point of the Duhamel map and agrees with Strang splitting")
{
    const auto c = small_config(0.2);
    const auto data = gaussian_data(c.grid(), c.epsilon);
    const auto st = picard_iterate(c, data);
    REQUIRE(st.converged);
    for (size_t n = 2; n < st.history.size(); ++n) CHECK(st.history[n].ratio < 0.5);
    const auto next = duhamel_map(c, data, st.u);
    CHECK(ledger_distance(next, st.u) < 1e-8 * ledger_norms(st.u).total());
    const auto direct = direct_integrate(c, data);
    CHECK(relative_l2_at_end(direct, st.u) < 1e-4);
}

TEST_CASE("halving the data halves the ledger and divides the nonlinear correction by 32")
{
    std::vector<double> ledger_ratio, corr;
    for (double eps : { 1e-2, 5e-3 }) {
        const auto c = small_config(eps);
        const auto st = picard_iterate(c, gaussian_data(c.grid(), eps));
        REQUIRE(st.converged);
        ledger_ratio.push_back(ledger_norms(st.u).total() / st.data_norm);
        corr.push_back(ledger_distance(st.u, st.linear));
    }
    CHECK(ledger_ratio[1] == doctest::Approx(ledger_ratio[0]).epsilon(1e-6));
    CHECK(corr[0] / corr[1] == doctest::Approx(32.0).epsilon(0.05));
}

TEST_CASE("extending the horizon does not change the solution on the shorter interval")
{
    auto c1 = small_config(0.2);
    c1.T = 5.0;
    auto c2 = c1;
    c2.T = 10.0;
    const auto d = gaussian_data(c1.grid(), c1.epsilon);
    const auto a = picard_iterate(c1, d), b = picard_iterate(c2, d);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    double worst = 0.0, scale = max_abs(a.u);
    for (size_t k = 0; k < a.u.values.size(); ++k) worst = std::max(worst, std::abs(a.u.values[k] - b.u.values[k]));
    CHECK(worst < 1e-9 * scale);
}

TEST_CASE("large data: divergence, smallness and blow-up guards")
{
    auto c = small_config(2.5);
    c.delta = 100.0;
    CHECK_THROWS_AS(picard_iterate(c, gaussian_data(c.grid(), c.epsilon)), divergence_error);
    c.delta = 1.6;
    CHECK_THROWS_AS(picard_iterate(c, gaussian_data(c.grid(), c.epsilon)), smallness_error);
    c = small_config(10.0);
    c.sign = -1;
    CHECK_THROWS_AS(direct_integrate(c, gaussian_data(c.grid(), c.epsilon)), blowup_error);
}

TEST_CASE("negative spectrum violates the hypothesis of the iteration")
{
    auto c = small_config(1e-2);
    c.potential = PotentialSpec::gaussian(-8.0, 1.0);
    CHECK_THROWS_AS(picard_iterate(c, gaussian_data(c.grid(), c.epsilon)), spectral::hypothesis_error);
}

TEST_CASE("repulsive potential and external forcing")
{
    auto c = small_config(1e-2);
    c.potential = PotentialSpec::gaussian(2.0, 1.0);
    const auto data = gaussian_data(c.grid(), c.epsilon);
    const auto st = picard_iterate(c, data);
    CHECK(st.converged);
    CHECK(relative_l2_at_end(direct_integrate(c, data), st.u) < 1e-4);

    auto f = small_config(0.0);
    f.forcing = { 0.05, 1.0, 1.3 };
    const auto fst = picard_iterate(f, gaussian_data(f.grid(), 0.0));
    CHECK(fst.converged);
    CHECK(fst.forcing_norm > 0.0);
    CHECK(max_abs(fst.u) > 0.0);
    CHECK(relative_l2_at_end(direct_integrate(f, gaussian_data(f.grid(), 0.0)), fst.u) < 1e-4);
}

TEST_CASE("ledger report and run manifest")
{
    const auto c = small_config(1e-2);
    const auto st = picard_iterate(c, gaussian_data(c.grid(), c.epsilon));
    const auto led = reversed_ledger(st.u, st.data_norm);
    REQUIRE(led.size() == 5);
    CHECK(led[0].name == "L^{6,2}_x L^inf_t");
    for (const auto& n : led) {
        CHECK(std::isfinite(n.value));
        CHECK(n.value > 0.0);
        CHECK(n.ratio == doctest::Approx(n.value / st.data_norm));
    }
    const auto j = nlohmann::json::parse(run_manifest_json(c, st, { { "x", 1.0 } }));
    CHECK(j.at("schema_version") == 1);
    CHECK(j.dump().find("\"x\"") != std::string::npos);
}
