#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kgl/campaign.hpp"

using namespace kgl::campaign;

TEST_CASE("every registered check has a nonempty anchor from the registry")
{
    CHECK(check_names().size() == 10);
    const auto& anchors = anchor_registry();
    Context ctx;
    for (const auto& name : { "kernel-identity", "spectral-identity", "bessel" }) {
        const auto rep = run_check(name, json(), ctx);
        CHECK_FALSE(rep.anchor.empty());
        CHECK(anchors.count(rep.anchor) == 1);
        CHECK(rep.pass);
    }
    CHECK(is_check("decay-scan"));
    CHECK_FALSE(is_check("decay_scan"));
}

TEST_CASE("settings overlay: defaults, nested tables, unknown keys")
{
    const auto d = default_settings("agmon");
    CHECK(merge_settings("agmon", json()) == d);
    const auto m = merge_settings("agmon", json{ { "R", 40.0 } });
    CHECK(m["R"] == 40.0);
    CHECK(m["N"] == d["N"]);
    const auto n = merge_settings("perturbed-bessel", json{ { "slope", { { "points", 9 } } } });
    CHECK(n["slope"]["points"] == 9);
    CHECK(n["slope"]["R"] == 200.0);
    try {
        merge_settings("agmon", json{ { "RR", 1 } });
        FAIL("unknown key accepted");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("agmon.RR") != std::string::npos);
    }
    try {
        merge_settings("perturbed-bessel", json{ { "sup", { { "tolerence", 1 } } } });
        FAIL("unknown nested key accepted");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("perturbed-bessel.sup.tolerence") != std::string::npos);
    }
    CHECK_THROWS_AS(default_settings("nope"), config_error);
    CHECK_THROWS_AS(run_check("agmon", json{ { "wells", { { { "type", "gaussian" }, { "amplitud", -8.0 } } } } }, Context{}), config_error);
    CHECK_THROWS_AS(run_check("agmon", json{ { "wells", { { { "type", "gaussian" }, { "amplitude", 1.0 } } } } }, Context{}), config_error);
}

TEST_CASE("reports are byte-identical apart from the metadata block")
{
    for (const auto& name : { "kernel-identity", "spectral-identity", "fourier-support" }) {
        const auto a = report_json(run_check(name, json(), Context{}), false).dump();
        const auto b = report_json(run_check(name, json(), Context{}), false).dump();
        CHECK(a == b);
        const auto full = report_json(run_check(name, json(), Context{}));
        CHECK(full.contains("metadata"));
        for (const char* key : { "schema_version", "check", "claim", "paper_anchor", "measured", "expected", "tolerance", "pass" })
            CHECK(full.contains(key));
    }
}

TEST_CASE("report writer emits JSON plus one CSV per table")
{
    const auto dir = std::filesystem::temp_directory_path() / "kgl_campaign_report_test";
    std::filesystem::remove_all(dir);
    const auto rep = run_check("kernel-identity", json{ { "radii", { 1.0, 2.0 } } }, Context{});
    const auto paths = write_report(rep, dir.string());
    REQUIRE(paths.size() == 2);
    std::ifstream csv(dir / "kernel-identity-identity.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "r,left,right,closed_form");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 2);
    const auto j = json::parse(std::ifstream(dir / "kernel-identity.json"));
    CHECK(j["schema_version"] == schema_version);
    CHECK(j["tables"][0] == "kernel-identity-identity.csv");
    std::filesystem::remove_all(dir);
}

TEST_CASE("a failing tolerance yields a failing report, not an exception")
{
    const auto rep = run_check("kernel-identity", json{ { "tolerance", 1e-30 } }, Context{});
    CHECK_FALSE(rep.pass);
}
