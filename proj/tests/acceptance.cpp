// Runs the ten acceptance criteria with their tolerances and runtime budgets
// fixed here, independent of the campaign defaults.
#include <cstdio>
#include <string>
#include <vector>

#include "kgl/campaign.hpp"

#ifndef KGL_TEST_DATA
#define KGL_TEST_DATA "tests/data"
#endif

using kgl::campaign::json;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::string check;
    json settings;
    double budget_seconds;
};

json scan(const std::string& label, const std::string& kernel, const std::string& spec, double lo, double hi, double expected,
          double max_residual = 0.15)
{
    return { { "label", label }, { "kernel", kernel }, { "alpha", 1.0 }, { "spec", spec }, { "lo", lo }, { "hi", hi },
             { "region", "all" }, { "expected", expected }, { "tolerance", 0.1 }, { "max_residual", max_residual } };
}

std::vector<Criterion> criteria()
{
    json scans = json::array();
    scans.push_back(scan("C1 L1_t", "C1", "1", 4, 64, -0.5));
    scans.push_back(scan("C1 Linf_t", "C1", "inf", 0.1, 10, -1.0, 0.5));
    scans.push_back(scan("C1 weak L4_t", "C1", "4,inf", 4, 64, -1.25));
    scans.push_back(scan("SB weak L4/3_t", "SB", "4/3,inf", 2, 64, -0.75));
    scans.push_back(scan("C1 L2_t", "C1", "2", 4, 64, 1.0 / 2.0 - 1.5));
    scans.push_back(scan("C1 L3_t", "C1", "3", 4, 64, 1.0 / 3.0 - 1.5));
    scans.push_back(scan("C1 L6_t", "C1", "6", 4, 64, -1.0 - 1.0 / 6.0));
    scans.push_back(scan("C1 L8_t", "C1", "8", 4, 64, -1.0 - 1.0 / 8.0));

    return {
        { 1, "Bessel suite", "bessel",
          { { "recurrence_tol", 1e-10 }, { "integral_tol", 1e-9 }, { "horizons", { 10.0, 50.0, 200.0 } },
            { "fixture", std::string(KGL_TEST_DATA) + "/bessel_reference.csv" }, { "fixture_tol", 1e-12 } },
          10 },
        { 2, "C1 static identity", "kernel-identity", { { "radii", { 0.5, 1.0, 2.0, 4.0, 8.0 } }, { "tolerance", 1e-8 } }, 30 },
        { 3, "sine kernel Fourier support", "fourier-support", { { "r", 1.0 }, { "leak_tol", 1e-2 }, { "match_tol", 1e-2 } }, 60 },
        { 4, "free kernel decay exponents", "decay-scan", { { "scans", scans } }, 600 },
        { 5, "pointwise decay", "pointwise", { { "max_drift", 0.2 } }, 600 },
        { 6, "cosine multiplier identity", "spectral-identity",
          { { "points", { { 1.0, 3.0 }, { 0.5, 2.0 }, { 2.0, 5.0 }, { 1.0, 1.5 }, { 3.0, 10.0 }, { 3.0, 2.0 } } }, { "tolerance", 1e-3 } },
          120 },
        { 7, "perturbed Bessel part", "perturbed-bessel",
          { { "slope", { { "expected", -0.5 }, { "tolerance", 0.1 } } }, { "sup", { { "tolerance", 1e-2 }, { "factor", 3.0 } } } },
          900 },
        { 8, "Agmon decay", "agmon", { { "tolerance", 0.05 } }, 120 },
        { 9, "quintic small data", "semilinear",
          { { "epsilons", { 1e-2, 5e-3, 2.5e-3 } }, { "ratio_max", 0.5 }, { "strang_tol", 1e-4 }, { "ledger_spread", 0.3 },
            { "quintic_spread", 0.25 } },
          1200 },
        { 10, "perturbed Strichartz (2,6)", "strichartz",
          { { "p", 2.0 }, { "q", 6.0 }, { "horizons", { 50.0, 100.0 } }, { "draws", 10 }, { "seed", 12345 }, { "max_growth", 0.1 } },
          600 },
    };
}

}

int main(int argc, char** argv)
{
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    int only = argc > 1 ? std::stoi(argv[1]) : 0;
    int failures = 0;
    for (const auto& c : criteria()) {
        if (only && c.id != only) continue;
        bool pass = false;
        std::string note;
        double secs = 0.0;
        try {
            const auto rep = kgl::campaign::run_check(c.check, c.settings, kgl::campaign::Context{});
            secs = rep.runtime_seconds;
            pass = rep.pass && secs < c.budget_seconds;
            note = "measured " + rep.measured.dump();
            if (secs >= c.budget_seconds) note += " (over the runtime budget)";
        } catch (const std::exception& e) {
            note = std::string("error: ") + e.what();
        }
        if (!pass) ++failures;
        std::printf("%s  %2d  %-30s %7.1f s / %4.0f s  %s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs, c.budget_seconds,
                    note.c_str());
    }
    return failures == 0 ? 0 : 1;
}
