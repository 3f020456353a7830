// Registered verification checks shared by the CLI and the acceptance runner.
// Each check takes a JSON settings object (missing keys fall back to the
// defaults, unknown keys are rejected) and produces one Report.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace kgl {
namespace campaign {

    using json = nlohmann::ordered_json;

    struct config_error : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct Table {
        std::string name;
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
    };

    struct Report {
        std::string check;
        std::string claim;
        std::string anchor;
        json measured;
        json expected;
        json tolerance;
        bool pass = false;
        json details;
        std::vector<Table> tables;
        double runtime_seconds = 0.0;
    };

    struct Context {
        int jobs = 1;
        unsigned long long seed = 20240917ULL;
    };

    constexpr int schema_version = 1;

    const std::vector<std::string>& check_names();
    bool is_check(const std::string& name);
    // claim id -> one-line statement
    const std::map<std::string, std::string>& anchor_registry();

    json default_settings(const std::string& check);
    // defaults overlaid with `overrides`; throws config_error naming an unknown key
    json merge_settings(const std::string& check, const json& overrides);

    Report run_check(const std::string& check, const json& overrides, const Context& ctx);

    // Report as JSON; everything run-dependent (time stamps, runtime) sits under "metadata".
    json report_json(const Report& r, bool with_metadata = true);
    // <dir>/<check>.json plus <dir>/<check>-<table>.csv; returns the written paths
    std::vector<std::string> write_report(const Report& r, const std::string& dir);
    void write_table_csv(const Table& t, const std::string& path);

}
}
