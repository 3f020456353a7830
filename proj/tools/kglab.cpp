// kglab: run verification campaigns, evaluate single kernel values.
#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "kgl/campaign.hpp"
#include "kgl/kernels.hpp"

namespace fs = std::filesystem;
using kgl::campaign::config_error;
using json = kgl::campaign::json;

namespace {

json to_json(const toml::node& n)
{
    if (auto t = n.as_table()) {
        json o = json::object();
        for (auto&& [k, v] : *t) o[std::string(k.str())] = to_json(v);
        return o;
    }
    if (auto a = n.as_array()) {
        json o = json::array();
        for (auto&& v : *a) o.push_back(to_json(v));
        return o;
    }
    if (auto v = n.as_string()) return v->get();
    if (auto v = n.as_integer()) return v->get();
    if (auto v = n.as_floating_point()) return v->get();
    if (auto v = n.as_boolean()) return v->get();
    throw config_error("unsupported TOML value type (dates and times are not accepted)");
}

struct Campaign {
    std::string name = "campaign";
    std::string output_dir;
    std::vector<std::string> checks;
    std::map<std::string, json> settings;
};

// relative "fixture"/"path" entries resolve against the config file's directory and must exist
void resolve_paths(json& j, const fs::path& base, const std::string& where)
{
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string w = where + "." + it.key();
            if ((it.key() == "fixture" || it.key() == "path") && it.value().is_string()) {
                std::string p = it.value().get<std::string>();
                if (p.empty()) continue;
                fs::path fp(p);
                if (fp.is_relative()) fp = base / fp;
                if (!fs::exists(fp)) throw config_error("'" + w + "' refers to missing file " + fp.string());
                it.value() = fp.string();
            } else {
                resolve_paths(it.value(), base, w);
            }
        }
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) resolve_paths(j[i], base, where + "[" + std::to_string(i) + "]");
    }
}

Campaign load_campaign(const std::string& path)
{
    toml::table tbl;
    try {
        tbl = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "cannot parse " << path << ": " << e.description() << " at " << e.source().begin;
        throw config_error(os.str());
    }
    const json doc = to_json(tbl);
    Campaign c;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& k = it.key();
        if (k == "name") {
            if (!it.value().is_string()) throw config_error("'name' must be a string");
            c.name = it.value().get<std::string>();
        } else if (k == "output_dir") {
            if (!it.value().is_string()) throw config_error("'output_dir' must be a string");
            c.output_dir = it.value().get<std::string>();
        } else if (k == "checks") {
            if (!it.value().is_array()) throw config_error("'checks' must be an array of check names");
            for (const auto& v : it.value()) {
                if (!v.is_string()) throw config_error("'checks' must be an array of check names");
                const std::string name = v.get<std::string>();
                if (!kgl::campaign::is_check(name)) throw config_error("unknown check '" + name + "' in 'checks'");
                c.checks.push_back(name);
            }
        } else if (k == "settings") {
            if (!it.value().is_object()) throw config_error("'settings' must be a table");
            for (auto s = it.value().begin(); s != it.value().end(); ++s) {
                if (!kgl::campaign::is_check(s.key())) throw config_error("unknown check 'settings." + s.key() + "'");
                c.settings[s.key()] = s.value();
            }
        } else {
            throw config_error("unknown key '" + k + "'");
        }
    }
    const fs::path base = fs::absolute(path).parent_path();
    for (auto& [name, s] : c.settings) {
        resolve_paths(s, base, "settings." + name);
        kgl::campaign::merge_settings(name, s);
    }
    if (!c.output_dir.empty() && fs::path(c.output_dir).is_relative()) c.output_dir = (base / c.output_dir).string();
    return c;
}

int cmd_run(const std::string& config, const std::string& out_flag, int jobs, const std::optional<unsigned long long>& seed,
            const std::vector<std::string>& filter)
{
    Campaign c;
    try {
        if (!config.empty()) c = load_campaign(config);
        else c.checks = filter;
        for (const auto& f : filter)
            if (!kgl::campaign::is_check(f)) throw config_error("unknown check '" + f + "' in --check");
        if (!config.empty() && !filter.empty()) {
            std::vector<std::string> kept;
            for (const auto& n : c.checks)
                if (std::find(filter.begin(), filter.end(), n) != filter.end()) kept.push_back(n);
            c.checks = kept;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    std::string out = out_flag;
    if (out.empty()) out = c.output_dir;
    if (out.empty())
        if (const char* env = std::getenv("KGLAB_OUT_DIR")) out = env;
    if (out.empty()) out = "kglab-reports";

    kgl::campaign::Context ctx;
    ctx.jobs = std::max(1, jobs);
    if (seed) ctx.seed = *seed;

    std::cout << "campaign " << c.name << ": " << c.checks.size() << " check(s) -> " << out << "\n";
    std::mutex io;
    bool all_pass = true, config_failed = false;
    auto one = [&](const std::string& name) {
        const auto it = c.settings.find(name);
        try {
            const auto rep = kgl::campaign::run_check(name, it == c.settings.end() ? json() : it->second, ctx);
            std::lock_guard<std::mutex> lk(io);
            kgl::campaign::write_report(rep, out);
            all_pass = all_pass && rep.pass;
            std::printf("%-18s %s  %.1f s\n", name.c_str(), rep.pass ? "PASS" : "FAIL", rep.runtime_seconds);
        } catch (const config_error& e) {
            std::lock_guard<std::mutex> lk(io);
            std::cerr << "config error: " << e.what() << "\n";
            config_failed = true;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lk(io);
            std::cerr << name << ": " << e.what() << "\n";
            all_pass = false;
        }
        std::fflush(stdout);
    };
    if (ctx.jobs == 1) {
        for (const auto& n : c.checks) one(n);
    } else {
        size_t next = 0;
        std::mutex q;
        std::vector<std::future<void>> workers;
        for (int w = 0; w < ctx.jobs; ++w)
            workers.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    size_t i;
                    {
                        std::lock_guard<std::mutex> lk(q);
                        if (next >= c.checks.size()) return;
                        i = next++;
                    }
                    one(c.checks[i]);
                }
            }));
        for (auto& w : workers) w.get();
    }
    if (config_failed) return 2;
    return all_pass ? 0 : 1;
}

int cmd_eval(const std::string& kernel, double alpha, double alpha_im, double r, double t, bool as_json)
{
    using namespace kgl::kernels;
    json j = { { "kernel", kernel }, { "r", r }, { "t", t } };
    try {
        if (kernel == "S12") {
            j["value"] = sine_bessel_part(r, t);
            j["wave_mass"] = sine_wave_mass(r);
            j["bound"] = sine_bessel_bound(r, t);
            j["bound_form"] = "<sqrt(t^2-r^2)>^{-3/2} for |t| >= r, 0 inside r > |t|";
        } else if (kernel == "C1") {
            j["value"] = cosine_c1(r, t);
            j["bound"] = c1_bound(r, t);
            j["bound_form"] = std::abs(t) > r ? "1/(t <t^2-r^2>^{1/4})" : (r >= 1 ? "e^{-r}/sqrt(r)" : "1/r");
        } else {
            const Kind k = parse_kind(kernel);
            const cplx a(alpha, alpha_im);
            const cplx v = fractional_kernel(a, k, r, t);
            j["alpha"] = { alpha, alpha_im };
            j["value"] = { v.real(), v.imag() };
            j["bound"] = fractional_bound(alpha, r, t);
            j["bound_form"] = std::abs(t) > r ? "1/(t^a <t^2-r^2>^{3/4-a/2})"
                                              : (r >= 1 ? "e^{-r}/(t^{1-a} sqrt(r))" : "1/(r (r-t)^{1-a})");
        }
    } catch (const range_error& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (as_json) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << std::setprecision(15);
    std::cout << "kernel " << kernel << "  r = " << r << "  t = " << t << "\n";
    if (j["value"].is_array()) std::cout << "value      " << j["value"][0].get<double>() << " + " << j["value"][1].get<double>() << " i\n";
    else std::cout << "value      " << j["value"].get<double>() << "\n";
    if (j.contains("wave_mass")) std::cout << "wave_mass  " << j["wave_mass"].get<double>() << "  (coefficient of sgn(t) delta(|t|-r))\n";
    std::cout << "bound      " << j["bound"].get<double>() << "  " << j["bound_form"].get<std::string>() << " (constant omitted)\n";
    return 0;
}

}

int main(int argc, char** argv)
{
    CLI::App app{ "kglab: Klein-Gordon kernel verification campaigns" };
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a campaign and write JSON/CSV reports");
    std::string config, out;
    int jobs = 1;
    std::optional<unsigned long long> seed;
    std::vector<std::string> filter;
    run->add_option("config_file", config, "campaign TOML");
    run->add_option("--config", config, "campaign TOML");
    run->add_option("--out", out, "output directory (default: output_dir, then $KGLAB_OUT_DIR, then ./kglab-reports)");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "seed for random data ensembles");
    run->add_option("--check", filter, "only run these checks (repeatable)");

    auto* eval = app.add_subcommand("eval", "evaluate one kernel value and its size bound");
    std::string kernel = "C1";
    double alpha = 1.0, alpha_im = 0.0, r = 1.0, t = 1.0;
    bool as_json = false;
    eval->add_option("--kernel", kernel, "S12, C1, S, C or E")->check(CLI::IsMember({ "S12", "C1", "S", "C", "E" }));
    eval->add_option("--alpha", alpha, "Re alpha (kinds S, C, E)");
    eval->add_option("--alpha-im", alpha_im, "Im alpha");
    eval->add_option("--r", r, "radius")->required();
    eval->add_option("--t", t, "time")->required();
    eval->add_flag("--json", as_json, "print JSON");

    auto* list = app.add_subcommand("list", "list registered checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (run->parsed()) return cmd_run(config, out, jobs, seed, filter);
    if (eval->parsed()) return cmd_eval(kernel, alpha, alpha_im, r, t, as_json);
    if (list->parsed()) {
        const auto& anchors = kgl::campaign::anchor_registry();
        for (const auto& n : kgl::campaign::check_names()) std::cout << n << "\n";
        std::cout << "\nanchors:\n";
        for (const auto& [id, text] : anchors) std::cout << "  " << id << ": " << text << "\n";
    }
    return 0;
}
