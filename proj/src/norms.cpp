#include "kgl/norms.hpp"
#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <mutex>
#include <thread>

namespace kgl {
namespace norms {

namespace {
    constexpr double pi = 3.14159265358979323846;

    double parse_exponent(const std::string& s)
    {
        if (s == "inf" || s == "infinity" || s == "oo") return inf;
        const auto slash = s.find('/');
        try {
            if (slash != std::string::npos) return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
            size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::logic_error&) {
            throw std::invalid_argument("cannot parse exponent '" + s + "'");
        }
    }

    std::string fmt_exponent(double p)
    {
        if (std::isinf(p)) return "inf";
        std::ostringstream os;
        os << p;
        return os.str();
    }

    // Weighted samples of |kernel| plus what is needed to account for the
    // unsampled ends of the time axis.
    struct Profile {
        std::vector<double> v, w;
        // power-law tail beyond the last sample: |f| ~ K env(s), s > s_end
        std::function<double(double)> env;
        double s_end = 0.0, r = 0.0;
        size_t tail_window_begin = 0;
        // integrable head |f| ~ c d^e on (0, d0) next to the light cone
        bool has_head = false;
        double head_c = 0.0, head_e = 0.0, head_d0 = 0.0;
    };

    void append_s_nodes(std::vector<double>& s, double from, double to, double h)
    {
        const int n = std::max(1, int(std::ceil((to - from) / h)));
        for (int j = 1; j <= n; ++j) s.push_back(from + (to - from) * j / n);
    }

    Profile sample_time_profile(const ScanConfig& cfg, double r)
    {
        Profile P;
        P.r = r;
        const std::string& k = cfg.kernel;
        const bool inside = cfg.region == Region::inside_cone;
        std::vector<double> t;
        if (k == "C1" || k == "SB") {
            const double h = 0.05;
            const double S = 20.0 * r + 200.0;
            std::vector<double> s{ 0.0 };
            append_s_nodes(s, 0.0, S, h);
            for (double x : s) t.push_back(std::sqrt(r * r + x * x));
            if (k == "C1") {
                P.v = kernels::cosine_c1_profile(r, s);
                P.env = [r](double x) { return 1.0 / (std::sqrt(x) * std::sqrt(r * r + x * x)); };
            } else {
                for (double x : s) P.v.push_back(std::abs(specfun::j1_over_z(x)) / (4.0 * pi));
                P.env = [](double x) { return std::pow(x, -1.5); };
            }
            for (auto& x : P.v) x = std::abs(x);
            P.w = cell_measures(t);
            P.s_end = S;
            if (k == "C1" && !inside) {
                // constant e^{-r}/(4 pi r) on [0, r)
                P.v.insert(P.v.begin(), std::abs(kernels::cosine_c1(r, 0.0)));
                P.w.insert(P.w.begin(), r);
                P.w[1] = 0.5 * (t[1] - t[0]);
            }
            const double window = 8.0 * pi;
            P.tail_window_begin = P.v.size() - std::min(P.v.size() - 1, size_t(window / h));
            return P;
        }

        const kernels::Kind kind = kernels::parse_kind(k);
        const std::complex<double> alpha = cfg.alpha;
        const double a = alpha.real();
        auto f = [&](double tt) { return std::abs(kernels::fractional_kernel(alpha, kind, r, tt)); };
        const double d_min = 1e-6, d_head = std::min(0.25, 0.5 * r);
        const int n_head = 40;
        std::vector<double> tt;
        if (!inside) {
            for (int j = 0; j < n_head; ++j) tt.push_back(d_min * std::pow(0.5 * r / d_min, double(j) / (n_head - 1)));
            for (int j = n_head - 1; j >= 0; --j) {
                const double d = d_min * std::pow(0.5 * r / d_min, double(j) / (n_head - 1));
                if (r - d > tt.back()) tt.push_back(r - d);
            }
        }
        const size_t first_inside = tt.size();
        for (int j = 0; j < n_head; ++j) tt.push_back(r + d_min * std::pow(d_head / d_min, double(j) / (n_head - 1)));
        const double h = 0.25;
        const double S = 10.0 * r + 60.0;
        const double s0 = std::sqrt(d_head * (2.0 * r + d_head));
        std::vector<double> s;
        append_s_nodes(s, s0, S, h);
        for (double x : s) tt.push_back(std::sqrt(r * r + x * x));
        for (double x : tt) P.v.push_back(f(x));
        P.w = cell_measures(tt);
        if (!inside) {
            // the t -> 0 end and both sides of the cone
            P.w.front() += 0.5 * tt.front();
        }
        // the near-cone end from inside is handled as a power head
        const double e = a < 1.0 ? a - 1.0 : 0.0;
        P.has_head = true;
        P.head_e = e;
        P.head_d0 = d_min;
        P.head_c = P.v[first_inside] / std::pow(d_min, e);
        P.w[first_inside] = 0.5 * (tt[first_inside + 1] - tt[first_inside]);
        const double ea = std::min(a, 1.5);
        P.env = [r, ea](double x) { return std::pow(r * r + x * x, -0.5 * ea) * std::pow(x, ea - 1.5); };
        P.s_end = S;
        P.tail_window_begin = P.v.size() - std::min(P.v.size() - 1, size_t(8.0 * pi / h));
        return P;
    }

    double tail_power(const Profile& P, double p)
    {
        double num = 0.0, den = 0.0;
        for (size_t i = P.tail_window_begin; i < P.v.size(); ++i) {
            num += std::pow(P.v[i], p) * P.w[i];
        }
        const double r = P.r;
        auto env_dt = [&](double s) -> quad::cplx {
            return std::pow(P.env(s), p) * s / std::sqrt(r * r + s * s);
        };
        // window spans the last 8 pi in s
        const double a = P.s_end - 8.0 * pi;
        den = quad::adaptive(env_dt, std::max(a, 1e-9), P.s_end, 1e-14 * (1.0 + num)).value.real();
        if (!(den > 0.0)) return 0.0;
        const double K = num / den;
        auto mapped = [&](double u) -> quad::cplx {
            if (u <= 0.0) return 0.0;
            const double s = P.s_end / u;
            return env_dt(s) * P.s_end / (u * u);
        };
        const double tail = quad::adaptive(mapped, 0.0, 1.0, 1e-12 * (1.0 + num)).value.real();
        return K * tail;
    }

    double head_power(const Profile& P, double p)
    {
        if (!P.has_head) return 0.0;
        const double ex = 1.0 + P.head_e * p;
        if (ex <= 0.0) return inf;
        return std::pow(P.head_c, p) * std::pow(P.head_d0, ex) / ex;
    }

    ScanRow norm_of_profile(const Profile& P, const LorentzSpec& spec, double x)
    {
        ScanRow row{ x, 0.0, 0.0, int(P.v.size()) };
        const bool lebesgue = spec.q == spec.p && std::isfinite(spec.p);
        if (!lebesgue) {
            row.norm = lorentz_norm(P.v, P.w, spec);
            return row;
        }
        const double p = spec.p;
        double body = 0.0;
        for (size_t i = 0; i < P.v.size(); ++i) body += std::pow(P.v[i], p) * P.w[i];
        const double tail = tail_power(P, p) + head_power(P, p);
        row.norm = std::pow(body + tail, 1.0 / p);
        row.tail_fraction = tail / (body + tail);
        return row;
    }

    std::vector<double> scan_points(const ScanConfig& cfg)
    {
        if (!(cfg.lo > 0.0) || !(cfg.hi > cfg.lo)) throw std::invalid_argument("scan range must satisfy 0 < lo < hi");
        const double decades = std::log10(cfg.hi / cfg.lo);
        const int n = std::max(2, int(std::round(decades * cfg.points_per_decade)) + 1);
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = cfg.lo * std::pow(cfg.hi / cfg.lo, double(i) / (n - 1));
        return x;
    }

    // Regular part over x at fixed time, measure 4 pi r^2 dr.
    ScanRow kernel_space_norm(const ScanConfig& cfg, double t)
    {
        std::vector<double> r;
        const double h = 0.05;
        std::vector<double> s;
        append_s_nodes(s, 0.0, t, h);
        for (auto it = s.rbegin(); it != s.rend(); ++it) {
            const double rr = std::sqrt(std::max(0.0, (t - *it) * (t + *it)));
            if (rr > 0.0) r.push_back(rr);
        }
        const int nout = int(std::ceil(40.0 / h));
        for (int j = 0; j <= nout; ++j) r.push_back(t * (1.0 + 1e-12) + j * h);
        std::vector<double> v;
        for (double rr : r) {
            double val;
            if (cfg.kernel == "C1") val = kernels::cosine_c1(rr, t);
            else if (cfg.kernel == "SB") val = kernels::sine_bessel_part(rr, t);
            else val = std::abs(kernels::fractional_kernel(cfg.alpha, kernels::parse_kind(cfg.kernel), rr, t));
            v.push_back(std::abs(val));
        }
        auto w = cell_measures(r);
        for (size_t i = 0; i < r.size(); ++i) w[i] *= 4.0 * pi * r[i] * r[i];
        return { t, lorentz_norm(v, w, cfg.spec), 0.0, int(v.size()) };
    }
}

LorentzSpec LorentzSpec::parse(const std::string& s)
{
    LorentzSpec L;
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        L.p = parse_exponent(s);
        L.q = L.p;
    } else {
        L.p = parse_exponent(s.substr(0, comma));
        L.q = parse_exponent(s.substr(comma + 1));
    }
    L.validate();
    return L;
}

std::string LorentzSpec::str() const
{
    if (q == p) return fmt_exponent(p);
    return fmt_exponent(p) + "," + fmt_exponent(q);
}

void LorentzSpec::validate() const
{
    if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("Lorentz exponents must satisfy p >= 1 and q >= 1");
    if (std::isinf(p) && !std::isinf(q)) throw std::invalid_argument("p = inf requires q = inf");
}

double lorentz_norm(const std::vector<double>& values, const std::vector<double>& weights, const LorentzSpec& spec)
{
    spec.validate();
    if (values.empty()) throw empty_input_error("lorentz_norm of an empty sample");
    if (values.size() != weights.size()) throw std::invalid_argument("values and weights differ in length");
    std::vector<size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw std::domain_error("non-finite sample");
        if (!(weights[i] >= 0.0)) throw std::domain_error("negative cell measure");
    }
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return std::abs(values[a]) > std::abs(values[b]); });
    if (std::isinf(spec.p)) return std::abs(values[idx[0]]);
    double S = 0.0;
    if (std::isinf(spec.q)) {
        double best = 0.0;
        for (size_t i : idx) {
            S += weights[i];
            best = std::max(best, std::abs(values[i]) * std::pow(S, 1.0 / spec.p));
        }
        return best;
    }
    const double e = spec.q / spec.p;
    double sum = 0.0, prev = 0.0;
    for (size_t i : idx) {
        S += weights[i];
        const double cur = std::pow(S, e);
        const double v = std::abs(values[i]);
        if (v > 0.0) sum += std::pow(v, spec.q) * (cur - prev);
        prev = cur;
    }
    return std::pow(sum / e, 1.0 / spec.q);
}

double lorentz_norm(const std::vector<std::complex<double>>& values, const std::vector<double>& weights,
                    const LorentzSpec& spec)
{
    std::vector<double> m(values.size());
    for (size_t i = 0; i < values.size(); ++i) m[i] = std::abs(values[i]);
    return lorentz_norm(m, weights, spec);
}

std::vector<double> cell_measures(const std::vector<double>& x)
{
    const size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return { 1.0 };
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? x[0] : 0.5 * (x[i - 1] + x[i]);
        const double hi = i + 1 == n ? x[n - 1] : 0.5 * (x[i] + x[i + 1]);
        w[i] = hi - lo;
        if (w[i] < 0.0) throw std::domain_error("grid must be increasing");
    }
    return w;
}

double mixed_norm(const std::vector<double>& r, const std::vector<double>& t, const std::vector<double>& values,
                  const LorentzSpec& outer, const LorentzSpec& inner)
{
    if (r.empty() || t.empty()) throw empty_input_error("mixed_norm of an empty field");
    if (values.size() != r.size() * t.size()) throw std::invalid_argument("field size does not match the grid");
    const auto wt = cell_measures(t);
    auto wr = cell_measures(r);
    for (size_t i = 0; i < r.size(); ++i) wr[i] *= 4.0 * pi * r[i] * r[i];
    std::vector<double> profile(r.size());
    const size_t nt = t.size();
    for (size_t i = 0; i < r.size(); ++i) {
        std::vector<double> row(values.begin() + i * nt, values.begin() + (i + 1) * nt);
        profile[i] = lorentz_norm(row, wt, inner);
    }
    return lorentz_norm(profile, wr, outer);
}

double mixed_norm(const kernels::KernelField& field, const LorentzSpec& outer, const LorentzSpec& inner)
{
    std::vector<double> m(field.values.size());
    for (size_t i = 0; i < m.size(); ++i) m[i] = std::abs(field.values[i]);
    return mixed_norm(field.grid.r, field.grid.t, m, outer, inner);
}

DecayFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
    if (x.size() < 8) throw std::invalid_argument("power-law fit needs at least 8 points");
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (!(*mn > 0.0) || *mx / *mn < 10.0 * (1.0 - 1e-9)) throw std::invalid_argument("power-law fit needs one decade of positive abscissae");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) throw std::domain_error("power-law fit needs positive finite values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    DecayFit f;
    f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.constant = (sy - f.exponent * sx) / n;
    f.range_lo = *mn;
    f.range_hi = *mx;
    for (size_t i = 0; i < n; ++i)
        f.max_residual = std::max(f.max_residual, std::abs(std::log(y[i]) - f.constant - f.exponent * std::log(x[i])));
    f.x = x;
    f.norm = y;
    return f;
}

ScanRow kernel_time_norm(const ScanConfig& cfg, double r)
{
    cfg.spec.validate();
    const Profile P = sample_time_profile(cfg, r);
    return norm_of_profile(P, cfg.spec, r);
}

ScanResult decay_scan(const ScanConfig& cfg)
{
    cfg.spec.validate();
    if (cfg.variable != "r" && cfg.variable != "t") throw std::invalid_argument("scan variable must be r or t");
    const auto xs = scan_points(cfg);
    ScanResult res;
    res.rows.resize(xs.size());
    std::atomic<size_t> next{ 0 };
    std::exception_ptr failure;
    std::mutex fail_mutex;
    auto worker = [&] {
        for (size_t i; (i = next++) < xs.size();) {
            try {
                res.rows[i] = cfg.variable == "r" ? kernel_time_norm(cfg, xs[i]) : kernel_space_norm(cfg, xs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(fail_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, int(xs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<double> x, y;
    for (const auto& row : res.rows) {
        x.push_back(row.x);
        y.push_back(row.norm);
    }
    res.fit = fit_power_law(x, y);
    if (res.fit.max_residual > cfg.max_residual) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "log-log residual %.3f exceeds %.3f (slope %.4f)", res.fit.max_residual,
                      cfg.max_residual, res.fit.exponent);
        throw fit_quality_error(buf);
    }
    return res;
}

std::string decay_record_json(const ScanConfig& cfg, const DecayFit& fit, double expected, double tolerance)
{
    nlohmann::ordered_json j;
    j["kernel"] = cfg.kernel;
    j["alpha"] = { cfg.alpha.real(), cfg.alpha.imag() };
    auto num = [](double v) -> nlohmann::ordered_json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    j["p"] = num(cfg.spec.p);
    j["q"] = num(cfg.spec.q);
    j["variable"] = cfg.variable;
    j["exponent"] = fit.exponent;
    j["expected"] = expected;
    j["tolerance"] = tolerance;
    j["pass"] = std::abs(fit.exponent - expected) <= tolerance;
    j["fit_range"] = { fit.range_lo, fit.range_hi };
    j["max_residual"] = fit.max_residual;
    return j.dump();
}

void write_scan_csv(const ScanResult& res, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "x,norm,fit,tail_fraction,samples\n";
    char buf[200];
    for (const auto& row : res.rows) {
        const double fit = std::exp(res.fit.constant + res.fit.exponent * std::log(row.x));
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.6g,%d\n", row.x, row.norm, fit, row.tail_fraction, row.samples);
        os << buf;
    }
}

}
}
