#include "kgl/kernels.hpp"
#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"
#include "fftw_lock.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace kgl {
namespace kernels {

namespace {
    constexpr double pi = 3.14159265358979323846;
    constexpr double kernel_tol = 1e-11;
    const cplx I(0.0, 1.0);

    void check_radius(double r)
    {
        if (!(r > 0.0)) throw std::domain_error("kernel radius must be > 0");
    }

    void check_alpha(cplx alpha)
    {
        const double a = alpha.real();
        if (!(a > 0.0) || !(a < 2.5))
            throw range_error("Re alpha = " + std::to_string(a) + " outside the operative range 0 < Re alpha < 5/2");
    }

    cplx cpow_pos(double x, cplx e) { return std::exp(e * std::log(x)); }

    quad::IntegralResult frac(double r, double t, cplx alpha, double lower, quad::Form form)
    {
        quad::IntegralSpec sp;
        sp.form = form;
        sp.r = r;
        sp.t = t;
        sp.alpha = alpha;
        sp.lower = lower;
        sp.target_error = kernel_tol;
        return quad::integrate_bessel_weighted(sp);
    }

    // int_r^inf B(sigma) k(sigma - c) d sigma with k = x^{alpha-1} for x > 0 and
    // cneg |x|^{alpha-1} for x < 0, B(sigma) = J_1(sqrt(sigma^2-r^2))/sqrt(sigma^2-r^2)
    cplx shifted_bessel_integral(double r, double c, cplx alpha, cplx cneg)
    {
        if (c > r) {
            const double ss = std::sqrt((c - r) * (c + r));
            const cplx inner = frac(r, c, alpha, 0.0, quad::Form::fractional_inner).value;
            const cplx outer = frac(r, c, alpha, ss, quad::Form::fractional).value;
            return cneg * inner + outer;
        }
        return frac(r, c, alpha, 0.0, quad::Form::fractional).value;
    }

    bool near_integer(cplx alpha, double& n)
    {
        n = std::round(alpha.real());
        return std::abs(alpha.imag()) < 1e-12 && std::abs(alpha.real() - n) < 5e-4;
    }

    cplx direct_kernel(cplx alpha, Kind kind, double r, double t)
    {
        const cplx g = specfun::gamma(alpha);
        switch (kind) {
        case Kind::S: return fractional_convolution(alpha, Branch::absolute, r, t) / (2.0 * std::cos(pi * alpha / 2.0) * g);
        case Kind::E: {
            const cplx ia = std::exp(I * pi * alpha / 2.0);
            return -fractional_convolution(alpha, Branch::analytic, r, t) / (ia * std::sin(pi * alpha) * g);
        }
        case Kind::C: return 0.5 * (direct_kernel(alpha, Kind::E, r, t) + direct_kernel(alpha, Kind::E, r, -t));
        }
        return 0.0;
    }
}

Kind parse_kind(const std::string& s)
{
    if (s == "S" || s == "s") return Kind::S;
    if (s == "C" || s == "c") return Kind::C;
    if (s == "E" || s == "e") return Kind::E;
    throw std::invalid_argument("unknown kernel kind '" + s + "' (expected S, C or E)");
}

std::string kind_name(Kind k)
{
    switch (k) {
    case Kind::S: return "S";
    case Kind::C: return "C";
    case Kind::E: return "E";
    }
    return "?";
}

double sine_bessel_part(double r, double t)
{
    check_radius(r);
    const double at = std::abs(t);
    if (at < r) return 0.0;
    const double s = std::sqrt((at - r) * (at + r));
    const double sg = t > 0 ? 1.0 : -1.0;
    return -sg / (4.0 * pi) * specfun::j1_over_z(s);
}

double sine_wave_mass(double r)
{
    check_radius(r);
    return 1.0 / (4.0 * pi * r);
}

double cosine_c1(double r, double t)
{
    check_radius(r);
    t = std::abs(t);
    quad::IntegralSpec sp;
    sp.r = r;
    sp.target_error = 1e-13;
    if (t <= r) {
        // 1/r minus the full tail, written without the cancellation
        sp.form = quad::Form::yukawa;
        return quad::integrate_bessel_weighted(sp).value.real() / (4.0 * pi);
    }
    sp.form = quad::Form::c1;
    sp.lower = std::sqrt((t - r) * (t + r));
    return -quad::integrate_bessel_weighted(sp).value.real() / (4.0 * pi);
}

std::vector<double> cosine_c1_profile(double r, const std::vector<double>& s)
{
    check_radius(r);
    std::vector<double> out(s.size());
    if (s.empty()) return out;
    for (size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) throw std::domain_error("profile nodes must be increasing");
    quad::IntegralSpec sp;
    sp.form = quad::Form::c1;
    sp.r = r;
    sp.lower = s.back();
    sp.target_error = 1e-14;
    double tail = quad::integrate_bessel_weighted(sp).value.real();
    auto f = [r](double x) -> quad::cplx { return specfun::bessel_j1(x) / std::sqrt(r * r + x * x); };
    out.back() = -tail / (4.0 * pi);
    for (size_t i = s.size() - 1; i-- > 0;) {
        double a = s[i], b = s[i + 1];
        // split long cells at half-periods
        const int pieces = std::max(1, int(std::ceil((b - a) / 1.5)));
        const double h = (b - a) / pieces;
        for (int k = pieces - 1; k >= 0; --k)
            tail += quad::adaptive(f, a + k * h, a + (k + 1) * h, 1e-15).value.real();
        out[i] = -tail / (4.0 * pi);
    }
    return out;
}

cplx fractional_convolution(cplx alpha, Branch branch, double r, double t)
{
    check_radius(r);
    check_alpha(alpha);
    const double a = alpha.real();
    const cplx cneg = branch == Branch::absolute ? cplx(1.0) : std::exp(I * pi * (alpha - 1.0));
    auto k = [&](double x) -> cplx {
        if (x > 0) return cpow_pos(x, alpha - 1.0);
        if (x < 0) return cneg * cpow_pos(-x, alpha - 1.0);
        if (a > 1.0) return 0.0;
        throw std::domain_error("fractional kernel is singular on the light cone |t| = r for Re alpha <= 1");
    };
    const cplx wave = (k(t - r) - k(t + r)) / (4.0 * pi * r);
    // sigma > 0 half of the Bessel part sees k(t - sigma) = cneg-branch beyond sigma = t
    const cplx i1 = [&] {
        if (t > r) {
            const double ss = std::sqrt((t - r) * (t + r));
            return frac(r, t, alpha, 0.0, quad::Form::fractional_inner).value + cneg * frac(r, t, alpha, ss, quad::Form::fractional).value;
        }
        return cneg * frac(r, t, alpha, 0.0, quad::Form::fractional).value;
    }();
    const cplx i2 = shifted_bessel_integral(r, -t, alpha, cneg);
    return wave - (i1 - i2) / (4.0 * pi);
}

cplx fractional_kernel(cplx alpha, Kind kind, double r, double t)
{
    check_radius(r);
    check_alpha(alpha);
    double n;
    const bool singular = near_integer(alpha, n) && (kind != Kind::S || int(n) % 2 == 1);
    if (!singular) return direct_kernel(alpha, kind, r, t);
    const double h = 1e-3;
    if (alpha.real() - 2 * h <= 0.0) throw range_error("alpha too close to 0 for the limiting combination");
    auto A = [&](double hh) { return 0.5 * (direct_kernel(alpha + hh, kind, r, t) + direct_kernel(alpha - hh, kind, r, t)); };
    return (4.0 * A(h) - A(2 * h)) / 3.0;
}

double sine_fourier_transform(double r, double tau)
{
    check_radius(r);
    const double at = std::abs(tau);
    if (at < 1.0) return 0.0;
    const double sg = tau > 0 ? 1.0 : -1.0;
    return sg * std::sin(std::sqrt((at - 1.0) * (at + 1.0)) * r) / (4.0 * pi * r);
}

FourierCheck fourier_support_check(double r, double half_window, int samples)
{
    check_radius(r);
    if (samples < 16 || (samples & (samples - 1))) throw std::domain_error("sample count must be a power of two");
    const int N = samples;
    const double T = half_window;
    const double dt = 2.0 * T / N;
    FourierCheck out;
    out.r = r;
    out.window = T;
    out.dt = dt;
    out.nyquist = pi / dt;

    // light-cone jump carried by c e^{-(t-r)} H(t-r) - c e^{(t+r)} H(-t-r)
    const double c = sine_bessel_part(r, r);
    auto jump_piece = [&](double t) {
        if (t > r) return c * std::exp(-(t - r));
        if (t < -r) return -c * std::exp(t + r);
        if (t == r) return 0.5 * c;
        if (t == -r) return -0.5 * c;
        return 0.0;
    };

    fftw_complex* in = fftw_alloc_complex(N);
    fftw_complex* in2 = fftw_alloc_complex(N);
    fftw_complex* o1 = fftw_alloc_complex(N);
    fftw_complex* o2 = fftw_alloc_complex(N);
    for (int j = 0; j < N; ++j) {
        const double t = -T + j * dt;
        double g = sine_bessel_part(r, t);
        if (std::abs(std::abs(t) - r) == 0.0) g = 0.5 * g;
        const double p = jump_piece(t);
        in[j][0] = g - p;
        in[j][1] = 0.0;
        in2[j][0] = g;
        in2[j][1] = 0.0;
    }
    fftw_plan p1, p2;
    {
        std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
        p1 = fftw_plan_dft_1d(N, in, o1, FFTW_FORWARD, FFTW_ESTIMATE);
        p2 = fftw_plan_dft_1d(N, in2, o2, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(p1);
    fftw_execute(p2);

    double leak_num = 0, leak_den = 0, err = 0, err_raw = 0, ref = 0;
    out.tau.reserve(N);
    for (int m = 0; m < N; ++m) {
        const int k = m - N / 2;
        const int idx = (k + N) % N;
        const double tau = 2.0 * pi * k / (N * dt);
        const cplx phase = std::exp(I * tau * T);  // t_j = -T + j dt
        const cplx exact_jump = c * std::exp(-I * tau * r) / (1.0 + I * tau) - c * std::exp(I * tau * r) / (1.0 - I * tau);
        const cplx disc = dt * phase * cplx(o1[idx][0], o1[idx][1]) + exact_jump;
        const cplx disc_raw = dt * phase * cplx(o2[idx][0], o2[idx][1]);
        const double delta = std::sin(tau * r) / (4.0 * pi * r);
        const cplx F = 0.5 * I * disc + delta;
        const cplx F_raw = 0.5 * I * disc_raw + delta;
        const double ex = sine_fourier_transform(r, tau);
        out.tau.push_back(tau);
        out.numeric.push_back(F.real());
        out.exact.push_back(ex);
        const double at = std::abs(tau);
        if (at <= 0.8 * out.nyquist) {
            leak_den += std::norm(F);
            if (at < 0.9) leak_num += std::norm(F);
            if (at >= 1.1) {
                err += std::norm(F - ex);
                err_raw += std::norm(F_raw - ex);
                ref += ex * ex;
            }
        }
    }
    {
        std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
        fftw_destroy_plan(p1);
        fftw_destroy_plan(p2);
    }
    fftw_free(in);
    fftw_free(in2);
    fftw_free(o1);
    fftw_free(o2);
    out.band_leak = leak_num / leak_den;
    out.match_error = std::sqrt(err / ref);
    out.match_error_raw = std::sqrt(err_raw / ref);
    return out;
}

cplx resolvent_power_kernel(cplx alpha, double rho)
{
    if (!(rho > 0.0)) throw std::domain_error("resolvent kernel needs rho > 0");
    if (!(alpha.real() > 0.0) || !(alpha.real() < 1.5))
        throw range_error("resolvent power kernel requires 0 < Re alpha < 3/2");
    // g(l) = l (1+l^2)^{-alpha}; kernel = -(1/(2 pi^2 rho^3)) int_0^inf g''(l) sin(l rho) dl
    auto g2 = [alpha, rho](double l) -> cplx {
        const double q = 1.0 + l * l;
        const cplx m1 = -2.0 * alpha * l * std::exp(-(alpha + 1.0) * std::log(q));
        const cplx m2 = -2.0 * alpha * std::exp(-(alpha + 1.0) * std::log(q)) +
                        4.0 * alpha * (alpha + 1.0) * l * l * std::exp(-(alpha + 2.0) * std::log(q));
        return (2.0 * m1 + l * m2) * std::sin(l * rho);
    };
    const double period = pi / rho;
    auto bp = [period](int j) { return j * period; };
    const double scale = 2.0 * pi * pi * rho * rho * rho;
    const auto res = quad::oscillatory(g2, bp, 1e-13 * std::max(1.0, scale), 20000, 8);
    return -res.value / scale;
}

double japanese(double x) { return std::sqrt(1.0 + x * x); }

double c1_bound(double r, double t)
{
    t = std::abs(t);
    if (t > r) return 1.0 / (t * std::pow(japanese(t * t - r * r), 0.25));
    if (r >= 1.0) return std::exp(-r) / std::sqrt(r);
    return 1.0 / r;
}

double fractional_bound(double a, double r, double t)
{
    t = std::abs(t);
    if (t > r) return 1.0 / (std::pow(t, a) * std::pow(japanese(t * t - r * r), 0.75 - 0.5 * a));
    if (r >= 1.0) return std::exp(-r) / (std::pow(t, 1.0 - a) * std::sqrt(r));
    return 1.0 / (r * std::pow(r - t, 1.0 - a));
}

double sine_bessel_bound(double r, double t)
{
    t = std::abs(t);
    if (t < r) return 0.0;
    return std::pow(japanese(std::sqrt((t - r) * (t + r))), -1.5);
}

RadialTimeGrid RadialTimeGrid::make(double r0, double r1, int nr, bool log_r, double t0, double t1, int nt)
{
    if (nr < 1 || nt < 1) throw std::domain_error("grid needs at least one point per axis");
    if (!(r0 > 0.0) || !(r1 >= r0)) throw std::domain_error("radius range must be positive and ordered");
    RadialTimeGrid g;
    for (int i = 0; i < nr; ++i) {
        const double f = nr == 1 ? 0.0 : double(i) / (nr - 1);
        g.r.push_back(log_r ? r0 * std::pow(r1 / r0, f) : r0 + (r1 - r0) * f);
    }
    for (int j = 0; j < nt; ++j) g.t.push_back(nt == 1 ? t0 : t0 + (t1 - t0) * double(j) / (nt - 1));
    return g;
}

KernelField sample_field(const std::string& kernel, cplx alpha, const RadialTimeGrid& grid, int jobs)
{
    KernelField f;
    f.kernel = kernel;
    f.alpha = alpha;
    f.grid = grid;
    const size_t nr = grid.r.size(), nt = grid.t.size();
    f.values.assign(nr * nt, 0.0);
    f.wave_mass.assign(nr, 0.0);
    std::function<cplx(double, double)> eval;
    if (kernel == "S12") {
        eval = [](double r, double t) -> cplx { return sine_bessel_part(r, t); };
        f.alpha = 0.0;
        for (size_t i = 0; i < nr; ++i) f.wave_mass[i] = sine_wave_mass(grid.r[i]);
    } else if (kernel == "C1") {
        eval = [](double r, double t) -> cplx { return cosine_c1(r, t); };
        f.alpha = 1.0;
    } else {
        const Kind k = parse_kind(kernel);
        check_alpha(alpha);
        eval = [k, alpha](double r, double t) { return fractional_kernel(alpha, k, r, t); };
    }
    jobs = std::max(1, jobs);
    auto work = [&](size_t w) {
        for (size_t i = w; i < nr; i += size_t(jobs))
            for (size_t j = 0; j < nt; ++j) f.values[i * nt + j] = eval(grid.r[i], grid.t[j]);
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(work, size_t(w));
        for (auto& th : pool) th.join();
    }
    return f;
}

void write_field_csv(const KernelField& f, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "r,t,re,im,wave_mass_coeff\n";
    char buf[160];
    const size_t nt = f.grid.t.size();
    for (size_t i = 0; i < f.grid.r.size(); ++i)
        for (size_t j = 0; j < nt; ++j) {
            const cplx v = f.values[i * nt + j];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", f.grid.r[i], f.grid.t[j], v.real(), v.imag(),
                          f.wave_mass[i]);
            os << buf;
        }
}

std::string field_sidecar_json(const KernelField& f)
{
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["kernel"] = f.kernel;
    j["alpha"] = { f.alpha.real(), f.alpha.imag() };
    j["nr"] = f.grid.r.size();
    j["nt"] = f.grid.t.size();
    j["r"] = f.grid.r;
    j["t"] = f.grid.t;
    j["columns"] = { "r", "t", "re", "im", "wave_mass_coeff" };
    j["wave_mass_convention"] = "full kernel = values + wave_mass_coeff * sgn(t) * delta(|t| - r)";
    return j.dump(2);
}

}
}
