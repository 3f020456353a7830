#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"

#include <algorithm>
#include <string>

namespace kgl {
namespace quad {

namespace detail {
    const double xgk[11] = { 0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                             0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                             0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                             0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                             0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                             0.0 };
    const double wgk[11] = { 0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                             0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                             0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                             0.123491976262065851077600109604055, 0.134709217311473325928054001771707,
                             0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                             0.149445554002916905664936468389821 };
    const double wg[5] = { 0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                           0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                           0.295524224714752870173892994651338 };
}

namespace {
    constexpr double pi = 3.14159265358979323846;
    constexpr int epsilon_window = 21;
}

void Epsilon::add(cplx s)
{
    sums_.push_back(s);
    const int n = int(sums_.size());
    const int L = std::min(n, epsilon_window);
    std::vector<cplx> prev(L, 0.0);
    std::vector<cplx> cur(sums_.end() - L, sums_.end());
    cplx best = s;
    for (int k = 1; cur.size() > 1; ++k) {
        std::vector<cplx> next(cur.size() - 1);
        bool stalled = false;
        for (size_t i = 0; i + 1 < cur.size(); ++i) {
            const cplx d = cur[i + 1] - cur[i];
            if (std::abs(d) <= 1e-300 + 1e-15 * std::abs(cur[i + 1])) {
                stalled = true;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / d;
        }
        if (stalled) {
            // converged column: the even column just computed is already exact
            if (k % 2 == 1) best = cur.back();
            break;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) best = cur.back();
    }
    est_ = best;
    history_.push_back(best);
    const int h = int(history_.size());
    if (h >= 3)
        err_ = std::abs(history_[h - 1] - history_[h - 2]) + std::abs(history_[h - 1] - history_[h - 3]);
}

OscResult oscillatory(const std::function<cplx(double)>& f, const std::function<double(int)>& breakpoint,
                      double tol, int max_panels, int min_panels)
{
    Epsilon eps;
    cplx sum = 0.0;
    double panel_err = 0.0;
    int good = 0;
    double a = breakpoint(0);
    for (int k = 0; k < max_panels; ++k) {
        const double b = breakpoint(k + 1);
        const Estimate e = adaptive(f, a, b, 0.05 * tol);
        sum += e.value;
        panel_err += e.error;
        eps.add(sum);
        a = b;
        if (k + 1 < min_panels) continue;
        const double err = eps.error();
        good = (err <= tol) ? good + 1 : 0;
        if (good >= 2) return { eps.estimate(), err + panel_err, b, k + 1 };
    }
    throw convergence_error("oscillatory integral did not converge after " + std::to_string(max_panels) +
                            " panels (last error " + std::to_string(eps.error()) + ")");
}

namespace {

    int bessel_index(Form form) { return form == Form::yukawa ? 0 : 1; }

    // first zero index k with j_{nu,k} > x
    int first_zero_above(int nu, double x)
    {
        int k = std::max(1, int(x / pi) - 1);
        while (k > 1 && specfun::bessel_zero(nu, k - 1) > x) --k;
        while (specfun::bessel_zero(nu, k) <= x) ++k;
        return k;
    }

    double singular_point(const IntegralSpec& s)
    {
        return s.t > s.r ? std::sqrt((s.t - s.r) * (s.t + s.r)) : 0.0;
    }

    // (tau - t) for the fractional form given s and d = s - s* (only used when t > r)
    double tau_minus_t(const IntegralSpec& sp, double s, double tau, double d)
    {
        if (sp.t > sp.r) {
            const double ss = singular_point(sp);
            return d * (s + ss) / (tau + sp.t);
        }
        return (s * s + (sp.r - sp.t) * (sp.r + sp.t)) / (tau + sp.t);
    }

    cplx cpow_pos(double base, cplx e) { return std::exp(e * std::log(base)); }

    // weight at s; d carries s - s* (fractional) or s* - s (fractional_inner) exactly
    cplx weight(const IntegralSpec& sp, double s, double d)
    {
        const double tau = std::sqrt(sp.r * sp.r + s * s);
        switch (sp.form) {
        case Form::j1: return 1.0;
        case Form::c1: return 1.0 / tau;
        case Form::yukawa: return s / (tau * tau * tau);
        case Form::fractional: return cpow_pos(tau_minus_t(sp, s, tau, d), sp.alpha - 1.0) / tau;
        case Form::fractional_inner: {
            const double ss = singular_point(sp);
            const double tmt = d * (ss + s) / (tau + sp.t);
            return cpow_pos(tmt, sp.alpha - 1.0) / tau;
        }
        }
        return 0.0;
    }

    cplx integrand(const IntegralSpec& sp, double s, double d)
    {
        if (sp.form == Form::c1 && sp.r == 0.0) return specfun::j1_over_z(s);
        const double j = bessel_index(sp.form) == 0 ? specfun::bessel_j0(s) : specfun::bessel_j1(s);
        return j * weight(sp, s, d);
    }

    void validate(const IntegralSpec& sp)
    {
        if (!(sp.lower >= 0.0)) throw std::domain_error("lower limit must be >= 0");
        if (!(sp.upper > sp.lower)) throw std::domain_error("upper limit must exceed lower limit");
        if (!(sp.target_error > 0.0)) throw std::domain_error("target error must be positive");
        if (!(sp.r >= 0.0)) throw std::domain_error("r must be >= 0");
        if (sp.r == 0.0 && sp.form != Form::c1 && sp.form != Form::j1)
            throw std::domain_error("r = 0 only supported for the J_1 and J_1/sqrt(r^2+s^2) forms");
        if (sp.form == Form::fractional || sp.form == Form::fractional_inner) {
            const double a = sp.alpha.real();
            if (!(a > 0.0)) throw std::domain_error("fractional forms need Re alpha > 0");
            if (a >= 2.5)
                throw convergence_error("boundary term at infinity does not vanish: Re alpha must be < 5/2");
            if (a > max_fractional_re_alpha)
                throw convergence_error("Re alpha in (2.3, 2.5): convergence too slow, supported range is Re alpha <= 2.3");
            if (sp.form == Form::fractional && sp.t > sp.r && sp.lower < singular_point(sp) * (1 - 1e-13))
                throw std::domain_error("fractional form: lower limit below the singular point sqrt(t^2 - r^2)");
            if (sp.form == Form::fractional_inner && !(sp.t > sp.r))
                throw std::domain_error("inner fractional form requires t > r");
        }
    }

    // near-field piece [s0, s0 + w] (or [s0 - w, s0] for the inner form) with the
    // endpoint power singularity removed by substitution
    Estimate singular_window(const IntegralSpec& sp, double s0, double w, double tol)
    {
        const double a = sp.alpha.real();
        const bool inner = sp.form == Form::fractional_inner;
        if (s0 == 0.0 && !inner) {
            // t == r: integrand ~ s^{2a-1} at the origin
            const double c = 2.0 * a;
            auto g = [&](double v) -> cplx {
                const double s = std::pow(v, 1.0 / c);
                const double jac = std::pow(v, 1.0 / c - 1.0) / c;
                return integrand(sp, s, s) * jac;
            };
            return adaptive(g, 0.0, std::pow(w, c), tol);
        }
        auto g = [&](double v) -> cplx {
            const double d = std::pow(v, 1.0 / a);
            const double s = inner ? s0 - d : s0 + d;
            const double tau = std::sqrt(sp.r * sp.r + s * s);
            const double ss = s0;
            const double rho = (s + ss) / (tau + sp.t);
            // (tau - t)^{alpha-1} ds = rho^{alpha-1} d^{i b} dv / a
            const cplx ib(0.0, sp.alpha.imag());
            const cplx fac = cpow_pos(rho, sp.alpha - 1.0) * (d > 0 ? cpow_pos(d, ib) : cplx(1.0));
            const double j = specfun::bessel_j1(s);
            return j * fac / (tau * a);
        };
        return adaptive(g, 0.0, std::pow(w, a), tol);
    }

}

cplx form_weight(const IntegralSpec& spec, double s)
{
    const double ss = singular_point(spec);
    const double d = spec.form == Form::fractional_inner ? ss - s : s - ss;
    return weight(spec, s, d);
}

IntegralResult integrate_bessel_weighted(const IntegralSpec& sp)
{
    validate(sp);
    const int nu = bessel_index(sp.form);
    const double tol = sp.target_error;
    cplx total = 0.0;
    double err = 0.0;
    int panels = 0;

    double lo = sp.lower;
    double hi = sp.upper;
    const bool frac = sp.form == Form::fractional || sp.form == Form::fractional_inner;
    const double ss = singular_point(sp);

    if (sp.form == Form::fractional_inner) {
        hi = std::min(hi, ss);
        if (!(hi > lo)) throw std::domain_error("inner fractional form: empty interval");
        const double w = std::min(hi - lo, 1.0);
        const Estimate near = singular_window(sp, hi, w, 0.25 * tol);
        total += near.value;
        err += near.error;
        hi -= w;
    } else if (frac && (sp.t >= sp.r) && std::abs(lo - ss) <= 1e-13 * (1.0 + ss)) {
        // singular lower end (tau = t); window up to the next zero of J_1, at least length 1
        const int k = first_zero_above(1, ss + 1.0);
        const double w = std::min(specfun::bessel_zero(1, k) - ss, hi - ss);
        const Estimate near = singular_window(sp, ss, w, 0.25 * tol);
        total += near.value;
        err += near.error;
        lo = ss + w;
        ++panels;
    }

    auto f = [&](double s) -> cplx {
        const double d = sp.form == Form::fractional_inner ? ss - s : s - ss;
        return integrand(sp, s, d);
    };

    if (std::isfinite(hi)) {
        // finite interval: panels at consecutive zeros, plain summation
        double a = lo;
        int k = first_zero_above(nu, a);
        while (a < hi) {
            const double b = std::min(hi, specfun::bessel_zero(nu, k++));
            const Estimate e = adaptive(f, a, b, 0.02 * tol);
            total += e.value;
            err += e.error;
            a = b;
            ++panels;
        }
        return { total, err, 0.0, hi, panels };
    }

    const int k0 = first_zero_above(nu, lo);
    auto bp = [&](int j) { return j == 0 ? lo : specfun::bessel_zero(nu, k0 + j - 1); };
    const OscResult o = oscillatory(f, bp, 0.5 * tol, 6000, 8);
    total += o.value;
    err += o.error;
    panels += o.panels;
    double tb = 0.0;
    try {
        tb = oscillatory_tail_bound(o.truncation, sp);
    } catch (const std::exception&) {
        tb = std::numeric_limits<double>::quiet_NaN();
    }
    return { total, err, tb, o.truncation, panels };
}

double power_tail_bound(double T, double beta)
{
    if (!(T > 0.0) || !(beta > 1.0)) throw std::domain_error("power tail bound needs T > 0, beta > 1");
    return std::pow(T, 1.0 - beta) / (beta - 1.0);
}

double oscillatory_tail_bound(double T, const IntegralSpec& sp)
{
    if (!(T > 0.0)) throw std::domain_error("tail bound needs T > 0");
    const double ss = singular_point(sp);
    const double j0env = std::sqrt(2.0 / (pi * T));
    const double j1 = specfun::bessel_j1(T), y1 = specfun::bessel_y1(T);
    const double m1 = std::sqrt(j1 * j1 + y1 * y1);
    switch (sp.form) {
    case Form::j1: return j0env;
    case Form::c1: return 2.0 * j0env * std::abs(weight(sp, T, T - ss));
    case Form::yukawa:
        if (T < sp.r / std::sqrt(2.0)) throw std::domain_error("tail bound: T below the weight maximum r/sqrt(2)");
        return 4.0 * m1 * std::abs(weight(sp, T, T - ss));
    case Form::fractional: {
        if (T <= ss) throw std::domain_error("tail bound: T not beyond the singular point");
        const double a = sp.alpha.real();
        const double tau = std::sqrt(sp.r * sp.r + T * T);
        const double tmt = tau_minus_t(sp, T, tau, T - ss);
        const double w = std::pow(tmt, a - 1.0) / tau;
        if (a <= 1.0) return 2.0 * j0env * w;
        if (a < 2.0) {
            // unimodal weight, maximum at tau = t/(2-a)
            const double tau_m = std::max(sp.t, 0.0) / (2.0 - a);
            if (tau >= tau_m) return 2.0 * j0env * w;
            const double wm = std::pow(std::max(tau_m - sp.t, 0.0), a - 1.0) / tau_m;
            return 6.0 * j0env * std::max(w, wm);
        }
        // increasing weight: one integration by parts moves the tail to J_0 w'
        const double dw = (T / tau) * std::abs((a - 1.0) * std::pow(tmt, a - 2.0) / tau - std::pow(tmt, a - 1.0) / (tau * tau));
        return j0env * w + 4.0 * m1 * dw;
    }
    case Form::fractional_inner: break;
    }
    throw std::domain_error("tail bound: unsupported form (finite-range integrand)");
}

}
}
