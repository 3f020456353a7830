// Gauss-Kronrod panels, Wynn epsilon acceleration and the Bessel-weighted
// oscillatory integrals that define the free kernels.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kgl {
namespace quad {

    using cplx = std::complex<double>;

    struct convergence_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    struct Estimate {
        cplx value;
        double error;
    };

    namespace detail {
        extern const double xgk[11];
        extern const double wgk[11];
        extern const double wg[5];
    }

    // 21-point Kronrod rule with embedded 10-point Gauss error estimate.
    template <class F>
    Estimate gauss_kronrod(F&& f, double a, double b)
    {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        const cplx fc = f(c);
        cplx k = fc * detail::wgk[10];
        cplx g = 0.0;
        for (int j = 0; j < 10; ++j) {
            const double dx = h * detail::xgk[j];
            const cplx s = f(c - dx) + f(c + dx);
            k += detail::wgk[j] * s;
            if (j % 2 == 1) g += detail::wg[j / 2] * s;
        }
        return { k * h, std::abs((k - g) * h) };
    }

    template <class F>
    Estimate adaptive(F&& f, double a, double b, double tol, int depth = 30)
    {
        const Estimate e = gauss_kronrod(f, a, b);
        if (e.error <= tol || depth == 0 || std::abs(b - a) < 1e-14 * (1.0 + std::abs(a))) return e;
        const double m = 0.5 * (a + b);
        const Estimate l = adaptive(f, a, m, 0.5 * tol, depth - 1);
        const Estimate r = adaptive(f, m, b, 0.5 * tol, depth - 1);
        return { l.value + r.value, l.error + r.error };
    }

    // Wynn epsilon algorithm on a sequence of partial sums.
    class Epsilon {
    public:
        void add(cplx s);
        cplx estimate() const { return est_; }
        double error() const { return err_; }
        int count() const { return int(sums_.size()); }

    private:
        std::vector<cplx> sums_;
        std::vector<cplx> history_;
        cplx est_ = 0.0;
        double err_ = std::numeric_limits<double>::infinity();
    };

    struct OscResult {
        cplx value;
        double error;      // extrapolation + panel error estimate
        double truncation; // last breakpoint reached
        int panels;
    };

    // Integrates f over [b(0), inf) panel by panel between the breakpoints
    // b(0) < b(1) < ... (half-oscillations), accelerating the partial sums.
    OscResult oscillatory(const std::function<cplx(double)>& f, const std::function<double(int)>& breakpoint,
                          double tol, int max_panels = 4000, int min_panels = 8);

    // Registered integrands in the hyperbolic variable s = sqrt(tau^2 - r^2),
    // tau = sqrt(r^2 + s^2).
    enum class Form {
        j1,              // J_1(s)
        c1,              // J_1(s) / sqrt(r^2 + s^2)
        yukawa,          // s J_0(s) / (r^2 + s^2)^{3/2}
        fractional,      // J_1(s) (tau - t)^{alpha-1} / tau, over tau > t
        fractional_inner // J_1(s) (t - tau)^{alpha-1} / tau, over tau < t
    };

    struct IntegralSpec {
        Form form = Form::c1;
        double r = 1.0;
        double t = 0.0;
        cplx alpha = 1.0;
        double lower = 0.0;
        double upper = std::numeric_limits<double>::infinity();
        double target_error = 1e-11;
    };

    struct IntegralResult {
        cplx value;
        double error_estimate;
        double tail_bound;  // certified bound on the integral beyond the truncation point
        double truncation;
        int panels;
    };

    // Largest Re(alpha) accepted by the fractional forms.
    constexpr double max_fractional_re_alpha = 2.3;

    IntegralResult integrate_bessel_weighted(const IntegralSpec& spec);

    // Weight multiplying J_1 (or J_0 for the yukawa form) at s.
    cplx form_weight(const IntegralSpec& spec, double s);

    // Bound on |int_T^inf integrand| for the registered forms, monotone in T.
    double oscillatory_tail_bound(double T, const IntegralSpec& spec);
    // Bound on int_T^inf s^{-beta} ds for a pure power envelope, beta > 1.
    double power_tail_bound(double T, double beta);

}
}
