#include "kgl/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgl {
namespace specfun {

namespace {

    constexpr double pi = 3.14159265358979323846;
    constexpr long double euler_gamma = 0.57721566490153286060651209008240243L;
    constexpr double series_limit = 12.0;
    constexpr double asymptotic_limit = 17.0;

    using ld = long double;
    using cld = std::complex<long double>;

    void check_order(int n)
    {
        if (n < 0) throw std::domain_error("Bessel order must be >= 0, got " + std::to_string(n));
    }

    void check_argument(double x)
    {
        if (!(x >= 0.0)) throw std::domain_error("Bessel argument must be >= 0");
    }

    ld series_j(int n, ld x)
    {
        const ld half = x / 2;
        ld term = 1;
        for (int i = 1; i <= n; ++i) term *= half / i;
        ld sum = term;
        const ld q = half * half;
        for (int k = 1; k < 300; ++k) {
            term *= -q / (ld(k) * ld(k + n));
            sum += term;
            if (std::fabs(term) <= 1e-22L * std::fabs(sum) && k > half) break;
        }
        return sum;
    }

    // Y_0 via the Neumann-type power series, x < asymptotic_limit.
    ld series_y0(ld x)
    {
        const ld half = x / 2;
        const ld q = half * half;
        ld term = 1, harmonic = 0, sum = 0;
        for (int k = 1; k < 300; ++k) {
            term *= -q / (ld(k) * ld(k));
            harmonic += 1.0L / k;
            ld add = -term * harmonic;
            sum += add;
            if (std::fabs(add) <= 1e-22L * std::fabs(sum) && k > half) break;
        }
        return (2.0L / ld(pi)) * ((std::log(half) + euler_gamma) * series_j(0, x) + sum);
    }

    template <class T>
    T series_y1_generic(T z, T j1)
    {
        const T half = z / ld(2);
        const T q = half * half;
        T term = half;          // (z/2)^{2k+1} / (k!(k+1)!) at k = 0
        ld psi_sum = -2.0L * euler_gamma + 1.0L;   // psi(1) + psi(2)
        T sum = term * psi_sum;
        for (int k = 1; k < 300; ++k) {
            term *= -q / (ld(k) * ld(k + 1));
            psi_sum += 1.0L / k + 1.0L / (k + 1);
            T add = term * psi_sum;
            sum += add;
            if (std::abs(add) <= 1e-22L * std::abs(sum) && k > std::abs(half)) break;
        }
        return (ld(2) / ld(pi)) * j1 * std::log(half) - ld(2) / (ld(pi) * z) - sum / ld(pi);
    }

    cld series_j1_complex(cld z)
    {
        const cld half = z / ld(2);
        const cld q = half * half;
        cld term = half;
        cld sum = term;
        for (int k = 1; k < 300; ++k) {
            term *= -q / (ld(k) * ld(k + 1));
            sum += term;
            if (std::abs(term) <= 1e-22L * std::abs(sum) && k > std::abs(half)) break;
        }
        return sum;
    }

    // Hankel asymptotic amplitudes P, Q for order n.
    template <class T>
    void hankel_pq(int n, T x, T& P, T& Q)
    {
        const double mu = 4.0 * n * n;
        const T inv8x = T(1) / (T(8) * x);
        T term = T(1);
        P = T(1);
        Q = T(0);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 1; k < 80; ++k) {
            const double odd = 2.0 * k - 1.0;
            term *= T((mu - odd * odd) / k) * inv8x;
            const double mag = std::abs(term);
            if (mag > prev) break;
            prev = mag;
            if (k % 2 == 1) {
                const int m = (k - 1) / 2;
                Q += (m % 2 == 0) ? term : -term;
            } else {
                const int m = k / 2;
                P += (m % 2 == 0) ? term : -term;
            }
            if (mag < 1e-18) break;
        }
    }

    void asymptotic_jy(int n, double x, double& j, double& y)
    {
        double P, Q;
        hankel_pq(n, x, P, Q);
        const double chi = x - (0.5 * n + 0.25) * pi;
        const double amp = std::sqrt(2.0 / (pi * x));
        const double c = std::cos(chi), s = std::sin(chi);
        j = amp * (P * c - Q * s);
        y = amp * (P * s + Q * c);
    }

    // Miller backward recurrence normalised by J_0 + 2 sum J_{2k} = 1.
    std::vector<ld> miller(int nmax, double x)
    {
        const int top = std::max(nmax, int(x));
        int M = top + 20 + int(std::sqrt(40.0 * top));
        if (M % 2) ++M;
        std::vector<ld> vals(nmax + 1, 0.0L);
        ld jp = 0.0L, j = 1e-30L;
        ld sum = 2.0L * j;
        for (int m = M; m >= 1; --m) {
            const ld jm = (2.0L * m / x) * j - jp;
            jp = j;
            j = jm;
            const int idx = m - 1;
            if (idx <= nmax) vals[idx] = j;
            if (idx > 0 && idx % 2 == 0) sum += 2.0L * j;
            if (std::fabs(j) > 1e300L) {
                j *= 1e-300L;
                jp *= 1e-300L;
                sum *= 1e-300L;
                for (auto& v : vals) v *= 1e-300L;
            }
        }
        sum += j;
        for (auto& v : vals) v /= sum;
        return vals;
    }

    double j01(int n, double x)
    {
        if (x == 0.0) return n == 0 ? 1.0 : 0.0;
        if (x < series_limit) return double(series_j(n, x));
        if (x < asymptotic_limit) return double(miller(1, x)[n]);
        double j, y;
        asymptotic_jy(n, x, j, y);
        return j;
    }

}

double bessel_j(int n, double x)
{
    check_order(n);
    check_argument(x);
    if (n <= 1) return j01(n, x);
    if (x == 0.0) return 0.0;
    if (x < series_limit) return double(series_j(n, x));
    if (x < asymptotic_limit) return double(miller(n, x)[n]);
    const double j0 = j01(0, x), j1 = j01(1, x);
    if (n < x) {
        double jm = j0, jc = j1;
        for (int k = 1; k < n; ++k) {
            const double jn = (2.0 * k / x) * jc - jm;
            jm = jc;
            jc = jn;
        }
        return jc;
    }
    const auto v = miller(n, x);
    const ld s = (ld(j0) * v[0] + ld(j1) * v[1]) / (v[0] * v[0] + v[1] * v[1]);
    return double(s * v[n]);
}

double bessel_j0(double x) { return bessel_j(0, x); }
double bessel_j1(double x) { return bessel_j(1, x); }

double bessel_y0(double x)
{
    if (!(x > 0.0)) throw std::domain_error("Y_0 requires x > 0");
    if (x < asymptotic_limit) return double(series_y0(x));
    double j, y;
    asymptotic_jy(0, x, j, y);
    return y;
}

double bessel_y1(double x)
{
    if (!(x > 0.0)) throw std::domain_error("Y_1 requires x > 0 (singular like -2/(pi x) at 0)");
    if (x < asymptotic_limit) return double(series_y1_generic<ld>(x, series_j(1, x)));
    double j, y;
    asymptotic_jy(1, x, j, y);
    return y;
}

double j1_over_z(double z)
{
    z = std::fabs(z);
    if (z < series_limit) {
        const ld half = ld(z) / 2;
        const ld q = half * half;
        ld term = 0.5L, sum = 0.5L;
        for (int k = 1; k < 300; ++k) {
            term *= -q / (ld(k) * ld(k + 1));
            sum += term;
            if (std::fabs(term) <= 1e-22L * std::fabs(sum) && k > half) break;
        }
        return double(sum);
    }
    return bessel_j1(z) / z;
}

double j1_tail_integral(double a)
{
    if (!(a >= 0.0)) throw std::domain_error("tail integral requires a >= 0");
    return bessel_j0(a);
}

std::complex<double> hankel_h1_plus(std::complex<double> z)
{
    if (z.imag() < 0.0) throw std::domain_error("H_1^+ is evaluated on the closed upper half-plane only");
    if (z == 0.0) throw std::domain_error("H_1^+ is singular at z = 0");
    if (z.imag() == 0.0 && z.real() > 0.0) return { bessel_j1(z.real()), bessel_y1(z.real()) };
    if (std::abs(z) < asymptotic_limit) {
        const cld zz(z.real(), z.imag());
        const cld j1 = series_j1_complex(zz);
        const cld y1 = series_y1_generic<cld>(zz, j1);
        const cld h = j1 + cld(0, 1) * y1;
        return { double(h.real()), double(h.imag()) };
    }
    std::complex<double> P, Q;
    hankel_pq(1, z, P, Q);
    const std::complex<double> I(0, 1);
    return std::sqrt(2.0 / (pi * z)) * (P + I * Q) * std::exp(I * (z - 0.75 * pi));
}

std::complex<double> hankel_h1_minus(std::complex<double> z)
{
    if (z.imag() < 0.0) throw std::domain_error("H_1^- is evaluated on the closed upper half-plane only");
    if (z == 0.0) throw std::domain_error("H_1^- is singular at z = 0");
    if (z.imag() == 0.0 && z.real() > 0.0) return { bessel_j1(z.real()), -bessel_y1(z.real()) };
    const cld zz(z.real(), z.imag());
    const cld j1 = series_j1_complex(zz);
    const cld y1 = series_y1_generic<cld>(zz, j1);
    const cld h = j1 - cld(0, 1) * y1;
    return { double(h.real()), double(h.imag()) };
}

double bessel_j_integral(int n, double x)
{
    check_order(n);
    check_argument(x);
    // periodic analytic integrand: the trapezoid rule converges geometrically
    const int M = 2 * (int(x) + n + 64);
    double sum = 0.0;
    for (int k = 0; k < M; ++k) {
        const double th = 2.0 * pi * k / M;
        sum += std::cos(n * th - x * std::sin(th));
    }
    return sum / M;
}

double bessel_zero(int nu, int k)
{
    if (nu != 0 && nu != 1) throw std::domain_error("bessel_zero supports nu = 0, 1");
    if (k < 1) throw std::domain_error("zero index starts at 1");
    const double beta = (k + 0.5 * nu - 0.25) * pi;
    const double mu = 4.0 * nu * nu;
    const double b8 = 8.0 * beta;
    double x = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
    for (int it = 0; it < 8; ++it) {
        double f, fp;
        if (nu == 0) {
            f = bessel_j0(x);
            fp = -bessel_j1(x);
        } else {
            f = bessel_j1(x);
            fp = bessel_j0(x) - f / x;
        }
        const double dx = f / fp;
        x -= dx;
        if (std::fabs(dx) < 1e-15 * x) break;
    }
    return x;
}

std::complex<double> gamma(std::complex<double> z)
{
    static const double p[] = { 0.99999999999980993, 676.5203681218851, -1259.1392167224028,
                                771.32342877765313, -176.61502916214059, 12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7 };
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma(1.0 - z));
    z -= 1.0;
    std::complex<double> x = p[0];
    for (int i = 1; i < 9; ++i) x += p[i] / (z + double(i));
    const std::complex<double> t = z + 7.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}
}
