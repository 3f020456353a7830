// Bessel, Hankel and Gamma functions used by the kernel and quadrature code.
#pragma once

#include <complex>

namespace kgl {
namespace specfun {

    // J_n(x) for integer n >= 0 and x >= 0.  Power series below x = 12, Miller
    // backward recurrence on [12, 17), Hankel asymptotics beyond (with forward
    // recurrence for n < x).
    double bessel_j(int n, double x);
    double bessel_j0(double x);
    double bessel_j1(double x);

    // Y_0, Y_1 for x > 0.
    double bessel_y0(double x);
    double bessel_y1(double x);

    // J_1(z)/z, equal to 1/2 at z = 0.
    double j1_over_z(double z);

    // Integral of J_1 over [a, inf) = J_0(a).
    double j1_tail_integral(double a);

    // H_1^{+-} = J_1 +- i Y_1.  On the positive real axis the real routines are
    // used directly; elsewhere in the closed upper half-plane a complex series
    // (|z| < 17) or the Hankel expansion is used.
    std::complex<double> hankel_h1_plus(std::complex<double> z);
    std::complex<double> hankel_h1_minus(std::complex<double> z);

    // Slow reference: trapezoid rule on (1/pi) int_0^pi cos(n th - x sin th) dth.
    double bessel_j_integral(int n, double x);

    // k-th positive zero (k >= 1) of J_nu, nu in {0, 1}.
    double bessel_zero(int nu, int k);

    // Gamma function on the complex plane (Lanczos, with reflection).
    std::complex<double> gamma(std::complex<double> z);

}
}
