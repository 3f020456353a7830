// Free Klein-Gordon kernels in three dimensions, radial variable r = |x|.
//   S_a(t) = sin(t A)/A^{2a},  C_a(t) = cos(t A)/A^{2a},  E_a(t) = e^{itA}/A^{2a},
// with A = sqrt(-Laplacian + 1).  S_{1/2} = wave delta 1/(4 pi r) sgn t delta(|t|-r)
// plus the regular Bessel part returned by sine_bessel_part.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgl {
namespace kernels {

    using cplx = std::complex<double>;

    struct range_error : std::out_of_range {
        using std::out_of_range::out_of_range;
    };

    enum class Kind { S, C, E };
    enum class Branch { absolute, analytic };

    Kind parse_kind(const std::string& s);
    std::string kind_name(Kind k);

    double sine_bessel_part(double r, double t);
    // coefficient of sgn(t) delta(|t| - r) in S_{1/2}
    double sine_wave_mass(double r);

    // C_1 = cos(tA)/A^2; even in t, jump 1/(4 pi r) across |t| = r.
    double cosine_c1(double r, double t);
    // C_1 at t_j = sqrt(r^2 + s_j^2) for increasing s_j >= 0 (tail integrals
    // accumulated backwards from the last node).
    std::vector<double> cosine_c1_profile(double r, const std::vector<double>& s);

    // (S_{1/2} * k)(t) with k = |t|^{alpha-1} (absolute) or the main-branch
    // t^{alpha-1} = e^{i pi (alpha-1)} |t|^{alpha-1} for t < 0 (analytic).
    cplx fractional_convolution(cplx alpha, Branch branch, double r, double t);

    // Kernel of S, C or E with exponent (1+alpha)/2, built from the convolutions:
    //   S = conv_abs / (2 cos(pi alpha/2) Gamma(alpha)),
    //   E = -conv_analytic / (i^alpha sin(pi alpha) Gamma(alpha)),
    //   C = (E(t) + E(-t)) / 2.
    // Integer alpha is reached by a symmetric Richardson limit with step 1e-3.
    cplx fractional_kernel(cplx alpha, Kind kind, double r, double t);

    // sgn(tau) chi_{|tau|>=1} sin(sqrt(tau^2-1) r)/(4 pi r): transform of S_{1/2}
    // under F(tau) = (i/2) int f(t) e^{-i tau t} dt.
    double sine_fourier_transform(double r, double tau);

    struct FourierCheck {
        double r, window, dt, nyquist;
        double band_leak;        // energy on |tau| < 0.9 / energy on |tau| <= 0.8 nyquist
        double match_error;      // relative L2 error on 1.1 <= |tau| <= 0.8 nyquist
        double match_error_raw;  // same without the light-cone jump subtraction
        std::vector<double> tau;
        std::vector<double> numeric;  // real part of the discrete transform
        std::vector<double> exact;
    };
    FourierCheck fourier_support_check(double r, double half_window = 200.0, int samples = 1 << 15);

    // Radial profile of the kernel of (-Laplacian + 1)^{-alpha}, 0 < Re alpha < 3/2,
    // by Fourier-sine inversion (two integrations by parts make it absolutely convergent).
    cplx resolvent_power_kernel(cplx alpha, double rho);

    // Size bounds (constants omitted).
    double japanese(double x);
    double c1_bound(double r, double t);
    double fractional_bound(double a, double r, double t);
    double sine_bessel_bound(double r, double t);

    struct RadialTimeGrid {
        std::vector<double> r, t;
        static RadialTimeGrid make(double r0, double r1, int nr, bool log_r, double t0, double t1, int nt);
    };

    struct KernelField {
        std::string kernel;   // "S12", "C1", "S", "C", "E"
        cplx alpha;
        RadialTimeGrid grid;
        std::vector<cplx> values;  // row-major [ir * nt + it], regular part only
        std::vector<double> wave_mass;  // per radius, coefficient of sgn(t) delta(|t|-r)
        cplx at(size_t ir, size_t it) const { return values[ir * grid.t.size() + it]; }
    };

    KernelField sample_field(const std::string& kernel, cplx alpha, const RadialTimeGrid& grid, int jobs = 1);
    void write_field_csv(const KernelField& f, const std::string& path);
    std::string field_sidecar_json(const KernelField& f);

}
}
