// Lebesgue, weak-type and Lorentz quasi-norms of weighted samples, and
// log-log decay fits of kernel norms against the radius or time.
#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgl/kernels.hpp"

namespace kgl {
namespace norms {

    constexpr double inf = std::numeric_limits<double>::infinity();

    struct empty_input_error : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };
    struct fit_quality_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    struct LorentzSpec {
        double p = 2.0;
        double q = 2.0;   // q = inf: weak type

        static LorentzSpec lebesgue(double p) { return { p, p }; }
        static LorentzSpec weak(double p) { return { p, inf }; }
        // "2", "inf", "4,inf", "4/3,inf", "6,2"
        static LorentzSpec parse(const std::string& s);
        std::string str() const;
        void validate() const;
    };

    // Quasi-norm of the decreasing rearrangement of |values| with cell measures
    // `weights`.  q = p gives the L^p norm, q = inf the weak-L^p quasi-norm.
    double lorentz_norm(const std::vector<double>& values, const std::vector<double>& weights, const LorentzSpec& spec);
    double lorentz_norm(const std::vector<std::complex<double>>& values, const std::vector<double>& weights,
                        const LorentzSpec& spec);

    // Trapezoid cell measures of an increasing grid (a single point gets measure 1).
    std::vector<double> cell_measures(const std::vector<double>& x);

    // Inner norm over t at every radius, then outer norm over x with measure 4 pi r^2 dr.
    // `values` is row-major [ir * nt + it].
    double mixed_norm(const std::vector<double>& r, const std::vector<double>& t, const std::vector<double>& values,
                      const LorentzSpec& outer, const LorentzSpec& inner);
    double mixed_norm(const kernels::KernelField& field, const LorentzSpec& outer, const LorentzSpec& inner);

    struct DecayFit {
        double exponent = 0.0;
        double constant = 0.0;   // log of the prefactor
        double range_lo = 0.0, range_hi = 0.0;
        double max_residual = 0.0;
        std::vector<double> x, norm;
    };

    // Least squares on (log x, log y); needs >= 8 points over >= 1 decade.
    DecayFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

    enum class Region { all, inside_cone };

    struct ScanConfig {
        std::string kernel = "C1";       // C1, SB (Bessel part of S_{1/2}), S, C, E
        std::complex<double> alpha = 1.0; // exponent parameter for S, C, E
        std::string variable = "r";       // r: norm over t >= 0 per radius; t: norm over x per time
        LorentzSpec spec = LorentzSpec::lebesgue(1.0);
        double lo = 4.0, hi = 64.0;
        int points_per_decade = 16;
        Region region = Region::all;
        int jobs = 1;
        double max_residual = 0.15;
    };

    struct ScanRow {
        double x, norm, tail_fraction;
        int samples;
    };

    struct ScanResult {
        DecayFit fit;
        std::vector<ScanRow> rows;
    };

    // Throws fit_quality_error when the log-log residual exceeds cfg.max_residual.
    ScanResult decay_scan(const ScanConfig& cfg);

    // Norm over t >= 0 (or t > r) of the kernel at one radius; the tail beyond
    // the sampled window is added from the power envelope for Lebesgue specs.
    ScanRow kernel_time_norm(const ScanConfig& cfg, double r);

    std::string decay_record_json(const ScanConfig& cfg, const DecayFit& fit, double expected, double tolerance);
    void write_scan_csv(const ScanResult& res, const std::string& path);

}
}
