// Quintic Klein-Gordon u_tt - Delta u + u + V u = -sign u^5 + F for radial
// data: Picard iteration of the Duhamel map and a Strang-split cross-check.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kgl/spectral.hpp"

namespace kgl {
namespace semilinear {

    using spectral::CauchyData;
    using spectral::Field;
    using spectral::PotentialSpec;
    using spectral::RadialGrid1D;

    struct divergence_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    struct smallness_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    struct blowup_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    // F(r, t) = amplitude exp(-(r/width)^2) cos(frequency t)
    struct ForcingSpec {
        double amplitude = 0.0;
        double width = 1.0;
        double frequency = 0.0;
        bool active() const { return amplitude != 0.0; }
    };

    struct NonlinearConfig {
        int sign = 1;            // +1 defocusing, -1 focusing
        double epsilon = 1e-2;   // data scale
        double T = 40.0;
        double dt = 0.01;
        double R = 64.0;
        int N = 1023;
        PotentialSpec potential;
        ForcingSpec forcing;
        double delta = 1.6;      // bound on the ledger norm of the first iterate
        int max_iterations = 30;
        double noise_floor = 1e-13;

        void validate() const;
        RadialGrid1D grid() const { return RadialGrid1D::make(R, N); }
        std::vector<double> times() const;
    };

    // epsilon * (exp(-r^2), 0)
    CauchyData gaussian_data(const RadialGrid1D& g, double epsilon, double width = 1.0);

    struct LedgerEntry {
        double l62_linf = 0.0;        // L^{6,2}_x L^inf_t
        double l16_3_l16_2 = 0.0;     // L^{16/3,2}_x L^{16,2}_t
        double total() const { return l62_linf + l16_3_l16_2; }
    };

    struct IterationRecord {
        int n = 0;
        LedgerEntry norm;             // of u_n
        double difference = 0.0;      // ledger total of u_n - u_{n-1}; n = 0: of u_0
        double ratio = 0.0;           // difference_n / difference_{n-1}; 0 when undefined
        double contraction_constant = 0.0;  // d_n / ((|u_{n-1}|^4 + |u_{n-2}|^4) d_{n-1}); 0 when undefined or at the noise floor
    };

    struct IterationState {
        int n = 0;
        Field u;                      // current iterate
        Field linear;                 // u_0, the linear evolution of the data
        std::vector<IterationRecord> history;
        bool converged = false;
        bool hit_noise_floor = false;
        double data_norm = 0.0;       // ||(u0, u1)||_{H^1 x L^2}
        double forcing_norm = 0.0;    // ||F||_{L^1_t L^2_x}
    };

    // u_n = C^H_0 u0 + S^H_{1/2} u1 + int_0^t S^H_{1/2}(t-s) (-sign u_{n-1}^5 + F)(s) ds, u_{-1} = 0.
    IterationState picard_iterate(const NonlinearConfig& cfg, const CauchyData& data);

    // One application of the Duhamel map to a sampled field on cfg.times().
    Field duhamel_map(const NonlinearConfig& cfg, const CauchyData& data, const Field& u);

    // Kick-drift-kick with the exact linear flow; throws blowup_error once
    // sup|u| exceeds 1000 times its initial value.
    Field direct_integrate(const NonlinearConfig& cfg, const CauchyData& data);

    struct NormReport {
        std::string name;
        double value = 0.0;
        double ratio = 0.0;           // value / data norm (0 when the data norm is 0)
    };
    // The two ledger norms and L^inf_x L^2_t, L^{12,2}_x L^2_t, L^{24/5,2}_x L^{8,2}_t.
    std::vector<NormReport> reversed_ledger(const Field& u, double data_norm);

    LedgerEntry ledger_norms(const Field& u);

    // L^2_x distance at the last time over the L^2_x norm of b there.
    double relative_l2_at_end(const Field& a, const Field& b);
    // ledger total of a - b
    double ledger_distance(const Field& a, const Field& b);

    std::string run_manifest_json(const NonlinearConfig& cfg, const IterationState& st,
                                  const std::vector<std::pair<std::string, double>>& comparisons = {});

}
}
