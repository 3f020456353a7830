// Radial Klein-Gordon evolution by spectral calculus on [0, R] for w = r u
// with Dirichlet ends: free flow in the sine basis, perturbed flow in the
// eigenbasis of a discrete H = -d^2/dr^2 + V.
#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgl/kernels.hpp"
#include "kgl/norms.hpp"

namespace kgl {
namespace spectral {

    using cplx = std::complex<double>;
    using kernels::Kind;

    struct resolution_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    struct hypothesis_error : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    struct precondition_error : std::invalid_argument {
        using std::invalid_argument::invalid_argument;
    };

    struct RadialGrid1D {
        double R = 1.0;
        int N = 1;
        double h = 0.5;
        static RadialGrid1D make(double R, int N);
        double r(int j) const { return (j + 1) * h; }   // j = 0..N-1
        std::vector<double> nodes() const;
    };

    // gaussian: amplitude * exp(-(r/width)^2); box: amplitude on r < width;
    // file: two-column (r, V) table, linear interpolation, zero beyond the table.
    struct PotentialSpec {
        std::string type = "zero";
        double amplitude = 0.0;
        double width = 1.0;
        std::string file;
        std::vector<double> table_r, table_v;

        static PotentialSpec zero() { return {}; }
        static PotentialSpec gaussian(double amplitude, double width = 1.0);
        static PotentialSpec box(double amplitude, double radius);
        static PotentialSpec from_file(const std::string& path);
        double operator()(double r) const;
        std::vector<double> sample(const RadialGrid1D& g) const;
        std::string describe() const;
    };

    // Radial profiles of u (not w) at the grid nodes.
    struct CauchyData {
        std::vector<double> u0, u1;
        // ||(u0, u1)||_{H^1 x L^2} on R^3, evaluated spectrally.
        double norm_h1l2(const RadialGrid1D& g) const;
    };

    // Orthonormal DST-I: S = S^T = S^{-1}, S_jk = sqrt(2/(N+1)) sin(pi j k/(N+1)).
    class SineBasis {
    public:
        explicit SineBasis(int N);
        ~SineBasis();
        SineBasis(const SineBasis&) = delete;
        SineBasis& operator=(const SineBasis&) = delete;
        void apply(const double* in, double* out) const;
        int size() const { return n_; }

    private:
        int n_;
        void* plan_;
        double* buf_;
    };

    enum class Laplacian { spectral, finite_difference };

    struct DiscreteHamiltonian {
        RadialGrid1D grid;
        Laplacian laplacian = Laplacian::spectral;
        PotentialSpec potential;
        std::vector<double> V;
        std::vector<double> mu;       // ascending
        std::vector<double> vecs;     // column-major N x N, column k = eigenvector (unit l^2)
        std::vector<int> negative;    // indices with mu < 0
        double min_nonnegative = 0.0;
        bool near_zero_warning = false;
        double shooting_slope_ratio = 1.0;  // R w'(R)/w(R) for H w = 0 from w(0) = 0
        bool resonance_flag = false;

        const double* mode(int k) const { return vecs.data() + size_t(k) * grid.N; }
        // P_c applied to w values
        std::vector<double> project_continuous(const std::vector<double>& w) const;
        double pc_idempotence_error() const;
        double orthonormality_error() const;
    };

    DiscreteHamiltonian build_hamiltonian(const PotentialSpec& V, const RadialGrid1D& grid,
                                          Laplacian lap = Laplacian::spectral);

    std::string spectrum_json(const DiscreteHamiltonian& H, int max_listed = 32);

    // Sampled u(r_j, t_i), stored time-major.
    struct Field {
        RadialGrid1D grid;
        std::vector<double> times;
        std::vector<cplx> values;  // [it * N + j]
        cplx at(size_t it, size_t j) const { return values[it * grid.N + j]; }
        std::vector<double> sup_in_space() const;
        kernels::KernelField to_kernel_field(const std::string& label, cplx alpha) const;
    };

    // Mode-k multiplier m(t) / (mu_k + 1)^alpha with m = sin, cos or exp(i .).
    Field evolve_free(const RadialGrid1D& g, const std::vector<double>& f, cplx alpha, Kind kind,
                      const std::vector<double>& times);
    Field evolve_perturbed(const DiscreteHamiltonian& H, const std::vector<double>& f, cplx alpha, Kind kind,
                           const std::vector<double>& times, bool project = true);

    // u(t) and u_t(t) of u_tt - u_rr... with data (u0, u1), V = 0.
    struct CauchySolution {
        Field u, ut;
    };
    CauchySolution free_cauchy_evolution(const RadialGrid1D& g, const CauchyData& d, const std::vector<double>& times);
    // sqrt of 4 pi sum_k [(lambda_k^2 + 1)|w^_k|^2 + |w_t^_k|^2] h.
    double energy_norm(const RadialGrid1D& g, const std::vector<double>& u, const std::vector<double>& ut);

    // Share of the sine-coefficient energy above 0.8 of the top mode.
    double high_mode_fraction(const RadialGrid1D& g, const std::vector<double>& f);

    // Integrals over R^3 of radial profiles sampled on the grid.
    double l1_norm(const RadialGrid1D& g, const std::vector<double>& f);
    double l2_norm(const RadialGrid1D& g, const std::vector<double>& f);
    double gradient_l1_norm(const RadialGrid1D& g, const std::vector<double>& f);

    // Kernel of [sin(t sqrt(H+1))/sqrt(H+1) - sin(t sqrt H)/sqrt H] P_c between
    // the origin and the radius r_j, j in rho_index; result [it][i].
    std::vector<std::vector<double>> perturbed_bessel_kernel(const DiscreteHamiltonian& H,
                                                             const std::vector<int>& rho_index,
                                                             const std::vector<double>& times);

    struct AgmonResult {
        norms::DecayFit fit;    // exponent = slope of log|f_k| + log<r> against r
        double expected = 0.0;  // -sqrt(-mu_k)
        double mu = 0.0;
        double inner_mass = 0.0;
    };
    AgmonResult agmon_check(const DiscreteHamiltonian& H, int k);

    struct IdentityCheck {
        double left = 0.0, right = 0.0;
        double left_half_normalized = 0.0;  // same integral with 1/(2|t|) in front; equals (pi/2) left
        double tail_correction = 0.0;
        double truncation_bound = 0.0;
    };
    // (1/(pi |t|)) int_{-Lambda}^{Lambda} (cos(t sqrt(l^2+1)) - cos(t l)) e^{i l r} dl against
    // -chi_{r <= |t|} J_1(sqrt(t^2-r^2))/sqrt(t^2-r^2).
    IdentityCheck spectral_identity_check(double r, double t, double cutoff);

    struct StrichartzReport {
        double p = 2.0, q = 6.0, sigma = 0.0;
        std::vector<double> horizons;
        std::vector<std::vector<double>> ratios;  // [draw][horizon]
        double max_growth = 0.0;                  // max over draws of ratio(last)/ratio(first) - 1
    };
    // ||E_sigma(t) P_c f||_{L^p_t([0,T]) L^q_x} / ||f||_{L^2} with sigma = (1/p + 1/2 - 1/q)/2.
    StrichartzReport strichartz_norm_check(const DiscreteHamiltonian* H, const RadialGrid1D& g,
                                           const std::vector<std::vector<double>>& data, double p, double q,
                                           const std::vector<double>& horizons, double dt);

    // Sums of a few Gaussian bumps with random centres, widths and signs.
    std::vector<std::vector<double>> random_bump_data(const RadialGrid1D& g, unsigned long long seed, int count,
                                                      double max_centre = 4.0);

    // Kernel of S_beta, C_beta or E_beta (beta = (1+alpha)/2) at |x| = r by
    // Fourier-sine inversion of the radial multiplier; off the light cone only.
    cplx free_kernel_oracle(Kind kind, cplx alpha, double r, double t);

}
}
