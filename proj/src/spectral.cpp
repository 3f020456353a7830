#include "kgl/spectral.hpp"
#include "kgl/quadrature.hpp"
#include "kgl/specfun.hpp"
#include "fftw_lock.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <fftw3.h>
#include <lapacke.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

namespace kgl {

std::mutex& detail::fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

namespace spectral {

namespace {
    constexpr double pi = 3.14159265358979323846;
    const cplx I(0.0, 1.0);

    std::vector<double> sine_frequencies(const RadialGrid1D& g)
    {
        std::vector<double> lam2(g.N);
        for (int k = 0; k < g.N; ++k) {
            const double l = (k + 1) * pi / g.R;
            lam2[k] = l * l;
        }
        return lam2;
    }

    void check_profile(const RadialGrid1D& g, const std::vector<double>& f)
    {
        if (int(f.size()) != g.N) throw std::invalid_argument("profile length does not match the grid");
        for (double v : f)
            if (!std::isfinite(v)) throw std::domain_error("profile has non-finite samples");
    }

    std::vector<double> to_w(const RadialGrid1D& g, const std::vector<double>& u)
    {
        std::vector<double> w(g.N);
        for (int j = 0; j < g.N; ++j) w[j] = g.r(j) * u[j];
        return w;
    }

    void require_resolved(const RadialGrid1D& g, const std::vector<double>& f)
    {
        const double frac = high_mode_fraction(g, f);
        if (frac > 1e-10) {
            throw resolution_error("data carries " + std::to_string(frac) +
                                   " of its energy above 0.8 of the top mode; refine the grid");
        }
    }

    cplx time_factor(Kind kind, double t, double omega)
    {
        switch (kind) {
        case Kind::S: return std::sin(t * omega);
        case Kind::C: return std::cos(t * omega);
        case Kind::E: return std::exp(I * (t * omega));
        }
        return 0.0;
    }

    // Spectral evolution given mode values mu_k, coefficient vector c and a
    // synthesis callback from mode coefficients to w values.
    template <class Synth>
    Field evolve_modes(const RadialGrid1D& g, const std::vector<double>& mu, const std::vector<double>& c,
                       const std::vector<char>& keep, cplx alpha, Kind kind, const std::vector<double>& times,
                       Synth&& synth)
    {
        const int N = g.N;
        const size_t T = times.size();
        std::vector<cplx> weight(N, 0.0);
        std::vector<double> omega(N, 0.0);
        for (int k = 0; k < N; ++k) {
            if (!keep[k]) continue;
            const double nu = mu[k] + 1.0;
            omega[k] = std::sqrt(nu);
            weight[k] = c[k] * std::exp(-alpha * std::log(nu));
        }
        std::vector<double> re(size_t(N) * T), im(size_t(N) * T);
        for (size_t it = 0; it < T; ++it)
            for (int k = 0; k < N; ++k) {
                const cplx m = keep[k] ? weight[k] * time_factor(kind, times[it], omega[k]) : 0.0;
                re[it * N + k] = m.real();
                im[it * N + k] = m.imag();
            }
        std::vector<double> wr(re.size()), wi(im.size());
        synth(re.data(), wr.data(), T);
        synth(im.data(), wi.data(), T);
        Field F;
        F.grid = g;
        F.times = times;
        F.values.resize(size_t(N) * T);
        for (size_t it = 0; it < T; ++it)
            for (int j = 0; j < N; ++j) F.values[it * N + j] = cplx(wr[it * N + j], wi[it * N + j]) / g.r(j);
        return F;
    }

    // H w = 0 from w(0) = 0, w'(0) = 1 by RK4; returns R w'(R) / w(R).
    double shooting_ratio(const PotentialSpec& V, double R, double h)
    {
        const int n = std::max(1000, int(std::ceil(R / (0.25 * h))));
        const double dr = R / n;
        double w = 0.0, p = 1.0, r = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k1w = p, k1p = V(r) * w;
            const double k2w = p + 0.5 * dr * k1p, k2p = V(r + 0.5 * dr) * (w + 0.5 * dr * k1w);
            const double k3w = p + 0.5 * dr * k2p, k3p = V(r + 0.5 * dr) * (w + 0.5 * dr * k2w);
            const double k4w = p + dr * k3p, k4p = V(r + dr) * (w + dr * k3w);
            w += dr / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
            p += dr / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            r += dr;
            const double s = std::max(std::abs(w), std::abs(p));
            if (s > 1e100) {
                w /= s;
                p /= s;
            }
        }
        if (w == 0.0) return 0.0;
        return R * p / w;
    }
}

RadialGrid1D RadialGrid1D::make(double R, int N)
{
    if (!(R > 0.0)) throw std::invalid_argument("domain radius must be positive");
    if (N < 8) throw std::invalid_argument("need at least 8 interior nodes");
    RadialGrid1D g;
    g.R = R;
    g.N = N;
    g.h = R / (N + 1);
    return g;
}

std::vector<double> RadialGrid1D::nodes() const
{
    std::vector<double> r(N);
    for (int j = 0; j < N; ++j) r[j] = this->r(j);
    return r;
}

PotentialSpec PotentialSpec::gaussian(double amplitude, double width)
{
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    PotentialSpec p;
    p.type = "gaussian";
    p.amplitude = amplitude;
    p.width = width;
    return p;
}

PotentialSpec PotentialSpec::box(double amplitude, double radius)
{
    if (!(radius > 0.0)) throw std::invalid_argument("box radius must be positive");
    PotentialSpec p;
    p.type = "box";
    p.amplitude = amplitude;
    p.width = radius;
    return p;
}

PotentialSpec PotentialSpec::from_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot read potential table " + path);
    PotentialSpec p;
    p.type = "file";
    p.file = path;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double r, v;
        if (!(ls >> r >> v)) continue;
        if (!p.table_r.empty() && !(r > p.table_r.back())) throw std::invalid_argument("potential table radii must increase");
        p.table_r.push_back(r);
        p.table_v.push_back(v);
    }
    if (p.table_r.size() < 2) throw std::invalid_argument("potential table needs two rows");
    return p;
}

double PotentialSpec::operator()(double r) const
{
    if (type == "zero") return 0.0;
    if (type == "gaussian") return amplitude * std::exp(-(r / width) * (r / width));
    if (type == "box") return r < width ? amplitude : 0.0;
    if (type == "file") {
        if (r <= table_r.front()) return table_v.front();
        if (r >= table_r.back()) return 0.0;
        const auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
        const size_t i = size_t(it - table_r.begin());
        const double s = (r - table_r[i - 1]) / (table_r[i] - table_r[i - 1]);
        return table_v[i - 1] + s * (table_v[i] - table_v[i - 1]);
    }
    throw std::invalid_argument("unknown potential type '" + type + "'");
}

std::vector<double> PotentialSpec::sample(const RadialGrid1D& g) const
{
    std::vector<double> v(g.N);
    for (int j = 0; j < g.N; ++j) v[j] = (*this)(g.r(j));
    return v;
}

std::string PotentialSpec::describe() const
{
    std::ostringstream os;
    if (type == "gaussian") os << amplitude << "*exp(-(r/" << width << ")^2)";
    else if (type == "box") os << amplitude << "*chi(r<" << width << ")";
    else if (type == "file") os << "table:" << file;
    else os << "0";
    return os.str();
}

SineBasis::SineBasis(int N) : n_(N)
{
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    buf_ = fftw_alloc_real(2 * size_t(N));
    plan_ = fftw_plan_r2r_1d(N, buf_, buf_ + N, FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SineBasis::~SineBasis()
{
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    fftw_free(buf_);
}

void SineBasis::apply(const double* in, double* out) const
{
    std::vector<double> a(in, in + n_), b(n_);
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), a.data(), b.data());
    const double s = 1.0 / std::sqrt(2.0 * (n_ + 1));
    for (int k = 0; k < n_; ++k) out[k] = b[k] * s;
}

double CauchyData::norm_h1l2(const RadialGrid1D& g) const
{
    check_profile(g, u0);
    check_profile(g, u1);
    SineBasis S(g.N);
    const auto lam2 = sine_frequencies(g);
    std::vector<double> c0(g.N), c1(g.N);
    S.apply(to_w(g, u0).data(), c0.data());
    S.apply(to_w(g, u1).data(), c1.data());
    double e = 0.0;
    for (int k = 0; k < g.N; ++k) e += (lam2[k] + 1.0) * c0[k] * c0[k] + c1[k] * c1[k];
    return std::sqrt(4.0 * pi * g.h * e);
}

std::vector<double> DiscreteHamiltonian::project_continuous(const std::vector<double>& w) const
{
    std::vector<double> out = w;
    const int N = grid.N;
    for (int k : negative) {
        const double* e = mode(k);
        const double c = cblas_ddot(N, e, 1, w.data(), 1);
        cblas_daxpy(N, -c, e, 1, out.data(), 1);
    }
    return out;
}

double DiscreteHamiltonian::pc_idempotence_error() const
{
    // P = I - Q Q^T, P^2 - P = Q (Q^T Q - I) Q^T
    const int N = grid.N;
    const int m = int(negative.size());
    if (m == 0) return 0.0;
    std::vector<double> G(size_t(m) * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            G[a * m + b] = cblas_ddot(N, mode(negative[a]), 1, mode(negative[b]), 1) - (a == b ? 1.0 : 0.0);
    double worst = 0.0;
    std::vector<double> row(m);
    for (int i = 0; i < N; ++i) {
        for (int a = 0; a < m; ++a) {
            row[a] = 0.0;
            for (int b = 0; b < m; ++b) row[a] += G[a * m + b] * mode(negative[b])[i];
        }
        for (int j = 0; j < N; ++j) {
            double s = 0.0;
            for (int a = 0; a < m; ++a) s += mode(negative[a])[j] * row[a];
            worst = std::max(worst, std::abs(s));
        }
    }
    return worst;
}

double DiscreteHamiltonian::orthonormality_error() const
{
    const int N = grid.N;
    std::vector<double> G(size_t(N) * N);
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, N, N, N, 1.0, vecs.data(), N, vecs.data(), N, 0.0, G.data(), N);
    double worst = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) worst = std::max(worst, std::abs(G[size_t(i) * N + j] - (i == j ? 1.0 : 0.0)));
    return worst;
}

DiscreteHamiltonian build_hamiltonian(const PotentialSpec& pot, const RadialGrid1D& g, Laplacian lap)
{
    DiscreteHamiltonian H;
    H.grid = g;
    H.laplacian = lap;
    H.potential = pot;
    H.V = pot.sample(g);
    for (double v : H.V)
        if (!std::isfinite(v)) throw std::invalid_argument("potential must be bounded on the grid");
    const int N = g.N;
    H.mu.assign(N, 0.0);
    H.vecs.assign(size_t(N) * N, 0.0);
    int info = 0;
    if (lap == Laplacian::finite_difference) {
        std::vector<double> off(N - 1, -1.0 / (g.h * g.h));
        for (int j = 0; j < N; ++j) H.mu[j] = 2.0 / (g.h * g.h) + H.V[j];
        info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', N, H.mu.data(), off.data(), H.vecs.data(), N);
    } else {
        const auto lam2 = sine_frequencies(g);
        SineBasis S(N);
        std::vector<double> e(N, 0.0), y(N);
        for (int l = 0; l < N; ++l) {
            std::fill(e.begin(), e.end(), 0.0);
            e[l] = 1.0;
            S.apply(e.data(), y.data());
            for (int k = 0; k < N; ++k) y[k] *= lam2[k];
            double* col = H.vecs.data() + size_t(l) * N;
            S.apply(y.data(), col);
        }
        for (int l = 0; l < N; ++l) {
            for (int j = 0; j < l; ++j) {
                // symmetrize rounding
                const double a = H.vecs[size_t(l) * N + j], b = H.vecs[size_t(j) * N + l];
                if (std::abs(a - b) > 1e-8 * (1.0 + std::abs(a))) throw std::logic_error("discrete Laplacian lost symmetry");
                H.vecs[size_t(l) * N + j] = H.vecs[size_t(j) * N + l] = 0.5 * (a + b);
            }
            H.vecs[size_t(l) * N + l] += H.V[l];
        }
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', N, H.vecs.data(), N, H.mu.data());
    }
    if (info != 0) throw std::runtime_error("eigensolver failed with info " + std::to_string(info));
    H.min_nonnegative = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
        if (H.mu[k] < 0.0) H.negative.push_back(k);
        else H.min_nonnegative = std::min(H.min_nonnegative, H.mu[k]);
    }
    // one quarter of the free ground gap: the lowest box level of an exact zero-energy resonance
    const double grid_tol = 0.25 * (pi / g.R) * (pi / g.R);
    H.near_zero_warning = H.min_nonnegative < 3.0 * grid_tol;
    H.shooting_slope_ratio = shooting_ratio(pot, g.R, g.h);
    H.resonance_flag = std::abs(H.shooting_slope_ratio) < 0.1;
    return H;
}

std::string spectrum_json(const DiscreteHamiltonian& H, int max_listed)
{
    nlohmann::ordered_json j;
    j["potential"] = H.potential.describe();
    j["R"] = H.grid.R;
    j["N"] = H.grid.N;
    j["laplacian"] = H.laplacian == Laplacian::spectral ? "sine-pseudospectral" : "finite-difference";
    std::vector<double> listed(H.mu.begin(), H.mu.begin() + std::min<size_t>(H.mu.size(), size_t(max_listed)));
    j["eigenvalues"] = listed;
    j["n_negative"] = H.negative.size();
    j["min_nonnegative"] = H.min_nonnegative;
    j["near_zero_warning"] = H.near_zero_warning;
    j["shooting_slope_ratio"] = H.shooting_slope_ratio;
    j["resonance_flag"] = H.resonance_flag;
    return j.dump(2);
}

std::vector<double> Field::sup_in_space() const
{
    std::vector<double> s(times.size(), 0.0);
    for (size_t it = 0; it < times.size(); ++it)
        for (int j = 0; j < grid.N; ++j) s[it] = std::max(s[it], std::abs(at(it, j)));
    return s;
}

kernels::KernelField Field::to_kernel_field(const std::string& label, cplx alpha) const
{
    kernels::KernelField k;
    k.kernel = label;
    k.alpha = alpha;
    k.grid.r = grid.nodes();
    k.grid.t = times;
    k.wave_mass.assign(grid.N, 0.0);
    k.values.resize(values.size());
    const size_t nt = times.size();
    for (size_t it = 0; it < nt; ++it)
        for (int j = 0; j < grid.N; ++j) k.values[size_t(j) * nt + it] = at(it, j);
    return k;
}

double high_mode_fraction(const RadialGrid1D& g, const std::vector<double>& f)
{
    check_profile(g, f);
    SineBasis S(g.N);
    std::vector<double> c(g.N);
    S.apply(to_w(g, f).data(), c.data());
    double total = 0.0, high = 0.0;
    const int cut = int(0.8 * g.N);
    for (int k = 0; k < g.N; ++k) {
        total += c[k] * c[k];
        if (k >= cut) high += c[k] * c[k];
    }
    return total > 0.0 ? high / total : 0.0;
}

Field evolve_free(const RadialGrid1D& g, const std::vector<double>& f, cplx alpha, Kind kind,
                  const std::vector<double>& times)
{
    check_profile(g, f);
    if (alpha.real() < 0.0) throw std::invalid_argument("evolve_free needs Re alpha >= 0");
    require_resolved(g, f);
    SineBasis S(g.N);
    std::vector<double> c(g.N);
    S.apply(to_w(g, f).data(), c.data());
    const std::vector<char> keep(g.N, 1);
    auto synth = [&](const double* in, double* out, size_t T) {
        for (size_t it = 0; it < T; ++it) S.apply(in + it * g.N, out + it * g.N);
    };
    return evolve_modes(g, sine_frequencies(g), c, keep, alpha, kind, times, synth);
}

Field evolve_perturbed(const DiscreteHamiltonian& H, const std::vector<double>& f, cplx alpha, Kind kind,
                       const std::vector<double>& times, bool project)
{
    const RadialGrid1D& g = H.grid;
    check_profile(g, f);
    require_resolved(g, f);
    const int N = g.N;
    std::vector<char> keep(N, 1);
    for (int k = 0; k < N; ++k) {
        if (project && H.mu[k] < 0.0) keep[k] = 0;
        else if (H.mu[k] <= -1.0)
            throw hypothesis_error("mode with eigenvalue " + std::to_string(H.mu[k]) +
                                   " <= -1 grows exponentially; apply P_c");
    }
    const auto w = to_w(g, f);
    std::vector<double> c(N);
    cblas_dgemv(CblasColMajor, CblasTrans, N, N, 1.0, H.vecs.data(), N, w.data(), 1, 0.0, c.data(), 1);
    auto synth = [&](const double* in, double* out, size_t T) {
        cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, N, int(T), N, 1.0, H.vecs.data(), N, in, N, 0.0, out, N);
    };
    return evolve_modes(g, H.mu, c, keep, alpha, kind, times, synth);
}

CauchySolution free_cauchy_evolution(const RadialGrid1D& g, const CauchyData& d, const std::vector<double>& times)
{
    check_profile(g, d.u0);
    check_profile(g, d.u1);
    require_resolved(g, d.u0);
    require_resolved(g, d.u1);
    SineBasis S(g.N);
    const int N = g.N;
    std::vector<double> c0(N), c1(N);
    S.apply(to_w(g, d.u0).data(), c0.data());
    S.apply(to_w(g, d.u1).data(), c1.data());
    const auto lam2 = sine_frequencies(g);
    CauchySolution sol;
    for (Field* F : { &sol.u, &sol.ut }) {
        F->grid = g;
        F->times = times;
        F->values.assign(size_t(N) * times.size(), 0.0);
    }
    std::vector<double> a(N), b(N), wa(N), wb(N);
    for (size_t it = 0; it < times.size(); ++it) {
        const double t = times[it];
        for (int k = 0; k < N; ++k) {
            const double om = std::sqrt(lam2[k] + 1.0);
            const double cs = std::cos(t * om), sn = std::sin(t * om);
            a[k] = cs * c0[k] + sn / om * c1[k];
            b[k] = -om * sn * c0[k] + cs * c1[k];
        }
        S.apply(a.data(), wa.data());
        S.apply(b.data(), wb.data());
        for (int j = 0; j < N; ++j) {
            sol.u.values[it * N + j] = wa[j] / g.r(j);
            sol.ut.values[it * N + j] = wb[j] / g.r(j);
        }
    }
    return sol;
}

double energy_norm(const RadialGrid1D& g, const std::vector<double>& u, const std::vector<double>& ut)
{
    CauchyData d{ u, ut };
    return d.norm_h1l2(g);
}

double l1_norm(const RadialGrid1D& g, const std::vector<double>& f)
{
    check_profile(g, f);
    double s = 0.0;
    for (int j = 0; j < g.N; ++j) s += std::abs(f[j]) * g.r(j) * g.r(j);
    return 4.0 * pi * g.h * s;
}

double l2_norm(const RadialGrid1D& g, const std::vector<double>& f)
{
    check_profile(g, f);
    double s = 0.0;
    for (int j = 0; j < g.N; ++j) s += f[j] * f[j] * g.r(j) * g.r(j);
    return std::sqrt(4.0 * pi * g.h * s);
}

double gradient_l1_norm(const RadialGrid1D& g, const std::vector<double>& f)
{
    check_profile(g, f);
    double s = 0.0;
    for (int j = 0; j < g.N; ++j) {
        const double fp = j + 1 == g.N ? 0.0 : f[j + 1];
        const double d = j == 0 ? (fp - f[0]) / g.h : (fp - f[j - 1]) / (2.0 * g.h);
        s += std::abs(d) * g.r(j) * g.r(j);
    }
    return 4.0 * pi * g.h * s;
}

std::vector<std::vector<double>> perturbed_bessel_kernel(const DiscreteHamiltonian& H, const std::vector<int>& rho_index,
                                                         const std::vector<double>& times)
{
    const RadialGrid1D& g = H.grid;
    const int N = g.N;
    for (int j : rho_index)
        if (j < 0 || j >= N) throw std::out_of_range("radius index outside the grid");
    // phi_k'(0) from the sine-series interpolant of each eigenvector
    SineBasis S(N);
    std::vector<double> v(N), u(N), d(N);
    for (int m = 0; m < N; ++m) v[m] = std::sqrt(2.0 / g.R) * (m + 1) * pi / g.R;
    S.apply(v.data(), u.data());
    cblas_dgemv(CblasColMajor, CblasTrans, N, N, 1.0, H.vecs.data(), N, u.data(), 1, 0.0, d.data(), 1);
    std::vector<char> keep(N, 1);
    for (int k = 0; k < N; ++k) {
        if (H.mu[k] < 0.0) keep[k] = 0;
    }
    // smooth roll-off instead of the sharp truncation at the top mode
    const double lmax = N * pi / g.R;
    std::vector<double> filt(N);
    for (int k = 0; k < N; ++k) filt[k] = std::exp(-36.0 * std::pow(std::sqrt(std::max(H.mu[k], 0.0)) / lmax, 8));
    const size_t T = times.size();
    std::vector<double> M(size_t(N) * T);
    for (size_t it = 0; it < T; ++it) {
        const double t = times[it];
        for (int k = 0; k < N; ++k) {
            double m = 0.0;
            if (keep[k]) {
                const double mu = H.mu[k];
                const double om = std::sqrt(mu + 1.0);
                const double wave = mu > 0.0 ? std::sin(t * std::sqrt(mu)) / std::sqrt(mu) : t;
                m = std::sin(t * om) / om - wave;
            }
            M[it * N + k] = m * d[k] * filt[k];
        }
    }
    const int n = int(rho_index.size());
    std::vector<double> rows(size_t(n) * N);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < N; ++k) rows[size_t(k) * n + i] = H.vecs[size_t(k) * N + rho_index[i]];
    std::vector<double> out(size_t(n) * T);
    cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, int(T), N, 1.0, rows.data(), n, M.data(), N, 0.0,
                out.data(), n);
    std::vector<std::vector<double>> K(T, std::vector<double>(n));
    for (size_t it = 0; it < T; ++it)
        for (int i = 0; i < n; ++i) {
            const double rho = g.r(rho_index[i]);
            K[it][i] = out[it * n + i] / (std::sqrt(g.h) * 4.0 * pi * rho);
        }
    return K;
}

AgmonResult agmon_check(const DiscreteHamiltonian& H, int k)
{
    const RadialGrid1D& g = H.grid;
    if (k < 0 || k >= g.N) throw std::out_of_range("mode index outside the spectrum");
    if (!(H.mu[k] < 0.0)) throw precondition_error("mode " + std::to_string(k) + " is not a bound state (mu >= 0)");
    const double* e = H.mode(k);
    AgmonResult res;
    res.mu = H.mu[k];
    res.expected = -std::sqrt(-H.mu[k]);
    double inner = 0.0, total = 0.0, peak = 0.0;
    int last_sign_change = 0;
    for (int j = 0; j < g.N; ++j) {
        total += e[j] * e[j];
        if (g.r(j) < 0.5 * g.R) inner += e[j] * e[j];
        peak = std::max(peak, std::abs(e[j]));
        if (j > 0 && e[j] * e[j - 1] < 0.0 && std::abs(e[j]) > 1e-8 * peak) last_sign_change = j;
    }
    res.inner_mass = inner / total;
    if (res.inner_mass < 0.999) throw resolution_error("eigenfunction not resolved: mass inside R/2 is " + std::to_string(res.inner_mass));
    // far field: beyond the potential and the last node, above the rounding floor
    double r_pot = 0.0;
    for (int j = g.N - 1; j >= 0; --j)
        if (std::abs(H.V[j]) > 1e-4 * (-H.mu[k])) {
            r_pot = g.r(j);
            break;
        }
    const double lam = std::sqrt(-H.mu[k]);
    const double r_lo = std::max({ r_pot, g.r(last_sign_change) + 2.0 / lam, 3.0 });
    std::vector<double> x, y;
    for (int j = 0; j < g.N; ++j) {
        const double r = g.r(j);
        if (r < r_lo || r > 0.5 * g.R) continue;
        if (std::abs(e[j]) < 1e-10 * peak) break;
        const double f = std::abs(e[j]) / (std::sqrt(g.h) * r);
        x.push_back(r);
        y.push_back(std::log(f) + std::log(std::sqrt(1.0 + r * r)));
    }
    if (x.size() < 8) throw resolution_error("too few far-field samples for the decay fit");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    auto& fit = res.fit;
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.constant = (sy - fit.exponent * sx) / n;
    fit.range_lo = x.front();
    fit.range_hi = x.back();
    for (size_t i = 0; i < n; ++i) fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - fit.constant - fit.exponent * x[i]));
    fit.x = x;
    fit.norm = y;
    return res;
}

IdentityCheck spectral_identity_check(double r, double t, double cutoff)
{
    if (t == 0.0) throw precondition_error("identity requires t != 0");
    if (!(r > 0.0)) throw precondition_error("identity requires r > 0");
    const double at = std::abs(t);
    const double need = 40.0 / std::min(1.0, std::abs(t * t - r * r));
    if (cutoff < need) throw precondition_error("frequency cutoff " + std::to_string(cutoff) + " below required " + std::to_string(need));
    IdentityCheck out;
    auto f = [at, r](double l) -> quad::cplx {
        return (std::cos(at * std::sqrt(l * l + 1.0)) - std::cos(at * l)) * std::cos(l * r);
    };
    const double panel = 0.5 * pi / (at + r);
    const int n = int(std::ceil(cutoff / panel));
    double body = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = cutoff * i / n, b = cutoff * (i + 1) / n;
        body += quad::adaptive(f, a, b, 1e-14).value.real();
    }
    // beyond the cutoff: cos(t w) - cos(t l) = -(t/2l) sin(t l) - (t^2/8l^2) cos(t l) + O(l^-3)
    auto sin_tail = [cutoff](double c) {
        if (c == 0.0) return 0.0;
        const double ac = std::abs(c);
        auto g = [ac](double l) -> quad::cplx { return std::sin(ac * l) / l; };
        auto bp = [cutoff, ac](int j) { return cutoff + j * pi / ac; };
        return (c > 0 ? 1.0 : -1.0) * quad::oscillatory(g, bp, 1e-15).value.real();
    };
    auto cos2_tail = [cutoff](double c) {
        const double ac = std::abs(c);
        if (ac == 0.0) return 1.0 / cutoff;
        auto g = [ac](double l) -> quad::cplx { return std::cos(ac * l) / (l * l); };
        auto bp = [cutoff, ac](int j) { return cutoff + j * pi / ac; };
        return quad::oscillatory(g, bp, 1e-16).value.real();
    };
    const double cp = at + r, cm = at - r;
    const double tail = -0.25 * at * (sin_tail(cp) + sin_tail(cm)) - (at * at / 16.0) * (cos2_tail(cp) + cos2_tail(cm));
    // int_{-L}^{L} (...) e^{i l r} dl = 2 * (body + tail)
    out.left_half_normalized = (body + tail) / at;
    const double c = 2.0 / pi;
    out.tail_correction = c * tail / at;
    out.left = c * (body + tail) / at;
    out.truncation_bound = c * (at / 16.0 + at * at * at / 48.0) / (cutoff * cutoff) / at;
    out.right = r <= at ? -specfun::j1_over_z(std::sqrt((at - r) * (at + r))) : 0.0;
    return out;
}

StrichartzReport strichartz_norm_check(const DiscreteHamiltonian* H, const RadialGrid1D& grid,
                                       const std::vector<std::vector<double>>& data, double p, double q,
                                       const std::vector<double>& horizons, double dt)
{
    const bool p_inf = std::isinf(p);
    if (!(p >= 2.0) || !(q >= 2.0) || std::abs((p_inf ? 0.0 : 2.0 / p) + 3.0 / q - 1.5) > 1e-12)
        throw precondition_error("(p, q) is not an admissible pair: need 2/p + 3/q = 3/2 with p >= 2");
    if (horizons.empty() || !(dt > 0.0)) throw std::invalid_argument("need horizons and a positive time step");
    const RadialGrid1D& g = H ? H->grid : grid;
    StrichartzReport rep;
    rep.p = p;
    rep.q = q;
    rep.sigma = 0.5 * ((p_inf ? 0.0 : 1.0 / p) + 0.5 - 1.0 / q);
    rep.horizons = horizons;
    const double Tmax = *std::max_element(horizons.begin(), horizons.end());
    const int nt = int(std::round(Tmax / dt));
    std::vector<double> times(nt + 1);
    for (int i = 0; i <= nt; ++i) times[i] = i * dt;
    const auto wt = norms::cell_measures(times);
    for (const auto& f : data) {
        const Field F = H ? evolve_perturbed(*H, f, rep.sigma, Kind::E, times, true)
                          : evolve_free(g, f, rep.sigma, Kind::E, times);
        std::vector<double> lq(times.size());
        for (size_t it = 0; it < times.size(); ++it) {
            double s = 0.0;
            for (int j = 0; j < g.N; ++j) s += std::pow(std::abs(F.at(it, j)), q) * g.r(j) * g.r(j);
            lq[it] = std::pow(4.0 * pi * g.h * s, 1.0 / q);
        }
        const double f2 = l2_norm(g, f);
        std::vector<double> ratios;
        for (double T : horizons) {
            const size_t m = size_t(std::round(T / dt)) + 1;
            std::vector<double> v(lq.begin(), lq.begin() + m);
            std::vector<double> w(times.begin(), times.begin() + m);
            const double nrm = norms::lorentz_norm(v, norms::cell_measures(w), norms::LorentzSpec::lebesgue(p));
            ratios.push_back(nrm / f2);
        }
        rep.max_growth = std::max(rep.max_growth, ratios.back() / ratios.front() - 1.0);
        rep.ratios.push_back(ratios);
    }
    return rep;
}

std::vector<std::vector<double>> random_bump_data(const RadialGrid1D& g, unsigned long long seed, int count,
                                                  double max_centre)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(0.0, max_centre), width(0.5, 1.5);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::vector<std::vector<double>> out;
    for (int d = 0; d < count; ++d) {
        std::vector<double> f(g.N, 0.0);
        for (int b = 0; b < 3; ++b) {
            const double c = centre(rng), w = width(rng), a = amp(rng);
            for (int j = 0; j < g.N; ++j) {
                const double r = g.r(j);
                f[j] += a * (std::exp(-((r - c) / w) * ((r - c) / w)) + std::exp(-((r + c) / w) * ((r + c) / w)));
            }
        }
        const double n = l2_norm(g, f);
        for (double& v : f) v /= n;
        out.push_back(std::move(f));
    }
    return out;
}

cplx free_kernel_oracle(Kind kind, cplx alpha, double r, double t)
{
    if (!(r > 0.0)) throw std::domain_error("oracle needs r > 0");
    if (std::abs(std::abs(t) - r) < 1e-9 * r) throw std::domain_error("oracle is off the light cone only");
    if (!(alpha.real() > 0.0)) throw std::domain_error("oracle needs Re alpha > 0");
    const cplx beta = 0.5 * (1.0 + alpha);
    // J(s1, s2) = int_0^inf l (l^2+1)^{-beta} exp(i (s1 l r + s2 t w)) dl
    auto J = [&](int s1, int s2) -> cplx {
        auto amp = [beta](double l) { return l * std::exp(-beta * std::log(l * l + 1.0)); };
        auto f = [&, s1, s2](double l) -> quad::cplx {
            return amp(l) * std::exp(I * (s1 * l * r + s2 * t * std::sqrt(l * l + 1.0)));
        };
        const double kinf = s1 * r + s2 * t;
        double l_stat = 0.0;
        const double rho = -s1 * r / (s2 * t);
        if (t != 0.0 && rho > 0.0 && rho < 1.0) l_stat = rho / std::sqrt(1.0 - rho * rho);
        const double L0 = std::max(2.0 * l_stat, 1.0) + 20.0 * pi / std::abs(kinf);
        const double width = pi / (r + std::abs(t) + 1.0);
        const int n = int(std::ceil(L0 / width));
        cplx head = 0.0;
        for (int i = 0; i < n; ++i) head += quad::adaptive(f, L0 * i / n, L0 * (i + 1) / n, 1e-15).value;
        const double step = pi / std::abs(kinf);
        auto bp = [L0, step](int j) { return L0 + j * step; };
        const auto tail = quad::oscillatory(f, bp, 1e-13, 20000, 8);
        return head + tail.value;
    };
    cplx integral;
    switch (kind) {
    case Kind::E: integral = (J(1, 1) - J(-1, 1)) / (2.0 * I); break;
    case Kind::S: integral = -0.25 * (J(1, 1) - J(1, -1) - J(-1, 1) + J(-1, -1)); break;
    case Kind::C: integral = (J(1, 1) + J(1, -1) - J(-1, 1) - J(-1, -1)) / (4.0 * I); break;
    }
    return integral / (2.0 * pi * pi * r);
}

}
}
