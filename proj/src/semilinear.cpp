#include "kgl/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <cblas.h>
#include <json.hpp>

namespace kgl {
namespace semilinear {

namespace {
    constexpr double pi = 3.14159265358979323846;
    using spectral::cplx;

    // Mode expansion of w = r u: sine basis for V = 0, eigenbasis of H otherwise.
    // Batches are time-major, i.e. column-major N x T.
    class Modes {
    public:
        explicit Modes(const NonlinearConfig& cfg) : g_(cfg.grid())
        {
            const int N = g_.N;
            if (cfg.potential.type == "zero") {
                sine_ = std::make_unique<spectral::SineBasis>(N);
                mu_.resize(N);
                for (int k = 0; k < N; ++k) {
                    const double l = (k + 1) * pi / g_.R;
                    mu_[k] = l * l;
                }
            } else {
                H_ = std::make_unique<spectral::DiscreteHamiltonian>(spectral::build_hamiltonian(cfg.potential, g_));
                if (!H_->negative.empty())
                    throw spectral::hypothesis_error("potential has " + std::to_string(H_->negative.size()) +
                                                     " negative eigenvalue(s); the iteration needs none");
                if (H_->resonance_flag)
                    throw spectral::hypothesis_error("potential is flagged as having a zero-energy resonance");
                mu_ = H_->mu;
            }
            omega_.resize(N);
            for (int k = 0; k < N; ++k) omega_[k] = std::sqrt(mu_[k] + 1.0);
        }

        const RadialGrid1D& grid() const { return g_; }
        const std::vector<double>& omega() const { return omega_; }

        void analyze(const double* w, double* c, size_t T) const { transform(w, c, T, true); }
        void synthesize(const double* c, double* w, size_t T) const { transform(c, w, T, false); }

    private:
        void transform(const double* in, double* out, size_t T, bool forward) const
        {
            const int N = g_.N;
            if (sine_) {
                for (size_t it = 0; it < T; ++it) sine_->apply(in + it * N, out + it * N);
                return;
            }
            cblas_dgemm(CblasColMajor, forward ? CblasTrans : CblasNoTrans, CblasNoTrans, N, int(T), N, 1.0,
                        H_->vecs.data(), N, in, N, 0.0, out, N);
        }

        RadialGrid1D g_;
        std::vector<double> mu_, omega_;
        std::unique_ptr<spectral::SineBasis> sine_;
        std::unique_ptr<spectral::DiscreteHamiltonian> H_;
    };

    std::vector<double> to_w(const RadialGrid1D& g, const std::vector<double>& u)
    {
        std::vector<double> w(g.N);
        for (int j = 0; j < g.N; ++j) w[j] = g.r(j) * u[j];
        return w;
    }

    void check_data(const RadialGrid1D& g, const CauchyData& d)
    {
        for (const auto* f : { &d.u0, &d.u1 }) {
            if (int(f->size()) != g.N) throw std::invalid_argument("data length does not match the grid");
            for (double v : *f)
                if (!std::isfinite(v)) throw std::domain_error("data has non-finite samples");
            const double frac = spectral::high_mode_fraction(g, *f);
            if (frac > 1e-10)
                throw spectral::resolution_error("data carries " + std::to_string(frac) +
                                                 " of its energy above 0.8 of the top mode; refine the grid");
        }
    }

    double forcing_value(const ForcingSpec& F, double r, double t)
    {
        if (!F.active()) return 0.0;
        const double x = r / F.width;
        return F.amplitude * std::exp(-x * x) * std::cos(F.frequency * t);
    }

    // w-space source r (-sign u^5 + F) at every node and time; u given as w (time-major).
    std::vector<double> source_w(const NonlinearConfig& cfg, const RadialGrid1D& g, const std::vector<double>& times,
                                 const std::vector<double>& w)
    {
        const int N = g.N;
        std::vector<double> s(w.size());
        for (size_t it = 0; it < times.size(); ++it)
            for (int j = 0; j < N; ++j) {
                const double r = g.r(j);
                const double u = w[it * N + j] / r;
                const double u2 = u * u;
                s[it * N + j] = r * (-cfg.sign * u2 * u2 * u + forcing_value(cfg.forcing, r, times[it]));
            }
        return s;
    }

    // Linear evolution in w-space, time-major.
    std::vector<double> linear_w(const Modes& M, const CauchyData& d, const std::vector<double>& times)
    {
        const RadialGrid1D& g = M.grid();
        const int N = g.N;
        std::vector<double> c0(N), c1(N);
        M.analyze(to_w(g, d.u0).data(), c0.data(), 1);
        M.analyze(to_w(g, d.u1).data(), c1.data(), 1);
        std::vector<double> a(size_t(N) * times.size());
        const auto& om = M.omega();
        for (size_t it = 0; it < times.size(); ++it)
            for (int k = 0; k < N; ++k) {
                const double t = times[it];
                a[it * N + k] = std::cos(t * om[k]) * c0[k] + std::sin(t * om[k]) / om[k] * c1[k];
            }
        std::vector<double> w(a.size());
        M.synthesize(a.data(), w.data(), times.size());
        return w;
    }

    // int_0^{t_i} f by piecewise three-point quadratics on a uniform grid.
    void cumulative_simpson(const double* f, double* out, size_t n, double h)
    {
        out[0] = 0.0;
        if (n < 2) return;
        if (n == 2) {
            out[1] = 0.5 * h * (f[0] + f[1]);
            return;
        }
        for (size_t i = 0; i + 1 < n; ++i) {
            const double piece = i + 2 < n ? h * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0
                                           : h * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]) / 12.0;
            out[i + 1] = out[i] + piece;
        }
    }

    // int_0^t sin((t-s) omega_k)/omega_k g(s) ds in w-space for the w-space source s.
    std::vector<double> duhamel_w(const Modes& M, const std::vector<double>& times, const std::vector<double>& src)
    {
        const RadialGrid1D& g = M.grid();
        const int N = g.N;
        const size_t T = times.size();
        const double h = T > 1 ? times[1] - times[0] : 0.0;
        std::vector<double> gm(src.size());
        M.analyze(src.data(), gm.data(), T);
        std::vector<double> d(src.size());
        std::vector<double> fc(T), fs(T), A(T), B(T), cs(T), sn(T);
        const auto& om = M.omega();
        for (int k = 0; k < N; ++k) {
            for (size_t it = 0; it < T; ++it) {
                cs[it] = std::cos(times[it] * om[k]);
                sn[it] = std::sin(times[it] * om[k]);
                const double v = gm[it * N + k];
                fc[it] = cs[it] * v;
                fs[it] = sn[it] * v;
            }
            cumulative_simpson(fc.data(), A.data(), T, h);
            cumulative_simpson(fs.data(), B.data(), T, h);
            for (size_t it = 0; it < T; ++it) d[it * N + k] = (sn[it] * A[it] - cs[it] * B[it]) / om[k];
        }
        std::vector<double> w(d.size());
        M.synthesize(d.data(), w.data(), T);
        return w;
    }

    Field make_field(const RadialGrid1D& g, const std::vector<double>& times, const std::vector<double>& w)
    {
        Field F;
        F.grid = g;
        F.times = times;
        F.values.resize(w.size());
        const int N = g.N;
        for (size_t it = 0; it < times.size(); ++it)
            for (int j = 0; j < N; ++j) F.values[it * N + j] = w[it * N + j] / g.r(j);
        return F;
    }

    std::vector<double> field_w(const Field& F)
    {
        const int N = F.grid.N;
        std::vector<double> w(F.values.size());
        for (size_t it = 0; it < F.times.size(); ++it)
            for (int j = 0; j < N; ++j) w[it * N + j] = F.grid.r(j) * F.values[it * N + j].real();
        return w;
    }

    // |u| rows [ir * nt + it] from time-major w
    std::vector<double> rows_from_w(const RadialGrid1D& g, size_t nt, const std::vector<double>& w)
    {
        const int N = g.N;
        std::vector<double> rows(w.size());
        for (size_t it = 0; it < nt; ++it)
            for (int j = 0; j < N; ++j) rows[size_t(j) * nt + it] = std::abs(w[it * N + j] / g.r(j));
        return rows;
    }

    const norms::LorentzSpec L62 = norms::LorentzSpec::parse("6,2");
    const norms::LorentzSpec L16_3 = norms::LorentzSpec::parse("16/3,2");
    const norms::LorentzSpec L16_2 = norms::LorentzSpec::parse("16,2");
    const norms::LorentzSpec Linf = norms::LorentzSpec::parse("inf");

    LedgerEntry ledger_w(const RadialGrid1D& g, const std::vector<double>& times, const std::vector<double>& w)
    {
        const auto rows = rows_from_w(g, times.size(), w);
        const auto r = g.nodes();
        LedgerEntry e;
        e.l62_linf = norms::mixed_norm(r, times, rows, L62, Linf);
        e.l16_3_l16_2 = norms::mixed_norm(r, times, rows, L16_3, L16_2);
        return e;
    }

    std::vector<double> diff(const std::vector<double>& a, const std::vector<double>& b)
    {
        std::vector<double> d(a.size());
        for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return d;
    }

    double forcing_l1l2(const NonlinearConfig& cfg, const RadialGrid1D& g, const std::vector<double>& times)
    {
        if (!cfg.forcing.active()) return 0.0;
        std::vector<double> prof(g.N);
        for (int j = 0; j < g.N; ++j) prof[j] = forcing_value(cfg.forcing, g.r(j), 0.0);
        const double l2 = spectral::l2_norm(g, prof);
        const auto wt = norms::cell_measures(times);
        double s = 0.0;
        for (size_t i = 0; i < times.size(); ++i) s += wt[i] * std::abs(std::cos(cfg.forcing.frequency * times[i]));
        return l2 * s;
    }
}

void NonlinearConfig::validate() const
{
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be >= 0");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive");
    if (!(dt > 0.0) || dt > T) throw std::invalid_argument("time step must lie in (0, T]");
    if (!(R > 0.0) || N < 8) throw std::invalid_argument("grid needs R > 0 and N >= 8");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (forcing.active() && !(forcing.width > 0.0)) throw std::invalid_argument("forcing width must be positive");
}

std::vector<double> NonlinearConfig::times() const
{
    const int nt = std::max(1, int(std::lround(T / dt)));
    std::vector<double> t(nt + 1);
    for (int i = 0; i <= nt; ++i) t[i] = T * i / nt;
    return t;
}

CauchyData gaussian_data(const RadialGrid1D& g, double epsilon, double width)
{
    CauchyData d;
    d.u0.resize(g.N);
    d.u1.assign(g.N, 0.0);
    for (int j = 0; j < g.N; ++j) {
        const double x = g.r(j) / width;
        d.u0[j] = epsilon * std::exp(-x * x);
    }
    return d;
}

LedgerEntry ledger_norms(const Field& u)
{
    return ledger_w(u.grid, u.times, field_w(u));
}

double ledger_distance(const Field& a, const Field& b)
{
    if (a.values.size() != b.values.size()) throw std::invalid_argument("fields differ in shape");
    return ledger_w(a.grid, a.times, diff(field_w(a), field_w(b))).total();
}

double relative_l2_at_end(const Field& a, const Field& b)
{
    if (a.values.size() != b.values.size() || a.times.empty()) throw std::invalid_argument("fields differ in shape");
    const int N = a.grid.N;
    const size_t last = a.times.size() - 1;
    std::vector<double> d(N), ref(N);
    for (int j = 0; j < N; ++j) {
        d[j] = std::abs(a.at(last, j) - b.at(last, j));
        ref[j] = std::abs(b.at(last, j));
    }
    const double den = spectral::l2_norm(a.grid, ref);
    const double num = spectral::l2_norm(a.grid, d);
    return den > 0.0 ? num / den : num;
}

Field duhamel_map(const NonlinearConfig& cfg, const CauchyData& data, const Field& u)
{
    cfg.validate();
    Modes M(cfg);
    const auto& g = M.grid();
    check_data(g, data);
    const auto times = cfg.times();
    if (u.grid.N != g.N || u.times.size() != times.size()) throw std::invalid_argument("field does not match the config grid");
    auto w = linear_w(M, data, times);
    const auto dw = duhamel_w(M, times, source_w(cfg, g, times, field_w(u)));
    for (size_t i = 0; i < w.size(); ++i) w[i] += dw[i];
    return make_field(g, times, w);
}

IterationState picard_iterate(const NonlinearConfig& cfg, const CauchyData& data)
{
    cfg.validate();
    Modes M(cfg);
    const auto& g = M.grid();
    check_data(g, data);
    const auto times = cfg.times();

    IterationState st;
    st.data_norm = data.norm_h1l2(g);
    st.forcing_norm = forcing_l1l2(cfg, g, times);

    auto lin = linear_w(M, data, times);
    if (cfg.forcing.active()) {
        // forcing enters every iterate; fold it into u_0
        NonlinearConfig fc = cfg;
        fc.sign = 0;
        const std::vector<double> zero(lin.size(), 0.0);
        const auto dw = duhamel_w(M, times, source_w(fc, g, times, zero));
        for (size_t i = 0; i < lin.size(); ++i) lin[i] += dw[i];
    }
    IterationRecord r0;
    r0.norm = ledger_w(g, times, lin);
    r0.difference = r0.norm.total();
    st.history.push_back(r0);
    if (r0.norm.total() > cfg.delta)
        throw smallness_error("first iterate has ledger norm " + std::to_string(r0.norm.total()) + " > delta = " +
                              std::to_string(cfg.delta));

    std::vector<double> prev = lin;
    int small_ratios = 0;
    NonlinearConfig nl = cfg;
    nl.forcing = ForcingSpec{};
    for (int n = 1; n <= cfg.max_iterations; ++n) {
        auto cur = duhamel_w(M, times, source_w(nl, g, times, prev));
        for (size_t i = 0; i < cur.size(); ++i) cur[i] += lin[i];
        IterationRecord rec;
        rec.n = n;
        rec.norm = ledger_w(g, times, cur);
        rec.difference = ledger_w(g, times, diff(cur, prev)).total();
        const auto& last = st.history.back();
        if (n >= 2 && last.difference > 0.0) {
            rec.ratio = rec.difference / last.difference;
            const double a = last.norm.total(), b = st.history[st.history.size() - 2].norm.total();
            const double den = (std::pow(a, 4) + std::pow(b, 4)) * last.difference;
            if (rec.difference > cfg.noise_floor * rec.norm.total())
                rec.contraction_constant = den > 0.0 ? rec.difference / den : 0.0;
        }
        st.history.push_back(rec);
        prev.swap(cur);
        st.n = n;
        if (rec.difference <= cfg.noise_floor * rec.norm.total()) {
            st.converged = true;
            st.hit_noise_floor = true;
            break;
        }
        if (n > 2 && rec.ratio >= 1.0)
            throw divergence_error("Picard differences grew by a factor " + std::to_string(rec.ratio) + " at n = " +
                                   std::to_string(n));
        small_ratios = (n >= 2 && rec.ratio < 0.5) ? small_ratios + 1 : 0;
        if (small_ratios >= 3) {
            st.converged = true;
            break;
        }
    }
    st.u = make_field(g, times, prev);
    st.linear = make_field(g, times, lin);
    return st;
}

Field direct_integrate(const NonlinearConfig& cfg, const CauchyData& data)
{
    cfg.validate();
    Modes M(cfg);
    const auto& g = M.grid();
    check_data(g, data);
    const auto times = cfg.times();
    const int N = g.N;
    const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    const auto& om = M.omega();

    std::vector<double> a(N), b(N), w = to_w(g, data.u0), c(N), s(N);
    M.analyze(w.data(), a.data(), 1);
    M.analyze(to_w(g, data.u1).data(), b.data(), 1);

    double ref = cfg.forcing.active() ? std::abs(cfg.forcing.amplitude) : 0.0;
    for (int j = 0; j < N; ++j) ref = std::max({ ref, std::abs(data.u0[j]), std::abs(data.u1[j]) });
    const double guard = 1e3 * ref;

    std::vector<double> out(size_t(N) * times.size());
    std::copy(w.begin(), w.end(), out.begin());
    auto kick = [&](double t, double weight) {
        const auto src = source_w(cfg, g, { t }, w);
        M.analyze(src.data(), s.data(), 1);
        for (int k = 0; k < N; ++k) b[k] += weight * s[k];
    };
    kick(times[0], 0.5 * dt);
    for (size_t it = 1; it < times.size(); ++it) {
        for (int k = 0; k < N; ++k) {
            const double cs = std::cos(dt * om[k]), sn = std::sin(dt * om[k]);
            const double a1 = cs * a[k] + sn / om[k] * b[k];
            b[k] = -om[k] * sn * a[k] + cs * b[k];
            a[k] = a1;
        }
        M.synthesize(a.data(), w.data(), 1);
        double sup = 0.0;
        for (int j = 0; j < N; ++j) {
            const double u = std::abs(w[j] / g.r(j));
            sup = std::isfinite(u) ? std::max(sup, u) : std::numeric_limits<double>::infinity();
        }
        if (sup > guard)
            throw blowup_error("sup|u| = " + std::to_string(sup) + " exceeded 1000x the initial amplitude at t = " +
                               std::to_string(times[it]));
        std::copy(w.begin(), w.end(), out.begin() + it * N);
        kick(times[it], it + 1 == times.size() ? 0.5 * dt : dt);
    }
    return make_field(g, times, out);
}

std::vector<NormReport> reversed_ledger(const Field& u, double data_norm)
{
    const auto w = field_w(u);
    const auto rows = rows_from_w(u.grid, u.times.size(), w);
    const auto r = u.grid.nodes();
    struct Pair {
        const char* name;
        const char* outer;
        const char* inner;
    };
    const Pair pairs[] = {
        { "L^{6,2}_x L^inf_t", "6,2", "inf" },
        { "L^{16/3,2}_x L^{16,2}_t", "16/3,2", "16,2" },
        { "L^inf_x L^2_t", "inf", "2" },
        { "L^{12,2}_x L^2_t", "12,2", "2" },
        { "L^{24/5,2}_x L^{8,2}_t", "24/5,2", "8,2" },
    };
    std::vector<NormReport> out;
    for (const auto& p : pairs) {
        NormReport rep;
        rep.name = p.name;
        rep.value = norms::mixed_norm(r, u.times, rows, norms::LorentzSpec::parse(p.outer),
                                      norms::LorentzSpec::parse(p.inner));
        rep.ratio = data_norm > 0.0 ? rep.value / data_norm : 0.0;
        out.push_back(rep);
    }
    return out;
}

std::string run_manifest_json(const NonlinearConfig& cfg, const IterationState& st,
                              const std::vector<std::pair<std::string, double>>& comparisons)
{
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["config"] = {
        { "sign", cfg.sign }, { "epsilon", cfg.epsilon }, { "T", cfg.T }, { "dt", cfg.dt }, { "R", cfg.R },
        { "N", cfg.N }, { "potential", cfg.potential.describe() }, { "delta", cfg.delta },
        { "max_iterations", cfg.max_iterations }, { "noise_floor", cfg.noise_floor },
        { "forcing", { { "amplitude", cfg.forcing.amplitude }, { "width", cfg.forcing.width },
                       { "frequency", cfg.forcing.frequency } } },
    };
    j["data_norm_h1l2"] = st.data_norm;
    j["forcing_norm_l1l2"] = st.forcing_norm;
    auto hist = nlohmann::ordered_json::array();
    for (const auto& h : st.history) {
        hist.push_back({ { "n", h.n }, { "l62_linf", h.norm.l62_linf }, { "l16_3_l16_2", h.norm.l16_3_l16_2 },
                         { "difference", h.difference }, { "ratio", h.ratio },
                         { "contraction_constant", h.contraction_constant } });
    }
    j["iterations"] = hist;
    j["converged"] = st.converged;
    j["hit_noise_floor"] = st.hit_noise_floor;
    auto cmp = nlohmann::ordered_json::object();
    for (const auto& [k, v] : comparisons) cmp[k] = v;
    j["comparisons"] = cmp;
    return j.dump(2);
}

}
}
