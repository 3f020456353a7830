#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kgl/campaign.hpp"
#include "kgl/kernels.hpp"
#include "kgl/norms.hpp"
#include "kgl/specfun.hpp"
#include "kgl/spectral.hpp"

namespace py = pybind11;
using namespace kgl;

PYBIND11_MODULE(_kglab, m)
{
    m.doc() = "Klein-Gordon kernel evaluation and verification checks";

    py::register_exception<kernels::range_error>(m, "RangeError", PyExc_ValueError);
    py::register_exception<campaign::config_error>(m, "ConfigError", PyExc_ValueError);

    m.def("bessel_j", &specfun::bessel_j, py::arg("n"), py::arg("x"));
    m.def("cosine_c1", &kernels::cosine_c1, py::arg("r"), py::arg("t"));
    m.def("sine_bessel_part", &kernels::sine_bessel_part, py::arg("r"), py::arg("t"));
    m.def("sine_wave_mass", &kernels::sine_wave_mass, py::arg("r"));
    m.def(
        "fractional_kernel",
        [](std::complex<double> alpha, const std::string& kind, double r, double t) {
            return kernels::fractional_kernel(alpha, kernels::parse_kind(kind), r, t);
        },
        py::arg("alpha"), py::arg("kind"), py::arg("r"), py::arg("t"));
    m.def("fractional_bound", &kernels::fractional_bound, py::arg("a"), py::arg("r"), py::arg("t"));

    m.def(
        "lorentz_norm",
        [](const std::vector<double>& values, const std::vector<double>& weights, const std::string& spec) {
            return norms::lorentz_norm(values, weights, norms::LorentzSpec::parse(spec));
        },
        py::arg("values"), py::arg("weights"), py::arg("spec"));

    m.def(
        "bound_states",
        [](double amplitude, double width, double R, int N) {
            py::gil_scoped_release nogil;
            const auto H = spectral::build_hamiltonian(spectral::PotentialSpec::gaussian(amplitude, width),
                                                       spectral::RadialGrid1D::make(R, N));
            std::vector<double> mu;
            for (int k : H.negative) mu.push_back(H.mu[k]);
            return mu;
        },
        py::arg("amplitude"), py::arg("width") = 1.0, py::arg("R") = 30.0, py::arg("N") = 1023,
        "negative eigenvalues of -d^2/dr^2 + amplitude exp(-(r/width)^2) on [0, R]");

    m.def("check_names", &campaign::check_names);
    m.def(
        "run_check_json",
        [](const std::string& name, const std::string& settings, unsigned long long seed, int jobs) {
            campaign::Context ctx;
            ctx.seed = seed;
            ctx.jobs = jobs;
            const auto overrides = settings.empty() ? campaign::json() : campaign::json::parse(settings);
            campaign::Report rep;
            {
                py::gil_scoped_release nogil;
                rep = campaign::run_check(name, overrides, ctx);
            }
            return campaign::report_json(rep).dump();
        },
        py::arg("name"), py::arg("settings") = "", py::arg("seed") = 20240917ULL, py::arg("jobs") = 1);
}
