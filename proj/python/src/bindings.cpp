#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cltlab/deconvolution.hpp"
#include "cltlab/errors.hpp"
#include "cltlab/grassmann.hpp"
#include "cltlab/radial.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/samplers.hpp"
#include "cltlab/spherical.hpp"

namespace py = pybind11;
using namespace cltlab;

namespace {

py::dict ratio_dict(const RatioReport& r) {
  py::dict d;
  d["radius_grid"] = r.radius_grid;
  d["ratios"] = r.per_point_ratios;
  d["sup_abs_deviation"] = r.sup_abs_deviation;
  return d;
}

py::dict certificate_dict(const DeconvCertificate& c) {
  py::dict d;
  d["admissible"] = c.admissible;
  d["violated_conditions"] = c.violated_conditions;
  d["epsilon"] = c.epsilon;
  d["lower_radius"] = c.lower_radius;
  d["upper_radius"] = c.upper_radius;
  d["lower_factor"] = c.lower_factor;
  d["upper_factor"] = c.upper_factor;
  return d;
}

} // namespace

PYBIND11_MODULE(_cltlab, m) {
  m.doc() = "Isotropic convex bodies, projected marginals and the Gaussian limit";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("set_max_threads", &set_max_threads, py::arg("threads"));

  m.def(
      "psi", [](int n, int l, double r, double t) { return psi(KernelParams::make(n, l, r), t); }, py::arg("n"),
      py::arg("l"), py::arg("r"), py::arg("t"));
  m.def(
      "psi_gaussian_ratio_scan",
      [](int n, int l, double t_max, int points) { return ratio_dict(psi_gaussian_ratio_scan(n, l, t_max, points)); },
      py::arg("n"), py::arg("l"), py::arg("t_max"), py::arg("points") = 1001);
  m.def(
      "chi_mixture_marginal",
      [](int n, int l, double t) { return radial_mixture_marginal(RadialDensity::chi(n), n, l, t); }, py::arg("n"),
      py::arg("l"), py::arg("t"));

  m.def(
      "sample_body",
      [](const std::string& body, int n, std::size_t count, std::uint64_t seed) {
        py::gil_scoped_release release;
        return sample_body(BodySpec::make(parse_body_kind(body), n), count, seed).data;
      },
      py::arg("body"), py::arg("n"), py::arg("count"), py::arg("seed"),
      "Samples as an n x count array (one column per sample).");
  m.def(
      "random_subspace", [](int n, int l, std::uint64_t seed) { return random_subspace(n, l, seed).rows; },
      py::arg("n"), py::arg("l"), py::arg("seed"));
  m.def(
      "thin_shell_fraction",
      [](const std::string& body, int n, std::size_t count, std::uint64_t seed, double epsilon) {
        py::gil_scoped_release release;
        const Eigen::VectorXd norms = sample_norms(BodySpec::make(parse_body_kind(body), n), count, seed);
        const auto f = thin_shell_fraction(
            std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())), n, epsilon);
        return std::make_pair(f.fraction, f.std_error);
      },
      py::arg("body"), py::arg("n"), py::arg("count"), py::arg("seed"), py::arg("epsilon"));

  m.def(
      "check_conditions",
      [](int n, double alpha, double beta, double epsilon, double R, double c0) {
        return certificate_dict(check_conditions(DeconvParams::make(n, alpha, beta, epsilon, R, c0)));
      },
      py::arg("n"), py::arg("alpha"), py::arg("beta"), py::arg("epsilon"), py::arg("R"), py::arg("c0") = 1e-2);
  m.def(
      "verify_sandwich",
      [](const std::string& body, double variance, int n, double alpha, double beta, double epsilon, double R) {
        const auto report =
            verify_sandwich(parse_closed_form(body, variance), DeconvParams::make(n, alpha, beta, epsilon, R));
        py::dict d;
        d["status"] = std::string(to_string(report.status));
        d["certificate"] = certificate_dict(report.certificate);
        d["hypothesis_deviation"] = report.hypothesis_deviation;
        d["min_lower_margin"] = report.min_lower_margin;
        d["min_upper_margin"] = report.min_upper_margin;
        return d;
      },
      py::arg("body"), py::arg("variance") = 1.0, py::arg("n") = 1, py::arg("alpha") = 1e-24,
      py::arg("beta") = 0.5, py::arg("epsilon") = 0.005, py::arg("R") = 6.0);
}
