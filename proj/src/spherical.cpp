#include "cltlab/spherical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cltlab/errors.hpp"

namespace cltlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kChiQuadratureTolerance = 1e-10;

double chi_integral(int n, int l, double t) {
  const double center = std::sqrt(static_cast<double>(n));
  const double lo = std::max(t, std::max(0.0, center - 15.0));
  const double hi = center + 15.0;
  if (lo >= hi) return 0.0;
  auto integrand = [n, l, t](double r) {
    if (r <= 0.0) return 0.0;
    const double v = log_psi(KernelParams{n, l, r}, t) + log_chi_density(n, r);
    return std::isfinite(v) ? std::exp(v) : 0.0;
  };
  if (n - l - 2 < 0) {
    // Integrable (r - t)^(-1/2) singularity at the lower endpoint.
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(integrand, lo, hi, 1e-12);
  }
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 20, 1e-13, &error);
  if (error > kChiQuadratureTolerance)
    throw DomainError("chi mixture quadrature did not reach tolerance at t=" + std::to_string(t));
  return value;
}

} // namespace

KernelParams KernelParams::make(int n, int l, double r) {
  KernelParams params{n, l, r};
  validate(params);
  return params;
}

const KernelParams& validate(const KernelParams& params) {
  if (params.l < 1 || params.l >= params.n)
    throw DomainError("kernel requires 1 <= l < n (got n=" + std::to_string(params.n) +
                      ", l=" + std::to_string(params.l) + ")");
  if (!(params.r > 0.0) || !std::isfinite(params.r)) throw DomainError("kernel radius must be > 0");
  return params;
}

double log_gamma_nl(int n, int l) {
  if (l < 1 || l >= n)
    throw DomainError("Gamma_{n,l} requires 1 <= l < n (got n=" + std::to_string(n) +
                      ", l=" + std::to_string(l) + ")");
  return -0.5 * l * std::log(std::numbers::pi) + boost::math::lgamma(0.5 * n) -
         boost::math::lgamma(0.5 * (n - l));
}

double log_psi(const KernelParams& params, double t) {
  validate(params);
  if (!(t >= 0.0)) throw DomainError("psi requires t >= 0");
  if (t > params.r) return -kInf;
  const double u = t / params.r;
  const double e = params.exponent();
  double shape = 0.0;
  if (e != 0.0) shape = e * std::log1p(-u * u);  // -inf*e at t = r
  return log_gamma_nl(params.n, params.l) - params.l * std::log(params.r) + shape;
}

double psi(const KernelParams& params, double t) { return std::exp(log_psi(params, t)); }

double log_gaussian_density(int l, double v, double x_norm) {
  if (!(v > 0.0)) throw DomainError("gaussian variance must be > 0");
  return -0.5 * l * std::log(2.0 * std::numbers::pi * v) - x_norm * x_norm / (2.0 * v);
}

double gaussian_density(int l, double v, double x_norm) {
  return std::exp(log_gaussian_density(l, v, x_norm));
}

double log_chi_density(int dof, double r) {
  if (dof < 1) throw DomainError("chi degrees of freedom must be >= 1");
  if (r < 0.0) return -kInf;
  if (r == 0.0) return dof == 1 ? 0.5 * std::log(2.0 / std::numbers::pi) : -kInf;
  const double k = dof;
  return (k - 1.0) * std::log(r) - 0.5 * r * r - (0.5 * k - 1.0) * std::log(2.0) -
         boost::math::lgamma(0.5 * k);
}

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / boost::math::tgamma(0.5 * d);
}

double radial_mixture_marginal(const RadialDensity& g, int n, int l, double t) {
  validate(g);
  if (l < 1 || l >= n) throw DomainError("radial mixture requires 1 <= l < n");
  if (!(t >= 0.0)) throw DomainError("radial mixture requires t >= 0");
  if (g.form == RadialDensity::Form::ClosedFormChi) {
    if (g.chi_dof != n) throw DomainError("chi radial density must have n degrees of freedom");
    return chi_integral(n, l, t);
  }
  const bool singular = n - l - 2 < 0;
  double sum = 0.0;
  for (std::size_t j = 0; j < g.bin_count(); ++j) {
    if (g.mass[j] == 0.0) continue;
    if (singular && g.edges[j] <= t && t < g.edges[j + 1]) continue;
    const double log_k = log_psi(KernelParams{n, l, g.midpoint(j)}, t);
    if (std::isfinite(log_k)) sum += g.mass[j] * std::exp(log_k);
  }
  return sum;
}

double psi_gaussian_ratio(int n, int l, double t) {
  const KernelParams params = KernelParams::make(n, l, std::sqrt(static_cast<double>(n)));
  return std::exp(log_psi(params, t) - log_gaussian_density(l, 1.0, t));
}

RatioReport psi_gaussian_ratio_scan(int n, int l, double t_max, int grid_points) {
  const double limit = std::pow(static_cast<double>(n), 0.125);
  if (!(t_max >= 0.0) || !(t_max < limit))
    throw RangeError("t_max must lie in [0, n^(1/8)) = [0, " + std::to_string(limit) + ")");
  if (grid_points < 2) throw RangeError("ratio scan needs at least 2 grid points");
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  std::vector<double> ratios(grid.size());
  for (int i = 0; i < grid_points; ++i) {
    const double t = t_max * i / (grid_points - 1);
    grid[static_cast<std::size_t>(i)] = t;
    ratios[static_cast<std::size_t>(i)] = psi_gaussian_ratio(n, l, t);
  }
  return RatioReport::make(std::move(grid), std::move(ratios));
}

} // namespace cltlab
