#pragma once

#include "cltlab/model.hpp"

namespace cltlab {

// psi_{n,l,r}: density of the l-dimensional marginal of the uniform
// probability measure on the sphere of radius r in R^n,
//
//   psi(t) = Gamma_{n,l} r^-l (1 - t^2/r^2)^((n-l-2)/2)  for t <= r, else 0,
//   Gamma_{n,l} = pi^(-l/2) Gamma(n/2) / Gamma((n-l)/2).
//
// All evaluation happens in log space; the exponent reaches the hundreds for
// the dimensions of interest.
struct KernelParams {
  int n = 2;
  int l = 1;
  double r = 1.0;

  // Throws DomainError unless 1 <= l < n and r > 0. (l = n has no density:
  // the sphere is its own marginal.)
  static KernelParams make(int n, int l, double r);
  double exponent() const { return 0.5 * (n - l - 2); }
};

const KernelParams& validate(const KernelParams& params);

// log Gamma_{n,l}; DomainError unless 1 <= l < n.
double log_gamma_nl(int n, int l);

// log psi_{n,l,r}(t); -infinity outside [0, r]. At t = r the value is
// -inf, finite or +inf according to the sign of the exponent.
double log_psi(const KernelParams& params, double t);
double psi(const KernelParams& params, double t);

// Isotropic gaussian density with covariance v Id in R^l, as a function of |x|.
double log_gaussian_density(int l, double v, double x_norm);
double gaussian_density(int l, double v, double x_norm);

// Log-density of the chi distribution with `dof` degrees of freedom.
double log_chi_density(int dof, double r);

// Surface area of the unit sphere S^(d-1) in R^d.
double unit_sphere_area(int d);

// int_0^inf psi_{n,l,r}(t) g(r) dr. Binned densities use the midpoint rule per
// bin; the chi form uses adaptive Gauss-Kronrod quadrature to 1e-10.
// For n = l + 1 the kernel has an integrable singularity at r = t: in the
// binned form the bin containing t is skipped.
double radial_mixture_marginal(const RadialDensity& g, int n, int l, double t);

// sup over an equispaced grid on [0, t_max] of |psi_{n,l,sqrt n}(t) / gamma_l(t) - 1|.
// RangeError unless 0 <= t_max < n^(1/8); grid_points >= 2.
RatioReport psi_gaussian_ratio_scan(int n, int l, double t_max, int grid_points);

// psi_{n,l,sqrt n}(t) / gamma_l[1](t), the per-point ratio of the scan.
double psi_gaussian_ratio(int n, int l, double t);

} // namespace cltlab
