#pragma once

// Reference computations for tests and the acceptance suite. Nothing here
// calls into the library's numerical paths; each oracle is an independent
// route to the quantity it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace cltlab::oracle {

// Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1], by Newton
// iteration on the Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_rule(int m) {
  std::vector<double> nodes(static_cast<std::size_t>(m)), weights(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  return {nodes, weights};
}

// Composite 20-point Gauss-Legendre over `panels` equal panels of [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 64) {
  static const auto rule = gauss_legendre_rule(20);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.first.size(); ++k)
      sum += rule.second[k] * f(lo + 0.5 * h * (rule.first[k] + 1.0));
    total += 0.5 * h * sum;
  }
  return total;
}

inline double normal_pdf(double x, double variance = 1.0) {
  return std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// Density of N(0, v Id) in R^l at a point of norm r.
inline double gaussian_pdf(int l, double r, double variance = 1.0) {
  return std::pow(2.0 * std::numbers::pi * variance, -0.5 * l) * std::exp(-r * r / (2.0 * variance));
}

inline double chi_square_cdf(double dof, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), x);
}

inline double chi_square_sf(double dof, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

// P(| |G| / sqrt(n) - 1 | >= eps) for G standard gaussian in R^n.
inline double gaussian_shell_outside(int n, double eps) {
  const double lo = n * std::pow(std::max(0.0, 1.0 - eps), 2);
  const double hi = n * std::pow(1.0 + eps, 2);
  return chi_square_cdf(n, lo) + chi_square_sf(n, hi);
}

// n^(-alpha lambda) with lambda = 1/(5 alpha + 20), evaluated in 50-digit
// binary floating point.
inline double high_precision_noise_variance(int n, double alpha) {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big a(alpha);
  const Big lambda = Big(1) / (Big(5) * a + Big(20));
  return static_cast<double>(boost::multiprecision::pow(Big(n), -a * lambda));
}

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double count = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / count - f, f - i / count});
  }
  return d;
}

// Least-squares slope of log y against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Empirical covariance with a plain double loop (no Eigen kernels), columns
// are samples.
template <class Matrix>
inline std::pair<std::vector<double>, std::vector<double>> naive_moments(const Matrix& data) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto count = static_cast<std::size_t>(data.cols());
  std::vector<double> mean(n, 0.0), cov(n * n, 0.0);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t a = 0; a < n; ++a) mean[a] += data(static_cast<long>(a), static_cast<long>(j));
  for (auto& m : mean) m /= static_cast<double>(count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t a = 0; a < n; ++a) {
      const double da = data(static_cast<long>(a), static_cast<long>(j)) - mean[a];
      for (std::size_t b = 0; b <= a; ++b)
        cov[a * n + b] += da * (data(static_cast<long>(b), static_cast<long>(j)) - mean[b]);
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      cov[a * n + b] /= static_cast<double>(count);
      cov[b * n + a] = cov[a * n + b];
    }
  return {mean, cov};
}

} // namespace cltlab::oracle
