#include "cltlab/deconvolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "cltlab/errors.hpp"
#include "cltlab/spherical.hpp"

namespace cltlab {

namespace {

constexpr double kMassTolerance = 1e-6;
constexpr double kKernelTruncation = 8.0;

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

std::vector<double> gaussian_kernel(double spacing, double alpha) {
  const double sigma = std::sqrt(alpha);
  const auto half = static_cast<std::size_t>(std::floor(kKernelTruncation * sigma / spacing));
  std::vector<double> kernel(2 * half + 1);
  double total = 0.0;
  for (std::size_t m = 0; m < kernel.size(); ++m) {
    const double x = (static_cast<double>(m) - static_cast<double>(half)) * spacing;
    kernel[m] = std::exp(-x * x / (2.0 * alpha));
    total += kernel[m];
  }
  // Symmetric renormalization keeps kernel[half - k] == kernel[half + k].
  for (double& k : kernel) k /= total;
  return kernel;
}

// out_i = sum_m kernel_m in_(i - (m - half)), zero outside the grid.
void convolve_line(const double* in, double* out, Eigen::Index size, Eigen::Index stride,
                   const std::vector<double>& kernel) {
  const auto half = static_cast<Eigen::Index>(kernel.size() / 2);
  for (Eigen::Index i = 0; i < size; ++i) {
    double acc = 0.0;
    const Eigen::Index lo = std::max<Eigen::Index>(-half, i - (size - 1));
    const Eigen::Index hi = std::min<Eigen::Index>(half, i);
    for (Eigen::Index k = lo; k <= hi; ++k) acc += kernel[static_cast<std::size_t>(k + half)] * in[(i - k) * stride];
    out[i * stride] = acc;
  }
}

double std_normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2); }

} // namespace

DeconvParams DeconvParams::make(int n, double alpha, double beta, double epsilon, double R, double c0) {
  DeconvParams p{n, alpha, beta, epsilon, R, c0};
  validate(p);
  return p;
}

const DeconvParams& validate(const DeconvParams& p) {
  if (p.n < 1) throw InvalidSpec("DeconvParams: n >= 1");
  if (!(p.alpha > 0.0)) throw InvalidSpec("DeconvParams: alpha > 0");
  if (!(p.beta > 0.0)) throw InvalidSpec("DeconvParams: beta > 0");
  if (!(p.epsilon > 0.0)) throw InvalidSpec("DeconvParams: epsilon > 0");
  if (!(p.R > 0.0)) throw InvalidSpec("DeconvParams: R > 0");
  if (!(p.c0 > 0.0 && p.c0 < 1.0)) throw InvalidSpec("DeconvParams: 0 < c0 < 1");
  return p;
}

DeconvCertificate check_conditions(const DeconvParams& p) {
  validate(p);
  DeconvCertificate c;
  const double two_n = 2.0 * p.n;
  const double alpha_cap = p.c0 * std::pow(static_cast<double>(p.n), -8.0);
  if (!(p.alpha <= alpha_cap))
    c.violated_conditions.push_back("alpha <= c0 n^-8 (alpha=" + format_double(p.alpha) +
                                    ", c0 n^-8=" + format_double(alpha_cap) + ")");
  const double noise_term = 100.0 * std::pow(two_n, std::max(3.0 * p.beta, 1.5)) * std::pow(p.alpha, 0.25);
  if (!(noise_term < p.epsilon))
    c.violated_conditions.push_back("100 (2n)^max(3 beta, 3/2) alpha^(1/4) < epsilon (lhs=" +
                                    format_double(noise_term) + ", epsilon=" + format_double(p.epsilon) + ")");
  if (!(p.epsilon < 0.01))
    c.violated_conditions.push_back("epsilon < 1/100 (epsilon=" + format_double(p.epsilon) + ")");
  c.admissible = c.violated_conditions.empty();
  c.epsilon = p.epsilon;
  const double reach = std::pow(two_n, p.beta);
  c.lower_radius = std::min(p.R - 1.0, reach);
  c.upper_radius = std::min(reach, p.R) - 3.0;
  c.lower_factor = 1.0 - 6.0 * p.epsilon;
  c.upper_factor = 1.0 + 8.0 * p.epsilon;
  validate(c);
  return c;
}

UniformGrid UniformGrid::symmetric(int dimension, double half_width, double spacing) {
  if (dimension != 1 && dimension != 2) throw DimensionError("grids are 1-d or 2-d");
  if (!(spacing > 0.0) || !(half_width > 0.0)) throw InvalidSpec("grid spacing and half width must be > 0");
  UniformGrid grid;
  grid.dimension = dimension;
  grid.spacing = spacing;
  const auto half = static_cast<Eigen::Index>(std::ceil(half_width / spacing - 1e-12));
  grid.size = 2 * half + 1;
  grid.origin = -static_cast<double>(half) * spacing;
  grid.values = Eigen::MatrixXd::Zero(grid.size, dimension == 1 ? 1 : grid.size);
  return grid;
}

void UniformGrid::fill(const std::function<double(const Eigen::Vector2d&)>& f) {
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) = f(Eigen::Vector2d(coordinate(i), dimension == 2 ? coordinate(j) : 0.0));
}

UniformGrid grid_convolve(const UniformGrid& density, double alpha) {
  if (!(alpha > 0.0)) throw InvalidSpec("convolution variance must be > 0");
  if (density.dimension != 1 && density.dimension != 2) throw DimensionError("grids are 1-d or 2-d");
  if (density.spacing > 0.5 * std::sqrt(alpha))
    throw GridTooCoarse("grid spacing " + format_double(density.spacing) + " exceeds sqrt(alpha)/2 = " +
                        format_double(0.5 * std::sqrt(alpha)));
  if ((density.values.array() < 0.0).any()) throw InvalidSpec("grid density has negative values");
  if (std::abs(density.mass() - 1.0) > kMassTolerance)
    throw InvalidSpec("grid density mass " + format_double(density.mass()) + " is not within 1e-6 of 1");

  const std::vector<double> kernel = gaussian_kernel(density.spacing, alpha);
  UniformGrid out = density;
  const Eigen::Index size = density.size;
  if (density.dimension == 1) {
    convolve_line(density.values.data(), out.values.data(), size, 1, kernel);
    return out;
  }
  // Separable: along the first coordinate (columns), then the second (rows).
  Eigen::MatrixXd tmp(size, size);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < size; ++j)
    convolve_line(density.values.col(j).data(), tmp.col(j).data(), size, 1, kernel);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < size; ++i)
    convolve_line(tmp.data() + i, out.values.data() + i, size, size, kernel);
  return out;
}

double ClosedFormDensity::density(double x) const {
  switch (kind) {
    case Kind::Gaussian: return gaussian_density(1, variance, x);
    case Kind::Uniform: {
      const double a = std::sqrt(3.0);
      return std::abs(x) <= a ? 1.0 / (2.0 * a) : 0.0;
    }
    case Kind::Laplace: {
      const double b = 1.0 / std::numbers::sqrt2;
      return std::exp(-std::abs(x) / b) / (2.0 * b);
    }
  }
  return 0.0;
}

double ClosedFormDensity::convolved(double x, double alpha) const {
  if (alpha < 0.0) throw DomainError("convolution variance must be >= 0");
  if (alpha == 0.0) return density(x);
  const double s = std::sqrt(alpha);
  switch (kind) {
    case Kind::Gaussian: return gaussian_density(1, variance + alpha, x);
    case Kind::Uniform: {
      const double a = std::sqrt(3.0);
      // Difference of tails on the side away from the mass avoids cancellation.
      const double hi = (x + a) / s, lo = (x - a) / s;
      const double p = x >= 0.0 ? std_normal_cdf(-lo) - std_normal_cdf(-hi) : std_normal_cdf(hi) - std_normal_cdf(lo);
      return p / (2.0 * a);
    }
    case Kind::Laplace: {
      // Normal-Laplace convolution:
      //   e^{alpha/(2b^2)}/(4b) [e^{x/b} erfc((x + alpha/b)/sqrt(2 alpha)) + e^{-x/b} erfc((alpha/b - x)/sqrt(2 alpha))]
      const double b = 1.0 / std::numbers::sqrt2;
      const double shift = alpha / (2.0 * b * b) - std::log(4.0 * b);
      auto term = [&](double sign) {
        const double e = boost::math::erfc((alpha / b - sign * x) / (std::numbers::sqrt2 * s));
        return e > 0.0 ? std::exp(shift - sign * x / b + std::log(e)) : 0.0;
      };
      return term(-1.0) + term(1.0);
    }
  }
  return 0.0;
}

std::string ClosedFormDensity::name() const {
  switch (kind) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Uniform: return "uniform";
    case Kind::Laplace: return "laplace";
  }
  return "unknown";
}

ClosedFormDensity parse_closed_form(std::string_view name, double variance) {
  if (name == "gaussian") {
    if (!(variance > 0.0)) throw InvalidSpec("gaussian test density needs variance > 0");
    return ClosedFormDensity::gaussian(variance);
  }
  if (name == "uniform" || name == "cube") return ClosedFormDensity::uniform();
  if (name == "laplace") return ClosedFormDensity::laplace();
  throw InvalidSpec("unknown 1-d test density '" + std::string(name) + "'");
}

std::string_view to_string(SandwichStatus status) {
  switch (status) {
    case SandwichStatus::Verified: return "verified";
    case SandwichStatus::Violated: return "violated";
    case SandwichStatus::HypothesisNotMet: return "hypothesis_not_met";
    case SandwichStatus::Inadmissible: return "inadmissible";
  }
  return "unknown";
}

SandwichReport verify_sandwich(const ClosedFormDensity& body, const DeconvParams& params, double spacing) {
  validate(params);
  if (params.n != 1 && params.n != 2)
    throw DimensionError("sandwich verification runs in dimension 1 or 2 (got n=" + std::to_string(params.n) + ")");
  SandwichReport report;
  report.dimension = params.n;
  report.certificate = check_conditions(params);
  if (!report.certificate.admissible) {
    report.status = SandwichStatus::Inadmissible;
    return report;
  }
  if (spacing <= 0.0) spacing = params.n == 1 ? 0.01 : 0.05;
  const UniformGrid grid = UniformGrid::symmetric(params.n, params.R, spacing);
  const int n = params.n;
  const double alpha = params.alpha;
  auto product = [n](auto&& f, const Eigen::Vector2d& x) { return n == 1 ? f(x[0]) : f(x[0]) * f(x[1]); };

  // Hypothesis: |f_{X+Y} / gamma[1 + alpha] - 1| <= eps on |x| <= R.
  double deviation = 0.0;
  const double reach = std::max(report.certificate.lower_radius, report.certificate.upper_radius);
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
      const Eigen::Vector2d x(grid.coordinate(i), n == 2 ? grid.coordinate(j) : 0.0);
      const double radius = x.head(n).norm();
      if (radius <= params.R) {
        const double fy = product([&](double u) { return body.convolved(u, alpha); }, x);
        deviation = std::max(deviation, std::abs(fy / gaussian_density(n, 1.0 + alpha, radius) - 1.0));
      }
      if (radius <= reach) {
        SandwichPoint p;
        p.x = x;
        p.radius = radius;
        report.points.push_back(p);
      }
    }
  }
  report.hypothesis_deviation = deviation;
  if (!(deviation <= params.epsilon)) {
    report.status = SandwichStatus::HypothesisNotMet;
    report.points.clear();
    return report;
  }

  const auto& c = report.certificate;
  report.min_lower_margin = std::numeric_limits<double>::infinity();
  report.min_upper_margin = std::numeric_limits<double>::infinity();
  bool holds = true;
  for (SandwichPoint& p : report.points) {
    p.density = product([&](double u) { return body.density(u); }, p.x);
    p.gaussian = gaussian_density(n, 1.0, p.radius);
    p.in_lower_region = p.radius <= c.lower_radius;
    p.in_upper_region = p.radius <= c.upper_radius;
    if (p.in_lower_region) {
      p.lower_margin = p.density - c.lower_factor * p.gaussian;
      report.min_lower_margin = std::min(report.min_lower_margin, p.lower_margin);
      holds = holds && p.lower_margin >= -kSandwichSlack;
    }
    if (p.in_upper_region) {
      p.upper_margin = c.upper_factor * p.gaussian - p.density;
      report.min_upper_margin = std::min(report.min_upper_margin, p.upper_margin);
      holds = holds && p.upper_margin >= -kSandwichSlack;
    }
  }
  report.status = holds ? SandwichStatus::Verified : SandwichStatus::Violated;
  return report;
}

} // namespace cltlab
