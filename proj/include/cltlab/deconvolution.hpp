#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cltlab/model.hpp"

namespace cltlab {

// Parameters of the lower/upper deconvolution lemmas. `alpha` is the variance
// of the gaussian noise, `n` the dimension of X.
struct DeconvParams {
  int n = 1;
  double alpha = 0.0;
  double beta = 0.5;
  double epsilon = 0.005;
  double R = 10.0;
  double c0 = 1e-2;  // unspecified universal constant, configurable

  static DeconvParams make(int n, double alpha, double beta, double epsilon, double R, double c0 = 1e-2);
  friend bool operator==(const DeconvParams&, const DeconvParams&) = default;
};

const DeconvParams& validate(const DeconvParams& params);

// Admissible iff alpha <= c0 n^-8 and 100 (2n)^max(3 beta, 3/2) alpha^(1/4) < eps < 1/100.
// Inadmissibility is reported through violated_conditions, never thrown.
DeconvCertificate check_conditions(const DeconvParams& params);

// Density samples on a uniform, axis-aligned grid in R^1 or R^2. The grid has
// `size` points per axis at origin + i * spacing; values is size x 1 in 1-d
// and size x size (row index = first coordinate) in 2-d.
struct UniformGrid {
  int dimension = 1;
  double origin = 0.0;
  double spacing = 1.0;
  Eigen::Index size = 0;
  Eigen::MatrixXd values;

  // Grid symmetric about 0 covering [-half_width, half_width].
  static UniformGrid symmetric(int dimension, double half_width, double spacing);

  double coordinate(Eigen::Index i) const { return origin + static_cast<double>(i) * spacing; }
  double cell_volume() const { return dimension == 1 ? spacing : spacing * spacing; }
  double mass() const { return values.sum() * cell_volume(); }
  // Fills values with f evaluated at every grid point (x or (x, y)).
  void fill(const std::function<double(const Eigen::Vector2d&)>& f);
};

// Discrete convolution with the gaussian of variance alpha, kernel sampled on
// the grid, truncated at 8 sqrt(alpha) and renormalized to unit mass.
// GridTooCoarse if spacing > sqrt(alpha) / 2; InvalidSpec if the input has
// negative values or its mass is not within 1e-6 of 1.
UniformGrid grid_convolve(const UniformGrid& density, double alpha);

// 1-d log-concave test densities with closed-form convolution against a
// centered gaussian.
struct ClosedFormDensity {
  enum class Kind { Gaussian, Uniform, Laplace };
  Kind kind = Kind::Gaussian;
  double variance = 1.0;  // Gaussian only; Uniform and Laplace are variance one

  static ClosedFormDensity gaussian(double variance = 1.0) { return {Kind::Gaussian, variance}; }
  static ClosedFormDensity uniform() { return {Kind::Uniform, 1.0}; }
  static ClosedFormDensity laplace() { return {Kind::Laplace, 1.0}; }

  double density(double x) const;
  // (f * gamma_1[alpha])(x); alpha = 0 returns density(x).
  double convolved(double x, double alpha) const;
  std::string name() const;
};

ClosedFormDensity parse_closed_form(std::string_view name, double variance = 1.0);

enum class SandwichStatus { Verified, Violated, HypothesisNotMet, Inadmissible };
std::string_view to_string(SandwichStatus status);

struct SandwichPoint {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();  // second coordinate unused in 1-d
  double radius = 0.0;
  double density = 0.0;   // f_X(x)
  double gaussian = 0.0;  // gamma_n[1](x)
  bool in_lower_region = false;
  bool in_upper_region = false;
  double lower_margin = 0.0;  // f_X - (1 - 6 eps) gamma, when in_lower_region
  double upper_margin = 0.0;  // (1 + 8 eps) gamma - f_X, when in_upper_region
};

struct SandwichReport {
  SandwichStatus status = SandwichStatus::Inadmissible;
  DeconvCertificate certificate;
  int dimension = 1;
  double hypothesis_deviation = 0.0;  // max_{|x|<=R} |f_{X+Y} / gamma[1+alpha] - 1|
  double min_lower_margin = 0.0;
  double min_upper_margin = 0.0;
  std::vector<SandwichPoint> points;
};

inline constexpr double kSandwichSlack = 1e-9;

// Checks both sandwich conclusions pointwise for X with density `body` in each
// coordinate (dimension = params.n, which must be 1 or 2). Returns
// Inadmissible or HypothesisNotMet without asserting anything when the
// certificate or the numerical hypothesis check fails.
SandwichReport verify_sandwich(const ClosedFormDensity& body, const DeconvParams& params, double spacing = 0.0);

} // namespace cltlab
