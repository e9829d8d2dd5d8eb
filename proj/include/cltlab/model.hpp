#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cltlab {

enum class BodyKind { Cube, Ball, Simplex, ProductLaplace, StandardGaussian };

std::string_view to_string(BodyKind kind);

// Accepts the snake_case names used in JSON ("cube", "ball", "simplex",
// "product_laplace", "standard_gaussian") plus the short CLI aliases
// "laplace" and "gaussian".
BodyKind parse_body_kind(std::string_view name);

inline constexpr BodyKind kAllBodies[] = {BodyKind::Cube, BodyKind::Ball, BodyKind::Simplex,
                                          BodyKind::ProductLaplace, BodyKind::StandardGaussian};

// An isotropic log-concave source distribution from the fixed catalog.
struct BodySpec {
  BodyKind kind = BodyKind::StandardGaussian;
  int dimension = 1;

  static BodySpec make(BodyKind kind, int dimension);
  friend bool operator==(const BodySpec&, const BodySpec&) = default;
};

// Centered gaussian with covariance variance * Id.
struct GaussianSpec {
  int dimension = 1;
  double variance = 1.0;

  static GaussianSpec make(int dimension, double variance);
  friend bool operator==(const GaussianSpec&, const GaussianSpec&) = default;
};

// Noise schedule for the convolve-and-rescale step: lambda = 1/(5 alpha + 20)
// and the gaussian noise variance n^(-alpha lambda).
struct ConvolutionSchedule {
  double alpha = 10.0;
  double lambda = 1.0 / 70.0;
  double noise_variance = 1.0;
  int dimension = 1;

  static ConvolutionSchedule make(double alpha, int dimension);
  friend bool operator==(const ConvolutionSchedule&, const ConvolutionSchedule&) = default;
};

// Orthonormal frame of an l-dimensional subspace of R^n, one basis vector per
// row of `rows` (l x n).
struct SubspaceBasis {
  int ambient_dim = 1;
  int subspace_dim = 1;
  Eigen::MatrixXd rows;

  static constexpr double kGramTolerance = 1e-10;

  static SubspaceBasis make(Eigen::MatrixXd rows);
  // Max-norm deviation of rows * rows^T from the identity.
  double gram_deviation() const;
  friend bool operator==(const SubspaceBasis& a, const SubspaceBasis& b) {
    return a.ambient_dim == b.ambient_dim && a.subspace_dim == b.subspace_dim && a.rows == b.rows;
  }
};

// Radial law of |Z|: either a histogram over bin edges (mass per bin) or the
// closed-form chi distribution with `chi_dof` degrees of freedom.
struct RadialDensity {
  enum class Form { Binned, ClosedFormChi };

  Form form = Form::Binned;
  std::vector<double> edges;  // size bin_count() + 1, strictly increasing
  std::vector<double> mass;   // size bin_count()
  int chi_dof = 0;

  static constexpr double kMassTolerance = 1e-6;

  static RadialDensity binned(std::vector<double> edges, std::vector<double> mass);
  static RadialDensity chi(int dof);

  std::size_t bin_count() const { return mass.size(); }
  double midpoint(std::size_t bin) const { return 0.5 * (edges[bin] + edges[bin + 1]); }
  double width(std::size_t bin) const { return edges[bin + 1] - edges[bin]; }
  double total_mass() const;
  friend bool operator==(const RadialDensity&, const RadialDensity&) = default;
};

// Pointwise density estimate at the columns of `points` (l x M).
struct DensityEstimate {
  Eigen::MatrixXd points;
  std::vector<double> values;
  std::vector<double> std_error;
  std::size_t sample_count = 0;
  double bandwidth = 0.0;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const DensityEstimate& a, const DensityEstimate& b) {
    return a.points == b.points && a.values == b.values && a.std_error == b.std_error &&
           a.sample_count == b.sample_count && a.bandwidth == b.bandwidth;
  }
};

// Pointwise ratios of an estimate to a reference gaussian, with the sup of
// |ratio - 1| over the evaluated points.
struct RatioReport {
  std::vector<double> radius_grid;
  std::vector<double> per_point_ratios;
  double sup_abs_deviation = 0.0;

  static RatioReport make(std::vector<double> radius_grid, std::vector<double> ratios);
  friend bool operator==(const RatioReport&, const RatioReport&) = default;
};

struct DeconvCertificate {
  bool admissible = false;
  std::vector<std::string> violated_conditions;
  double epsilon = 0.0;
  double lower_radius = 0.0;  // min{R - 1, (2n)^beta}
  double upper_radius = 0.0;  // min{(2n)^beta, R} - 3
  double lower_factor = 1.0;  // 1 - 6 epsilon
  double upper_factor = 1.0;  // 1 + 8 epsilon
  friend bool operator==(const DeconvCertificate&, const DeconvCertificate&) = default;
};

// validate() returns its argument unchanged when every invariant holds and
// throws InvalidSpec naming the first violated one otherwise.
const BodySpec& validate(const BodySpec& spec);
const GaussianSpec& validate(const GaussianSpec& spec);
const ConvolutionSchedule& validate(const ConvolutionSchedule& schedule);
const SubspaceBasis& validate(const SubspaceBasis& basis);
const RadialDensity& validate(const RadialDensity& density);
const DensityEstimate& validate(const DensityEstimate& estimate);
const RatioReport& validate(const RatioReport& report);
const DeconvCertificate& validate(const DeconvCertificate& certificate);

} // namespace cltlab
