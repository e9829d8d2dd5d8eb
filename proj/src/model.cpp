#include "cltlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cltlab/errors.hpp"

namespace cltlab {

namespace {

void require(bool ok, const char* invariant) {
  if (!ok) throw InvalidSpec(invariant);
}

} // namespace

std::string_view to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::Cube: return "cube";
    case BodyKind::Ball: return "ball";
    case BodyKind::Simplex: return "simplex";
    case BodyKind::ProductLaplace: return "product_laplace";
    case BodyKind::StandardGaussian: return "standard_gaussian";
  }
  return "unknown";
}

BodyKind parse_body_kind(std::string_view name) {
  if (name == "cube") return BodyKind::Cube;
  if (name == "ball") return BodyKind::Ball;
  if (name == "simplex") return BodyKind::Simplex;
  if (name == "product_laplace" || name == "laplace") return BodyKind::ProductLaplace;
  if (name == "standard_gaussian" || name == "gaussian") return BodyKind::StandardGaussian;
  throw InvalidSpec("unknown body kind '" + std::string(name) + "'");
}

BodySpec BodySpec::make(BodyKind kind, int dimension) {
  BodySpec spec{kind, dimension};
  validate(spec);
  return spec;
}

GaussianSpec GaussianSpec::make(int dimension, double variance) {
  GaussianSpec spec{dimension, variance};
  validate(spec);
  return spec;
}

ConvolutionSchedule ConvolutionSchedule::make(double alpha, int dimension) {
  require(alpha > 0.0 && alpha < 1e5, "ConvolutionSchedule: 0 < alpha < 1e5");
  require(dimension >= 1, "ConvolutionSchedule: dimension >= 1");
  ConvolutionSchedule schedule;
  schedule.alpha = alpha;
  schedule.lambda = 1.0 / (5.0 * alpha + 20.0);
  schedule.noise_variance = std::pow(static_cast<double>(dimension), -alpha * schedule.lambda);
  schedule.dimension = dimension;
  return schedule;
}

SubspaceBasis SubspaceBasis::make(Eigen::MatrixXd rows) {
  SubspaceBasis basis;
  basis.subspace_dim = static_cast<int>(rows.rows());
  basis.ambient_dim = static_cast<int>(rows.cols());
  basis.rows = std::move(rows);
  validate(basis);
  return basis;
}

double SubspaceBasis::gram_deviation() const {
  const Eigen::MatrixXd gram = rows * rows.transpose();
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

RadialDensity RadialDensity::binned(std::vector<double> edges, std::vector<double> mass) {
  RadialDensity density;
  density.form = Form::Binned;
  density.edges = std::move(edges);
  density.mass = std::move(mass);
  validate(density);
  return density;
}

RadialDensity RadialDensity::chi(int dof) {
  RadialDensity density;
  density.form = Form::ClosedFormChi;
  density.chi_dof = dof;
  validate(density);
  return density;
}

double RadialDensity::total_mass() const {
  if (form == Form::ClosedFormChi) return 1.0;
  double total = 0.0;
  for (double m : mass) total += m;
  return total;
}

RatioReport RatioReport::make(std::vector<double> radius_grid, std::vector<double> ratios) {
  RatioReport report;
  report.radius_grid = std::move(radius_grid);
  report.per_point_ratios = std::move(ratios);
  for (double r : report.per_point_ratios)
    report.sup_abs_deviation = std::max(report.sup_abs_deviation, std::abs(r - 1.0));
  validate(report);
  return report;
}

const BodySpec& validate(const BodySpec& spec) {
  require(spec.dimension >= 1, "BodySpec: dimension >= 1");
  return spec;
}

const GaussianSpec& validate(const GaussianSpec& spec) {
  require(spec.dimension >= 1, "GaussianSpec: dimension >= 1");
  require(spec.variance > 0.0 && std::isfinite(spec.variance), "GaussianSpec: variance > 0");
  return spec;
}

const ConvolutionSchedule& validate(const ConvolutionSchedule& schedule) {
  require(schedule.alpha > 0.0 && schedule.alpha < 1e5, "ConvolutionSchedule: 0 < alpha < 1e5");
  require(schedule.dimension >= 1, "ConvolutionSchedule: dimension >= 1");
  require(schedule.lambda == 1.0 / (5.0 * schedule.alpha + 20.0),
          "ConvolutionSchedule: lambda = 1/(5 alpha + 20)");
  require(schedule.noise_variance ==
              std::pow(static_cast<double>(schedule.dimension), -schedule.alpha * schedule.lambda),
          "ConvolutionSchedule: noise_variance = n^(-alpha lambda)");
  return schedule;
}

const SubspaceBasis& validate(const SubspaceBasis& basis) {
  require(basis.subspace_dim >= 1 && basis.subspace_dim <= basis.ambient_dim,
          "SubspaceBasis: 1 <= subspace_dim <= ambient_dim");
  require(basis.rows.rows() == basis.subspace_dim && basis.rows.cols() == basis.ambient_dim,
          "SubspaceBasis: rows shape is subspace_dim x ambient_dim");
  require(basis.rows.allFinite(), "SubspaceBasis: finite entries");
  require(basis.gram_deviation() <= SubspaceBasis::kGramTolerance,
          "SubspaceBasis: rows orthonormal within 1e-10");
  return basis;
}

const RadialDensity& validate(const RadialDensity& density) {
  if (density.form == RadialDensity::Form::ClosedFormChi) {
    require(density.chi_dof >= 1, "RadialDensity: chi degrees of freedom >= 1");
    return density;
  }
  require(!density.mass.empty(), "RadialDensity: at least one bin");
  require(density.edges.size() == density.mass.size() + 1, "RadialDensity: edges = bins + 1");
  require(density.edges.front() >= 0.0, "RadialDensity: radii nonnegative");
  for (std::size_t i = 0; i + 1 < density.edges.size(); ++i)
    require(density.edges[i] < density.edges[i + 1], "RadialDensity: grid strictly increasing");
  for (double m : density.mass) require(m >= 0.0, "RadialDensity: weights >= 0");
  const double total = density.total_mass();
  require(total >= 1.0 - RadialDensity::kMassTolerance && total <= 1.0 + 1e-12,
          "RadialDensity: total mass in [1 - 1e-6, 1]");
  return density;
}

const DensityEstimate& validate(const DensityEstimate& estimate) {
  const auto m = static_cast<std::size_t>(estimate.points.cols());
  require(estimate.values.size() == m && estimate.std_error.size() == m,
          "DensityEstimate: one value and stderr per point");
  for (double v : estimate.values) require(v >= 0.0, "DensityEstimate: values >= 0");
  for (double s : estimate.std_error) require(s >= 0.0, "DensityEstimate: stderr >= 0");
  require(estimate.bandwidth > 0.0, "DensityEstimate: bandwidth > 0");
  return estimate;
}

const RatioReport& validate(const RatioReport& report) {
  require(report.radius_grid.size() == report.per_point_ratios.size(),
          "RatioReport: one radius per ratio");
  require(report.sup_abs_deviation >= 0.0, "RatioReport: sup_abs_deviation >= 0");
  double sup = 0.0;
  for (double r : report.per_point_ratios) sup = std::max(sup, std::abs(r - 1.0));
  require(sup == report.sup_abs_deviation,
          "RatioReport: sup_abs_deviation = max |per_point_ratios - 1|");
  return report;
}

const DeconvCertificate& validate(const DeconvCertificate& c) {
  if (c.admissible) {
    require(c.epsilon > 0.0 && c.epsilon < 0.01, "DeconvCertificate: admissible implies 0 < epsilon < 1/100");
    require(c.violated_conditions.empty(), "DeconvCertificate: admissible implies no violated conditions");
  }
  if (c.epsilon > 0.0)
    require(c.lower_factor < 1.0 && 1.0 < c.upper_factor,
            "DeconvCertificate: lower_factor < 1 < upper_factor");
  return c;
}

} // namespace cltlab
