#include "cltlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cltlab/errors.hpp"
#include "cltlab/grassmann.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/spherical.hpp"

namespace cltlab {

KdeConfig KdeConfig::at_points(Eigen::MatrixXd points, BandwidthRule rule, double bandwidth) {
  KdeConfig config;
  config.points = std::move(points);
  config.rule = rule;
  config.bandwidth = bandwidth;
  validate(config);
  return config;
}

KdeConfig KdeConfig::radial(std::vector<double> radii, int directions, BandwidthRule rule,
                            double bandwidth) {
  KdeConfig config;
  config.radii = std::move(radii);
  config.directions = directions;
  config.rule = rule;
  config.bandwidth = bandwidth;
  validate(config);
  return config;
}

void validate(const KdeConfig& config) {
  if (config.rule == BandwidthRule::Fixed && !(config.bandwidth > 0.0))
    throw InvalidSpec("KdeConfig: bandwidth > 0 when Fixed");
  if (config.points.size() == 0) {
    if (config.radii.empty()) throw InvalidSpec("KdeConfig: empty evaluation grid");
    if (config.directions < 1) throw InvalidSpec("KdeConfig: directions >= 1");
    for (double r : config.radii)
      if (!(r >= 0.0)) throw InvalidSpec("KdeConfig: radii >= 0");
  }
}

Eigen::MatrixXd direction_set(int l, int count) {
  if (l < 1 || l > kMaxKdeDimension) throw DimensionTooHigh("direction sets exist for l <= 3");
  if (count < 1) throw InvalidSpec("direction count must be >= 1");
  if (l == 1) {
    Eigen::MatrixXd d(1, 2);
    d << 1.0, -1.0;
    return d;
  }
  Eigen::MatrixXd d(l, count);
  if (l == 2) {
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / count;
      d(0, k) = std::cos(angle);
      d(1, k) = std::sin(angle);
    }
    return d;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    d(0, k) = rho * std::cos(golden * k);
    d(1, k) = rho * std::sin(golden * k);
    d(2, k) = z;
  }
  return d;
}

Eigen::MatrixXd radial_grid_points(int l, const std::vector<double>& radii, int directions) {
  const Eigen::MatrixXd dirs = direction_set(l, directions);
  const auto d = dirs.cols();
  Eigen::MatrixXd points(l, static_cast<Eigen::Index>(radii.size()) * d);
  for (std::size_t r = 0; r < radii.size(); ++r)
    points.middleCols(static_cast<Eigen::Index>(r) * d, d) = radii[r] * dirs;
  return points;
}

double scott_bandwidth(const Eigen::MatrixXd& data) {
  const auto count = static_cast<double>(data.cols());
  const Eigen::VectorXd mean = data.rowwise().mean();
  const double variance = (data.colwise() - mean).squaredNorm() / (count * static_cast<double>(data.rows()));
  // Spread at the rounding level of the data counts as none.
  const double scale = std::max(1.0, mean.cwiseAbs().maxCoeff());
  if (std::sqrt(variance) <= 1e-12 * scale) return 0.0;
  return std::pow(count, -1.0 / (data.rows() + 4.0)) * std::sqrt(variance);
}

DensityEstimate estimate_density(const SampleBatch& projected, const KdeConfig& config) {
  validate(projected);
  validate(config);
  const int l = projected.dimension;
  if (l > kMaxKdeDimension)
    throw DimensionTooHigh("density estimation is limited to l <= 3 (got l=" + std::to_string(l) + ")");
  if (projected.count < kMinKdeSamples)
    throw TooFewSamples("density estimation needs at least 1e4 samples (got " +
                        std::to_string(projected.count) + ")");

  DensityEstimate estimate;
  estimate.points = config.points.size() > 0 ? config.points : radial_grid_points(l, config.radii, config.directions);
  if (estimate.points.rows() != l) throw DimensionError("evaluation points do not match the sample dimension");
  estimate.sample_count = projected.count;
  estimate.bandwidth = config.rule == BandwidthRule::Fixed ? config.bandwidth : scott_bandwidth(projected.data);
  if (!(estimate.bandwidth > 0.0))
    throw InvalidSpec("Scott bandwidth is zero for a degenerate sample; use a fixed bandwidth");

  const auto m = estimate.points.cols();
  estimate.values.assign(static_cast<std::size_t>(m), 0.0);
  estimate.std_error.assign(static_cast<std::size_t>(m), 0.0);
  const double h = estimate.bandwidth;
  const double inv_two_h2 = 1.0 / (2.0 * h * h);
  const double norm = std::pow(2.0 * std::numbers::pi * h * h, -0.5 * l);
  const auto count = static_cast<Eigen::Index>(projected.count);
  const double* samples = projected.data.data();

#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    double x[kMaxKdeDimension] = {0.0, 0.0, 0.0};
    for (int c = 0; c < l; ++c) x[c] = estimate.points(c, j);
    double sum = 0.0, sum_sq = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double* s = samples + i * l;
      double d2 = 0.0;
      for (int c = 0; c < l; ++c) {
        const double diff = s[c] - x[c];
        d2 += diff * diff;
      }
      const double k = std::exp(-d2 * inv_two_h2);
      sum += k;
      sum_sq += k * k;
    }
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    const double variance = std::max(0.0, sum_sq / n - mean * mean) * n / (n - 1.0);
    estimate.values[static_cast<std::size_t>(j)] = norm * mean;
    estimate.std_error[static_cast<std::size_t>(j)] = norm * std::sqrt(variance / n);
  }
  validate(estimate);
  return estimate;
}

RatioReport ratio_to_gaussian(const DensityEstimate& estimate, double v, double max_radius) {
  validate(estimate);
  if (!(v > 0.0)) throw InvalidSpec("reference variance must be > 0");
  const int l = static_cast<int>(estimate.points.rows());
  std::vector<double> radii, ratios;
  for (Eigen::Index j = 0; j < estimate.points.cols(); ++j) {
    const double radius = estimate.points.col(j).norm();
    if (radius > max_radius) continue;
    radii.push_back(radius);
    ratios.push_back(estimate.values[static_cast<std::size_t>(j)] / gaussian_density(l, v, radius));
  }
  return RatioReport::make(std::move(radii), std::move(ratios));
}

MTildeSeeds m_tilde_seeds(std::uint64_t seed, int subspace_index) {
  const auto s = static_cast<std::uint64_t>(subspace_index);
  return {rng::derive_seed(seed, rng::Stream::Experiment, 3 * s),
          rng::derive_seed(seed, rng::Stream::Experiment, 3 * s + 1),
          rng::derive_seed(seed, rng::Stream::Experiment, 3 * s + 2)};
}

MTildeProfile m_tilde_profile(const BodySpec& body, const std::optional<ConvolutionSchedule>& schedule,
                              int l, const std::vector<double>& radii, int subspace_count,
                              std::size_t samples_per_subspace, std::uint64_t seed, int directions) {
  validate(body);
  if (l > kMaxKdeDimension) throw DimensionTooHigh("m_tilde_profile is limited to l <= 3");
  if (subspace_count < 1) throw InvalidSpec("subspace_count must be >= 1");
  if (schedule) {
    validate(*schedule);
    if (schedule->dimension != body.dimension)
      throw DimensionError("convolution schedule dimension does not match the body");
  }
  const double v = schedule ? schedule->noise_variance : 0.0;
  const KdeConfig config = KdeConfig::radial(radii, directions);
  const auto d = static_cast<std::size_t>(direction_set(l, directions).cols());

  MTildeProfile profile;
  profile.radii = radii;
  profile.noise_variance = v;
  profile.subspace_count = subspace_count;
  profile.samples_per_subspace = samples_per_subspace;
  std::vector<double> sum(radii.size(), 0.0), sum_sq(radii.size(), 0.0);

  for (int s = 0; s < subspace_count; ++s) {
    const MTildeSeeds seeds = m_tilde_seeds(seed, s);
    const SubspaceBasis basis = random_subspace(body.dimension, l, seeds.basis);
    const StreamOptions options{v, 1.0, seeds.noise};
    const SampleBatch projected = sample_projected(body, samples_per_subspace, seeds.samples, basis, options);
    const DensityEstimate estimate = estimate_density(projected, config);
    if (s == 0) profile.bandwidth = estimate.bandwidth;
    double sup = 0.0;
    for (std::size_t r = 0; r < radii.size(); ++r) {
      double mean = 0.0;
      for (std::size_t k = 0; k < d; ++k) mean += estimate.values[r * d + k];
      mean /= static_cast<double>(d);
      const double ratio = mean / gaussian_density(l, 1.0 + v, radii[r]);
      sum[r] += ratio;
      sum_sq[r] += ratio * ratio;
      sup = std::max(sup, std::abs(ratio - 1.0));
    }
    profile.per_subspace_sup.push_back(sup);
  }

  const double count = subspace_count;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double mean = sum[r] / count;
    const double variance = count > 1 ? std::max(0.0, sum_sq[r] / count - mean * mean) * count / (count - 1.0) : 0.0;
    profile.ratios.push_back(mean);
    profile.std_error.push_back(std::sqrt(variance / count));
    profile.sup_abs_deviation = std::max(profile.sup_abs_deviation, std::abs(mean - 1.0));
  }
  return profile;
}

} // namespace cltlab
