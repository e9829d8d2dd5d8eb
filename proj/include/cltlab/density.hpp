#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cltlab/model.hpp"
#include "cltlab/samplers.hpp"

namespace cltlab {

enum class BandwidthRule { Scott, Fixed };

// Gaussian-kernel density estimation settings. The evaluation grid is either
// an explicit set of points (columns of `points`) or a radial grid: every
// radius in `radii` crossed with a fixed set of `directions` unit vectors.
struct KdeConfig {
  BandwidthRule rule = BandwidthRule::Scott;
  double bandwidth = 0.0;  // used when rule == Fixed
  Eigen::MatrixXd points;
  std::vector<double> radii;
  int directions = 8;

  static KdeConfig at_points(Eigen::MatrixXd points, BandwidthRule rule = BandwidthRule::Scott,
                             double bandwidth = 0.0);
  static KdeConfig radial(std::vector<double> radii, int directions,
                          BandwidthRule rule = BandwidthRule::Scott, double bandwidth = 0.0);
};

void validate(const KdeConfig& config);

inline constexpr int kMaxKdeDimension = 3;
inline constexpr std::size_t kMinKdeSamples = 10000;

// Fixed unit directions in R^l: {+1, -1} for l = 1, equally spaced angles for
// l = 2 and a Fibonacci lattice on S^2 for l = 3. Columns of the result.
Eigen::MatrixXd direction_set(int l, int count);

// Radius-major grid: column r * D + d is radii[r] * direction d.
Eigen::MatrixXd radial_grid_points(int l, const std::vector<double>& radii, int directions);

// Scott's rule N^(-1/(l+4)) * sigma, sigma^2 the mean per-coordinate variance.
double scott_bandwidth(const Eigen::MatrixXd& data);

// Gaussian KDE at every grid point, with stderr = sd of the kernel weights
// across samples over sqrt(N).
// DimensionTooHigh if l > 3; TooFewSamples if count < 1e4.
DensityEstimate estimate_density(const SampleBatch& projected, const KdeConfig& config);

// Ratios f_hat(x) / gamma_l[v](x) at the estimate's points with |x| <= max_radius.
RatioReport ratio_to_gaussian(const DensityEstimate& estimate, double v, double max_radius);

struct MTildeSeeds {
  std::uint64_t basis = 0;
  std::uint64_t samples = 0;
  std::uint64_t noise = 0;
};

// Seeds used for the s-th subspace of an m_tilde_profile run.
MTildeSeeds m_tilde_seeds(std::uint64_t seed, int subspace_index);

struct MTildeProfile {
  std::vector<double> radii;
  std::vector<double> ratios;        // mean over subspaces
  std::vector<double> std_error;     // spread of per-subspace ratios / sqrt(count)
  std::vector<double> per_subspace_sup;  // max_t |ratio_s(t) - 1| for each subspace
  double sup_abs_deviation = 0.0;    // max_t |ratios(t) - 1|
  double noise_variance = 0.0;
  double bandwidth = 0.0;            // of the first subspace's estimate
  int subspace_count = 0;
  std::size_t samples_per_subspace = 0;
};

// Average over random subspaces E of the direction-averaged KDE of the
// projection of X (+ Y when a schedule is given) at each radius, divided by
// gamma_l[1 + v](t), v the schedule's noise variance (0 without one).
MTildeProfile m_tilde_profile(const BodySpec& body, const std::optional<ConvolutionSchedule>& schedule,
                              int l, const std::vector<double>& radii, int subspace_count,
                              std::size_t samples_per_subspace, std::uint64_t seed, int directions = 8);

} // namespace cltlab
