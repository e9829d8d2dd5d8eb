#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "cltlab/model.hpp"

namespace cltlab {

struct SubspaceBasis;

// N realizations of a random vector in R^n, stored one sample per column
// (dimension x count, column-major).
struct SampleBatch {
  int dimension = 0;
  std::size_t count = 0;
  Eigen::MatrixXd data;
  std::uint64_t seed = 0;
  nlohmann::json source;  // description of the generating law

  static SampleBatch make(Eigen::MatrixXd data, std::uint64_t seed, nlohmann::json source);
  friend bool operator==(const SampleBatch& a, const SampleBatch& b) {
    return a.dimension == b.dimension && a.count == b.count && a.seed == b.seed &&
           a.source == b.source && a.data == b.data;
  }
};

const SampleBatch& validate(const SampleBatch& batch);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // normalized by N
};

// Half-width of the isotropic cube [-sqrt3, sqrt3]^n.
inline const double kCubeHalfWidth = 1.7320508075688772;
// Scale of the variance-one two-sided exponential: Var = 2 b^2.
inline const double kLaplaceScale = 0.70710678118654752;

// Raw building blocks. Each chunk is generated from its own engine derived
// from (seed, chunk_index) and holds `size` columns.
Eigen::MatrixXd body_chunk(const BodySpec& spec, std::size_t size, std::uint64_t seed,
                           std::size_t chunk_index);
Eigen::MatrixXd gaussian_chunk(const GaussianSpec& spec, std::size_t size, std::uint64_t seed,
                               std::size_t chunk_index);
Eigen::MatrixXd noise_chunk(int dimension, double variance, std::size_t size,
                            std::uint64_t seed, std::size_t chunk_index);

// n x (n+1) matrix sqrt(K(K+1)) H, K = n+1, with H the Helmert rows
// orthogonal to (1,...,1). Maps a uniform point of the standard simplex in
// R^K to the isotropic regular simplex in R^n. The sampler applies it through
// an O(n) recurrence; the dense form is for tests and diagnostics.
Eigen::MatrixXd simplex_whitening_matrix(int dimension);

SampleBatch sample_body(const BodySpec& spec, std::size_t count, std::uint64_t seed);
SampleBatch sample_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed);

// Z_i = (x_i + y_i) / sqrt(1 + v) with fresh y_i ~ N(0, v Id). v = 0 returns
// the input data unchanged.
SampleBatch convolve_and_rescale(const SampleBatch& x, const ConvolutionSchedule& schedule,
                                 std::uint64_t seed);
SampleBatch convolve_and_rescale(const SampleBatch& x, double noise_variance, std::uint64_t seed);

// Affine map to zero empirical mean and identity empirical covariance using
// the Cholesky factor of the empirical covariance.
SampleBatch whiten(const SampleBatch& batch);

Moments empirical_moments(const Eigen::MatrixXd& data);

// Streaming variants that never materialize the n x N batch. Each is
// bit-identical to composing the corresponding batch operations.
struct StreamOptions {
  double noise_variance = 0.0;  // gaussian noise added before scaling
  double scale = 1.0;           // multiplies x + y
  std::uint64_t noise_seed = 0;
};

// |x_i| for every sample of the body (after the optional noise/scale step).
Eigen::VectorXd sample_norms(const BodySpec& spec, std::size_t count, std::uint64_t seed,
                             const StreamOptions& options = {});

// Projection coordinates of every sample of the body onto `basis`.
SampleBatch sample_projected(const BodySpec& spec, std::size_t count, std::uint64_t seed,
                             const SubspaceBasis& basis, const StreamOptions& options = {});

} // namespace cltlab
