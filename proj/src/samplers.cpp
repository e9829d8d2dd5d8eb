#include "cltlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cltlab/errors.hpp"
#include "cltlab/grassmann.hpp"
#include "cltlab/rng.hpp"

namespace cltlab {

namespace {

using nlohmann::json;

std::size_t chunk_size(std::size_t count, std::size_t chunk) {
  const std::size_t first = chunk * rng::kChunkSize;
  return std::min(rng::kChunkSize, count - first);
}

void fill_cube(rng::Engine& engine, Eigen::Ref<Eigen::MatrixXd> out) {
  std::uniform_real_distribution<double> uniform(-kCubeHalfWidth, kCubeHalfWidth);
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = uniform(engine);
}

void fill_gaussian(rng::Engine& engine, Eigen::Ref<Eigen::MatrixXd> out, double stddev) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = stddev * normal(engine);
}

// Uniform direction times radius R U^(1/n), R = sqrt(n + 2).
void fill_ball(rng::Engine& engine, Eigen::Ref<Eigen::MatrixXd> out) {
  const auto n = out.rows();
  const double radius = std::sqrt(static_cast<double>(n) + 2.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    double norm2 = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) col[i] = normal(engine);
      norm2 = col.squaredNorm();
    } while (norm2 == 0.0);
    const double r = radius * std::pow(uniform(engine), inv_n);
    col *= r / std::sqrt(norm2);
  }
}

// Exponential spacings give a uniform point w of the standard simplex in
// R^(n+1); the scaled Helmert rows map it to the isotropic regular simplex:
//   x_k = sqrt(K(K+1)) (w_1 + ... + w_k - k w_(k+1)) / sqrt(k(k+1)).
void fill_simplex(rng::Engine& engine, Eigen::Ref<Eigen::MatrixXd> out) {
  const auto n = out.rows();
  const auto k_vertices = static_cast<double>(n + 1);
  const double scale = std::sqrt(k_vertices * (k_vertices + 1.0));
  std::vector<double> helmert(static_cast<std::size_t>(n));
  for (Eigen::Index k = 1; k <= n; ++k)
    helmert[static_cast<std::size_t>(k - 1)] = scale / std::sqrt(static_cast<double>(k) * (k + 1));
  std::exponential_distribution<double> exponential(1.0);
  std::vector<double> e(static_cast<std::size_t>(n + 1));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    double total = 0.0;
    for (auto& v : e) {
      v = exponential(engine);
      total += v;
    }
    const double inv_total = 1.0 / total;
    double prefix = 0.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      prefix += e[static_cast<std::size_t>(k - 1)];
      const double numerator = prefix - static_cast<double>(k) * e[static_cast<std::size_t>(k)];
      out(k - 1, j) = helmert[static_cast<std::size_t>(k - 1)] * numerator * inv_total;
    }
  }
}

void fill_laplace(rng::Engine& engine, Eigen::Ref<Eigen::MatrixXd> out) {
  std::exponential_distribution<double> exponential(1.0);
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double magnitude = kLaplaceScale * exponential(engine);
    p[i] = (engine() >> 63) ? -magnitude : magnitude;
  }
}

json describe(const BodySpec& spec) {
  return {{"type", "body"}, {"kind", std::string(to_string(spec.kind))}, {"dimension", spec.dimension}};
}

json describe(const GaussianSpec& spec) {
  return {{"type", "gaussian"}, {"dimension", spec.dimension}, {"variance", spec.variance}};
}

template <class ChunkFn>
Eigen::MatrixXd generate(int dimension, std::size_t count, ChunkFn&& make_chunk) {
  Eigen::MatrixXd data(dimension, static_cast<Eigen::Index>(count));
  const auto chunks = static_cast<std::int64_t>(rng::chunk_count(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto chunk = static_cast<std::size_t>(c);
    const auto size = chunk_size(count, chunk);
    data.middleCols(static_cast<Eigen::Index>(chunk * rng::kChunkSize), static_cast<Eigen::Index>(size)) =
        make_chunk(size, chunk);
  }
  return data;
}

void require_count(std::size_t count) {
  if (count < 1) throw InvalidSpec("sample count must be >= 1");
}

// x + y then scale, applied in place to one chunk.
void add_noise_and_scale(Eigen::MatrixXd& block, const StreamOptions& options, std::size_t chunk) {
  if (options.noise_variance > 0.0)
    block += noise_chunk(static_cast<int>(block.rows()), options.noise_variance,
                         static_cast<std::size_t>(block.cols()), options.noise_seed, chunk);
  if (options.scale != 1.0) block *= options.scale;
}

} // namespace

SampleBatch SampleBatch::make(Eigen::MatrixXd data, std::uint64_t seed, nlohmann::json source) {
  SampleBatch batch;
  batch.dimension = static_cast<int>(data.rows());
  batch.count = static_cast<std::size_t>(data.cols());
  batch.data = std::move(data);
  batch.seed = seed;
  batch.source = std::move(source);
  validate(batch);
  return batch;
}

const SampleBatch& validate(const SampleBatch& batch) {
  if (batch.dimension < 1) throw InvalidSpec("SampleBatch: dimension >= 1");
  if (batch.data.rows() != batch.dimension) throw InvalidSpec("SampleBatch: dimension consistent across vectors");
  if (static_cast<std::size_t>(batch.data.cols()) != batch.count)
    throw InvalidSpec("SampleBatch: count = number of stored vectors");
  return batch;
}

Eigen::MatrixXd body_chunk(const BodySpec& spec, std::size_t size, std::uint64_t seed,
                           std::size_t chunk_index) {
  Eigen::MatrixXd out(spec.dimension, static_cast<Eigen::Index>(size));
  auto engine = rng::make_engine(seed, rng::Stream::Body, chunk_index);
  switch (spec.kind) {
    case BodyKind::Cube: fill_cube(engine, out); break;
    case BodyKind::Ball: fill_ball(engine, out); break;
    case BodyKind::Simplex: fill_simplex(engine, out); break;
    case BodyKind::ProductLaplace: fill_laplace(engine, out); break;
    case BodyKind::StandardGaussian: fill_gaussian(engine, out, 1.0); break;
  }
  return out;
}

Eigen::MatrixXd gaussian_chunk(const GaussianSpec& spec, std::size_t size, std::uint64_t seed,
                               std::size_t chunk_index) {
  Eigen::MatrixXd out(spec.dimension, static_cast<Eigen::Index>(size));
  auto engine = rng::make_engine(seed, rng::Stream::Gaussian, chunk_index);
  fill_gaussian(engine, out, std::sqrt(spec.variance));
  return out;
}

Eigen::MatrixXd noise_chunk(int dimension, double variance, std::size_t size, std::uint64_t seed,
                            std::size_t chunk_index) {
  Eigen::MatrixXd out(dimension, static_cast<Eigen::Index>(size));
  auto engine = rng::make_engine(seed, rng::Stream::Noise, chunk_index);
  fill_gaussian(engine, out, std::sqrt(variance));
  return out;
}

Eigen::MatrixXd simplex_whitening_matrix(int dimension) {
  const double k_vertices = dimension + 1.0;
  const double scale = std::sqrt(k_vertices * (k_vertices + 1.0));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dimension, dimension + 1);
  for (int k = 1; k <= dimension; ++k) {
    const double h = scale / std::sqrt(static_cast<double>(k) * (k + 1));
    w.row(k - 1).head(k).setConstant(h);
    w(k - 1, k) = -k * h;
  }
  return w;
}

SampleBatch sample_body(const BodySpec& spec, std::size_t count, std::uint64_t seed) {
  validate(spec);
  require_count(count);
  auto data = generate(spec.dimension, count, [&](std::size_t size, std::size_t chunk) {
    return body_chunk(spec, size, seed, chunk);
  });
  return SampleBatch::make(std::move(data), seed, describe(spec));
}

SampleBatch sample_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed) {
  validate(spec);
  require_count(count);
  auto data = generate(spec.dimension, count, [&](std::size_t size, std::size_t chunk) {
    return gaussian_chunk(spec, size, seed, chunk);
  });
  return SampleBatch::make(std::move(data), seed, describe(spec));
}

SampleBatch convolve_and_rescale(const SampleBatch& x, const ConvolutionSchedule& schedule,
                                 std::uint64_t seed) {
  validate(schedule);
  if (schedule.dimension != x.dimension)
    throw DimensionError("convolution schedule dimension does not match the batch");
  return convolve_and_rescale(x, schedule.noise_variance, seed);
}

SampleBatch convolve_and_rescale(const SampleBatch& x, double noise_variance, std::uint64_t seed) {
  validate(x);
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
    throw InvalidSpec("noise variance must be >= 0");
  json source = {{"type", "convolved"}, {"noise_variance", noise_variance}, {"noise_seed", seed},
                 {"input", x.source}};
  if (noise_variance == 0.0) return SampleBatch::make(x.data, x.seed, std::move(source));

  const StreamOptions options{noise_variance, 1.0 / std::sqrt(1.0 + noise_variance), seed};
  Eigen::MatrixXd data(x.dimension, static_cast<Eigen::Index>(x.count));
  const auto chunks = static_cast<std::int64_t>(rng::chunk_count(x.count));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto chunk = static_cast<std::size_t>(c);
    const auto first = static_cast<Eigen::Index>(chunk * rng::kChunkSize);
    const auto size = static_cast<Eigen::Index>(chunk_size(x.count, chunk));
    Eigen::MatrixXd block = x.data.middleCols(first, size);
    add_noise_and_scale(block, options, chunk);
    data.middleCols(first, size) = block;
  }
  return SampleBatch::make(std::move(data), x.seed, std::move(source));
}

Moments empirical_moments(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const auto count = data.cols();
  Moments m;
  m.mean = Eigen::VectorXd::Zero(n);
  m.covariance = Eigen::MatrixXd::Zero(n, n);
  if (count == 0) return m;
  // Chunked sums in a fixed order keep the result independent of threading.
  for (Eigen::Index first = 0; first < count; first += static_cast<Eigen::Index>(rng::kChunkSize)) {
    const auto size = std::min<Eigen::Index>(static_cast<Eigen::Index>(rng::kChunkSize), count - first);
    m.mean += data.middleCols(first, size).rowwise().sum();
  }
  m.mean /= static_cast<double>(count);
  for (Eigen::Index first = 0; first < count; first += static_cast<Eigen::Index>(rng::kChunkSize)) {
    const auto size = std::min<Eigen::Index>(static_cast<Eigen::Index>(rng::kChunkSize), count - first);
    const Eigen::MatrixXd centered = data.middleCols(first, size).colwise() - m.mean;
    m.covariance.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  m.covariance = m.covariance.selfadjointView<Eigen::Lower>();
  m.covariance /= static_cast<double>(count);
  return m;
}

SampleBatch whiten(const SampleBatch& batch) {
  validate(batch);
  const auto n = static_cast<std::size_t>(batch.dimension);
  if (batch.count < n + 1)
    throw SingularCovariance("whitening needs at least dimension + 1 samples");
  const Moments m = empirical_moments(batch.data);
  Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all())
    throw SingularCovariance("empirical covariance is not positive definite");
  Eigen::MatrixXd centered = batch.data.colwise() - m.mean;
  llt.matrixL().solveInPlace(centered);
  json source = {{"type", "whitened"}, {"input", batch.source}};
  return SampleBatch::make(std::move(centered), batch.seed, std::move(source));
}

Eigen::VectorXd sample_norms(const BodySpec& spec, std::size_t count, std::uint64_t seed,
                             const StreamOptions& options) {
  validate(spec);
  require_count(count);
  Eigen::VectorXd norms(static_cast<Eigen::Index>(count));
  const auto chunks = static_cast<std::int64_t>(rng::chunk_count(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto chunk = static_cast<std::size_t>(c);
    const auto size = chunk_size(count, chunk);
    Eigen::MatrixXd block = body_chunk(spec, size, seed, chunk);
    add_noise_and_scale(block, options, chunk);
    norms.segment(static_cast<Eigen::Index>(chunk * rng::kChunkSize), static_cast<Eigen::Index>(size)) =
        block.colwise().norm().transpose();
  }
  return norms;
}

SampleBatch sample_projected(const BodySpec& spec, std::size_t count, std::uint64_t seed,
                             const SubspaceBasis& basis, const StreamOptions& options) {
  validate(spec);
  validate(basis);
  require_count(count);
  if (basis.ambient_dim != spec.dimension)
    throw DimensionError("basis ambient dimension does not match the body");
  Eigen::MatrixXd data(basis.subspace_dim, static_cast<Eigen::Index>(count));
  const auto chunks = static_cast<std::int64_t>(rng::chunk_count(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto chunk = static_cast<std::size_t>(c);
    const auto size = chunk_size(count, chunk);
    Eigen::MatrixXd block = body_chunk(spec, size, seed, chunk);
    add_noise_and_scale(block, options, chunk);
    data.middleCols(static_cast<Eigen::Index>(chunk * rng::kChunkSize), static_cast<Eigen::Index>(size)) =
        project_block(block, basis);
  }
  json source = {{"type", "projected"},
                 {"input", describe(spec)},
                 {"noise_variance", options.noise_variance},
                 {"noise_seed", options.noise_seed},
                 {"scale", options.scale},
                 {"subspace_dim", basis.subspace_dim}};
  return SampleBatch::make(std::move(data), seed, std::move(source));
}

} // namespace cltlab
