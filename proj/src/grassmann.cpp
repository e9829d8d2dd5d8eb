#include "cltlab/grassmann.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "cltlab/errors.hpp"
#include "cltlab/rng.hpp"

namespace cltlab {

SubspaceBasis random_subspace(int ambient_dim, int subspace_dim, std::uint64_t seed) {
  if (subspace_dim < 1 || subspace_dim > ambient_dim)
    throw DimensionError("subspace dimension must satisfy 1 <= l <= n (got l=" +
                         std::to_string(subspace_dim) + ", n=" + std::to_string(ambient_dim) + ")");
  auto engine = rng::make_engine(seed, rng::Stream::Subspace, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Raw gaussian rows, filled row by row.
  Eigen::MatrixXd raw(subspace_dim, ambient_dim);
  for (int i = 0; i < subspace_dim; ++i)
    for (int j = 0; j < ambient_dim; ++j) raw(i, j) = normal(engine);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw.transpose());
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, subspace_dim);
  // <raw_i, q_i> = R_ii; flip columns so every diagonal entry is positive.
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (int i = 0; i < subspace_dim; ++i)
    if (packed(i, i) < 0.0) q.col(i) = -q.col(i);
  return SubspaceBasis::make(q.transpose());
}

SubspaceBasis coordinate_subspace(int ambient_dim, int subspace_dim) {
  if (subspace_dim < 1 || subspace_dim > ambient_dim)
    throw DimensionError("subspace dimension must satisfy 1 <= l <= n");
  return SubspaceBasis::make(Eigen::MatrixXd::Identity(subspace_dim, ambient_dim));
}

Eigen::MatrixXd project_block(const Eigen::MatrixXd& block, const SubspaceBasis& basis) {
  return basis.rows * block;
}

SampleBatch project(const SampleBatch& batch, const SubspaceBasis& basis) {
  validate(batch);
  if (batch.dimension != basis.ambient_dim)
    throw DimensionError("batch dimension " + std::to_string(batch.dimension) +
                         " does not match basis ambient dimension " + std::to_string(basis.ambient_dim));
  Eigen::MatrixXd out(basis.subspace_dim, static_cast<Eigen::Index>(batch.count));
  const auto count = static_cast<Eigen::Index>(batch.count);
  const auto chunk = static_cast<Eigen::Index>(rng::kChunkSize);
  const auto chunks = static_cast<std::int64_t>(rng::chunk_count(batch.count));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto first = static_cast<Eigen::Index>(c) * chunk;
    const auto size = std::min(chunk, count - first);
    out.middleCols(first, size) = project_block(batch.data.middleCols(first, size), basis);
  }
  nlohmann::json source = {{"type", "projected"}, {"input", batch.source}, {"subspace_dim", basis.subspace_dim}};
  return SampleBatch::make(std::move(out), batch.seed, std::move(source));
}

} // namespace cltlab
