#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "cltlab/model.hpp"
#include "cltlab/samplers.hpp"

namespace cltlab {

// Haar-distributed l-dimensional subspace of R^n: the rows are the
// Householder-QR orthonormalization of an l x n standard gaussian matrix,
// signed so that each row has positive inner product with its raw gaussian
// row. Throws DimensionError unless 1 <= l <= n.
SubspaceBasis random_subspace(int ambient_dim, int subspace_dim, std::uint64_t seed);

// First l standard basis vectors of R^n.
SubspaceBasis coordinate_subspace(int ambient_dim, int subspace_dim);

// Coordinates of the orthogonal projection of every sample in the basis rows.
// Throws DimensionError if batch.dimension != basis.ambient_dim.
SampleBatch project(const SampleBatch& batch, const SubspaceBasis& basis);

// Projects one chunk of columns; shared by project() and the streaming
// samplers so both paths produce identical bits.
Eigen::MatrixXd project_block(const Eigen::MatrixXd& block, const SubspaceBasis& basis);

} // namespace cltlab
