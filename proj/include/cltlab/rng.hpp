#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cltlab {

// Counter-based stream splitting: every (root seed, stream, index) triple maps
// to an independent engine, so work can be chunked and run on any number of
// threads with bit-identical output.
namespace rng {

using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  Body = 1,
  Gaussian = 2,
  Noise = 3,
  Subspace = 4,
  Experiment = 5,
};

// Samples per chunk; each chunk owns one engine.
inline constexpr std::size_t kChunkSize = 4096;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index);
Engine make_engine(std::uint64_t root, Stream stream, std::uint64_t index);

inline std::size_t chunk_count(std::size_t count) { return (count + kChunkSize - 1) / kChunkSize; }

} // namespace rng

// Caps the number of worker threads (no effect without OpenMP). Results never
// depend on this value.
void set_max_threads(int threads);
int max_threads();

} // namespace cltlab
