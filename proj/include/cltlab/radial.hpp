#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "cltlab/model.hpp"
#include "cltlab/samplers.hpp"

namespace cltlab {

// Histogram of |x| over equal-width bins spanning [0, max |x_i|]; mass is the
// fraction of samples per bin. Requires count >= 10 * bin_count.
RadialDensity radial_histogram(const SampleBatch& batch, std::size_t bin_count);
RadialDensity radial_histogram(std::span<const double> norms, std::size_t bin_count);

// Exact bin masses of the chi(dof) law on the given edges. The far tail beyond
// the last edge is dropped, so total mass may fall short of 1 by the tail.
RadialDensity discretize_chi(int dof, std::vector<double> edges);

struct ShellFraction {
  double fraction = 0.0;  // share of samples with ||x|/sqrt(n) - 1| >= epsilon
  double std_error = 0.0; // binomial standard error sqrt(p(1-p)/N)
  std::size_t count = 0;
};

ShellFraction thin_shell_fraction(const SampleBatch& batch, double epsilon);
ShellFraction thin_shell_fraction(std::span<const double> norms, int dimension, double epsilon);

// Mass-weighted t^-l moment of g over U = {t < (1-eps) sqrt n} u {t > (1+eps) sqrt n},
// using bin midpoints. The part from bins with midpoint in [0, 1/n^2] is
// reported separately from the rest.
struct TruncatedMoment {
  double near_origin = 0.0;  // midpoints in [0, 1/n^2]
  double far = 0.0;          // remaining bins in U
  double total() const { return near_origin + far; }
};

TruncatedMoment truncated_moment(const RadialDensity& g, int l, double shell_epsilon, int n);

} // namespace cltlab
