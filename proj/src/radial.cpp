#include "cltlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cltlab/errors.hpp"

namespace cltlab {

RadialDensity radial_histogram(const SampleBatch& batch, std::size_t bin_count) {
  validate(batch);
  const Eigen::VectorXd norms = batch.data.colwise().norm().transpose();
  return radial_histogram(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())),
                          bin_count);
}

RadialDensity radial_histogram(std::span<const double> norms, std::size_t bin_count) {
  if (norms.empty()) throw EmptyBatch("radial histogram of an empty batch");
  if (bin_count < 1) throw InvalidSpec("radial histogram needs at least one bin");
  if (norms.size() < 10 * bin_count)
    throw InvalidSpec("radial histogram needs count >= 10 * bin_count (count=" + std::to_string(norms.size()) +
                      ", bins=" + std::to_string(bin_count) + ")");
  const double top = *std::max_element(norms.begin(), norms.end());
  // A batch concentrated at the origin still gets a nondegenerate bin.
  const double upper = top > 0.0 ? top : 1.0;
  std::vector<double> edges(bin_count + 1);
  for (std::size_t j = 0; j <= bin_count; ++j) edges[j] = upper * static_cast<double>(j) / bin_count;
  edges.back() = upper;

  std::vector<std::size_t> counts(bin_count, 0);
  const double inv_width = bin_count / upper;
  for (double r : norms) {
    auto j = static_cast<std::size_t>(r * inv_width);
    if (j >= bin_count) j = bin_count - 1;  // r == max lands in the last, closed bin
    ++counts[j];
  }
  std::vector<double> mass(bin_count);
  const double total = static_cast<double>(norms.size());
  for (std::size_t j = 0; j < bin_count; ++j) mass[j] = static_cast<double>(counts[j]) / total;
  // Fold the rounding residue of the division into the last occupied bin:
  // with prefix >= 1/2 both 1 - prefix and prefix + (1 - prefix) are exact,
  // so the sequential sum is exactly one.
  std::size_t last = bin_count - 1;
  while (last > 0 && counts[last] == 0) --last;
  double prefix = 0.0;
  for (std::size_t j = 0; j < last; ++j) prefix += mass[j];
  if (prefix >= 0.5) mass[last] = 1.0 - prefix;
  return RadialDensity::binned(std::move(edges), std::move(mass));
}

RadialDensity discretize_chi(int dof, std::vector<double> edges) {
  if (dof < 1) throw DomainError("chi degrees of freedom must be >= 1");
  if (edges.size() < 2) throw InvalidSpec("discretize_chi needs at least one bin");
  std::vector<double> mass(edges.size() - 1);
  const double half_k = 0.5 * dof;
  auto cdf = [half_k](double r) { return r <= 0.0 ? 0.0 : boost::math::gamma_p(half_k, 0.5 * r * r); };
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
    // Use the upper tail for bins past the median to avoid cancellation.
    const double a = edges[j], b = edges[j + 1];
    const double pa = cdf(a), pb = cdf(b);
    if (pa > 0.5) {
      const double qa = boost::math::gamma_q(half_k, 0.5 * a * a);
      const double qb = boost::math::gamma_q(half_k, 0.5 * b * b);
      mass[j] = std::max(0.0, qa - qb);
    } else {
      mass[j] = std::max(0.0, pb - pa);
    }
  }
  return RadialDensity::binned(std::move(edges), std::move(mass));
}

ShellFraction thin_shell_fraction(const SampleBatch& batch, double epsilon) {
  validate(batch);
  const Eigen::VectorXd norms = batch.data.colwise().norm().transpose();
  return thin_shell_fraction(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())),
                             batch.dimension, epsilon);
}

ShellFraction thin_shell_fraction(std::span<const double> norms, int dimension, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidSpec("thin-shell epsilon must be > 0");
  if (norms.empty()) throw EmptyBatch("thin-shell fraction of an empty batch");
  const double root_n = std::sqrt(static_cast<double>(dimension));
  std::size_t outside = 0;
  for (double r : norms)
    if (std::abs(r / root_n - 1.0) >= epsilon) ++outside;
  ShellFraction result;
  result.count = norms.size();
  result.fraction = static_cast<double>(outside) / static_cast<double>(norms.size());
  result.std_error = std::sqrt(result.fraction * (1.0 - result.fraction) / static_cast<double>(norms.size()));
  return result;
}

TruncatedMoment truncated_moment(const RadialDensity& g, int l, double shell_epsilon, int n) {
  validate(g);
  if (g.form != RadialDensity::Form::Binned) throw DomainError("truncated_moment needs a binned density");
  if (l < 0) throw DomainError("moment order must be >= 0");
  if (!(shell_epsilon > 0.0)) throw DomainError("shell epsilon must be > 0");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double inner = (1.0 - shell_epsilon) * root_n;
  const double outer = (1.0 + shell_epsilon) * root_n;
  const double origin_cut = 1.0 / (static_cast<double>(n) * n);
  TruncatedMoment result;
  for (std::size_t j = 0; j < g.bin_count(); ++j) {
    const double mid = g.midpoint(j);
    if (mid == 0.0) throw DomainError("bin midpoint at the origin");
    if (!(mid < inner || mid > outer) || g.mass[j] == 0.0) continue;
    const double term = std::pow(mid, -l) * g.mass[j];
    if (mid <= origin_cut)
      result.near_origin += term;
    else
      result.far += term;
  }
  return result;
}

} // namespace cltlab
