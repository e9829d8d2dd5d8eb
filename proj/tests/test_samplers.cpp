#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cltlab/errors.hpp"
#include "cltlab/grassmann.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/samplers.hpp"
#include "oracles.hpp"

using namespace cltlab;

namespace {

double max_mean(const Moments& m) { return m.mean.cwiseAbs().maxCoeff(); }

double max_cov_dev(const Moments& m) {
  const auto n = m.covariance.rows();
  return (m.covariance - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// Histogram on [-4, 4] with 64 bins, 5-bin moving average, then check that the
// sequence rises then falls up to `slack` counts.
bool unimodal(const Eigen::VectorXd& x, double slack_per_count) {
  std::vector<double> counts(64, 0.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (x[i] + 4.0) / 8.0 * 64.0;
    if (u >= 0.0 && u < 64.0) counts[static_cast<std::size_t>(u)] += 1.0;
  }
  std::vector<double> smooth(64, 0.0);
  for (int i = 0; i < 64; ++i) {
    double s = 0.0;
    int k = 0;
    for (int j = std::max(0, i - 2); j <= std::min(63, i + 2); ++j, ++k) s += counts[static_cast<std::size_t>(j)];
    smooth[static_cast<std::size_t>(i)] = s / k;
  }
  const auto peak = static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  for (std::size_t i = 0; i < 64; ++i) {
    const double tol = slack_per_count * std::sqrt(std::max(smooth[i], 1.0));
    if (i < peak && smooth[i] > smooth[i + 1] + tol) return false;
    if (i > peak && smooth[i] > smooth[i - 1] + tol) return false;
  }
  return true;
}

} // namespace

TEST_CASE("cube coordinate variance") {
  const auto b = sample_body(BodySpec::make(BodyKind::Cube, 1), 1'000'000, 11);
  const auto m = empirical_moments(b.data);
  CHECK(std::abs(m.covariance(0, 0) - 1.0) <= 0.01);
  CHECK(b.data.cwiseAbs().maxCoeff() <= kCubeHalfWidth);
}

TEST_CASE("ball second moment") {
  // E|X|^2 = n R^2 / (n + 2) with R^2 = n + 2; radial oracle int_0^R r^2 n r^(n-1) / R^n dr.
  const int n = 10;
  const double R = std::sqrt(n + 2.0);
  const double oracle_value =
      oracle::integrate([&](double r) { return r * r * n * std::pow(r, n - 1) / std::pow(R, n); }, 0.0, R);
  CHECK(oracle_value == doctest::Approx(10.0).epsilon(1e-12));
  const auto norms = sample_norms(BodySpec::make(BodyKind::Ball, n), 1'000'000, 12);
  CHECK(std::abs(norms.squaredNorm() / 1e6 - oracle_value) <= 0.05);
  CHECK(norms.maxCoeff() <= R);
}

TEST_CASE("simplex whitening matrix maps the raw simplex to isotropy") {
  const int n = 5;
  const Eigen::MatrixXd W = simplex_whitening_matrix(n);
  CHECK(W.rows() == n);
  CHECK(W.cols() == n + 1);
  // Independent raw simplex draws (normalized exponentials), whitened in the test.
  std::mt19937_64 engine(2024);
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd raw(n + 1, 200'000);
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    for (int i = 0; i <= n; ++i) raw(i, j) = e(engine);
    raw.col(j) /= raw.col(j).sum();
  }
  const auto [mean, cov] = oracle::naive_moments(Eigen::MatrixXd(W * raw));
  for (int a = 0; a < n; ++a) {
    CHECK(std::abs(mean[static_cast<std::size_t>(a)]) <= 0.02);
    for (int b = 0; b < n; ++b)
      CHECK(std::abs(cov[static_cast<std::size_t>(a * n + b)] - (a == b ? 1.0 : 0.0)) <= 0.02);
  }
}

TEST_CASE("simplex covariance at n = 5") {
  const auto b = sample_body(BodySpec::make(BodyKind::Simplex, 5), 1'000'000, 13);
  const auto m = empirical_moments(b.data);
  CHECK(max_cov_dev(m) <= 0.02);
  CHECK(max_mean(m) <= 0.01);
}

TEST_CASE("gaussian sampler examples") {
  const auto a = sample_gaussian(GaussianSpec::make(1, 4.0), 1'000'000, 14);
  CHECK(std::abs(empirical_moments(a.data).covariance(0, 0) - 4.0) <= 0.05);

  const auto b = sample_gaussian(GaussianSpec::make(3, 1.0), 1'000'000, 15);
  CHECK(std::abs(b.data.colwise().squaredNorm().mean() - 3.0) <= 0.02);

  const auto c = sample_gaussian(GaussianSpec::make(2, 1.0), 1'000'000, 16);
  const double inside = (c.data.colwise().norm().array() <= 1.0).cast<double>().mean();
  CHECK(std::abs(inside - oracle::chi_square_cdf(2, 1.0)) <= 0.005);
  CHECK(oracle::chi_square_cdf(2, 1.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("isotropy of every body at moderate size") {
  for (BodyKind kind : kAllBodies) {
    for (int n : {2, 10}) {
      CAPTURE(to_string(kind));
      CAPTURE(n);
      const auto m = empirical_moments(sample_body(BodySpec::make(kind, n), 400'000, 17).data);
      CHECK(max_mean(m) <= 0.01);
      CHECK(max_cov_dev(m) <= 0.02);
    }
  }
}

TEST_CASE("determinism is independent of thread count") {
  const auto spec = BodySpec::make(BodyKind::Simplex, 7);
  set_max_threads(1);
  const auto a = sample_body(spec, 20'000, 99);
  set_max_threads(4);
  const auto b = sample_body(spec, 20'000, 99);
  set_max_threads(1);
  CHECK(a == b);
  CHECK(!(a == sample_body(spec, 20'000, 100)));
  // A prefix of a longer run equals the shorter run: chunks own their streams.
  const auto c = sample_body(spec, 30'000, 99);
  CHECK(c.data.leftCols(20'000) == a.data);
}

TEST_CASE("convolve and rescale") {
  const auto x = sample_body(BodySpec::make(BodyKind::Cube, 3), 10'000, 1);
  CHECK(convolve_and_rescale(x, 0.0, 5).data == x.data);
  CHECK_THROWS_AS(convolve_and_rescale(x, -1.0, 5), InvalidSpec);

  const auto g = sample_gaussian(GaussianSpec::make(4, 1.0), 1'000'000, 2);
  const auto z = convolve_and_rescale(g, ConvolutionSchedule::make(10.0, 4), 3);
  const auto m = empirical_moments(z.data);
  CHECK(max_cov_dev(m) <= 0.01);

  const auto s = ConvolutionSchedule::make(10.0, 100);
  CHECK(s.noise_variance == doctest::Approx(0.5179474679).epsilon(1e-9));
  CHECK_THROWS_AS(convolve_and_rescale(g, s, 3), DimensionError);
}

TEST_CASE("convolve and rescale preserves isotropy for a non-gaussian body") {
  const auto x = sample_body(BodySpec::make(BodyKind::ProductLaplace, 6), 1'000'000, 21);
  const auto z = convolve_and_rescale(x, ConvolutionSchedule::make(10.0, 6), 22);
  CHECK(max_cov_dev(empirical_moments(z.data)) <= 0.02);
}

TEST_CASE("whitening") {
  const auto g = sample_gaussian(GaussianSpec::make(4, 1.0), 50'000, 31);
  const auto w = whiten(g);
  const auto m = empirical_moments(w.data);
  CHECK(max_cov_dev(m) <= 1e-10);
  CHECK(max_mean(m) <= 1e-12);

  auto scaled = g;
  scaled.data *= 2.0;
  const auto ws = whiten(scaled);
  CHECK((ws.data - w.data).cwiseAbs().maxCoeff() <= 1e-9);

  const auto few = sample_gaussian(GaussianSpec::make(4, 1.0), 4, 32);
  CHECK_THROWS_AS(whiten(few), SingularCovariance);

  auto flat = g;
  flat.data.row(2).setZero();
  CHECK_THROWS_AS(whiten(flat), SingularCovariance);
}

TEST_CASE("streaming samplers equal the composed batch path bit for bit") {
  const auto spec = BodySpec::make(BodyKind::Ball, 9);
  const std::size_t count = 10'000;
  const auto basis = random_subspace(9, 2, 77);
  StreamOptions opts;
  opts.noise_variance = 0.3;
  opts.scale = 1.0 / std::sqrt(1.3);
  opts.noise_seed = 55;

  const auto x = sample_body(spec, count, 44);
  const auto z = convolve_and_rescale(x, 0.3, 55);
  const Eigen::VectorXd composed_norms = z.data.colwise().norm().transpose();
  CHECK(sample_norms(spec, count, 44, opts) == composed_norms);
  CHECK(sample_projected(spec, count, 44, basis, opts).data == project(z, basis).data);
  CHECK(sample_projected(spec, count, 44, basis).data == project(x, basis).data);
}

TEST_CASE("one-dimensional projections are unimodal") {
  for (BodyKind kind : kAllBodies) {
    CAPTURE(to_string(kind));
    const auto basis = random_subspace(10, 1, 5);
    const auto p = sample_projected(BodySpec::make(kind, 10), 1'000'000, 6, basis);
    CHECK(unimodal(p.data.row(0).transpose(), 3.0));
    const auto c = sample_projected(BodySpec::make(kind, 10), 1'000'000, 6, coordinate_subspace(10, 1));
    CHECK(unimodal(c.data.row(0).transpose(), 3.0));
  }
}

TEST_CASE("sample count must be positive") {
  CHECK_THROWS_AS(sample_body(BodySpec::make(BodyKind::Cube, 2), 0, 1), InvalidSpec);
}
