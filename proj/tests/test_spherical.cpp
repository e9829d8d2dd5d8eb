#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cltlab/errors.hpp"
#include "cltlab/radial.hpp"
#include "cltlab/samplers.hpp"
#include "cltlab/spherical.hpp"
#include "oracles.hpp"

using namespace cltlab;

namespace {

// Direct evaluation with std::lgamma, no log1p.
double psi_oracle(int n, int l, double r, double t) {
  if (t > r) return 0.0;
  const double log_g = -0.5 * l * std::log(std::numbers::pi) + std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - l));
  return std::exp(log_g - l * std::log(r) + 0.5 * (n - l - 2) * std::log((r - t) * (r + t) / (r * r)));
}

// l-dimensional integral of psi over the ball of radius r, with t = r sin(theta).
double kernel_mass(int n, int l, double r) {
  const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * l) / std::tgamma(0.5 * l);
  const KernelParams p = KernelParams::make(n, l, r);
  return area * oracle::integrate(
                    [&](double theta) {
                      const double t = r * std::sin(theta);
                      return std::pow(t, l - 1) * psi(p, t) * r * std::cos(theta);
                    },
                    0.0, 0.5 * std::numbers::pi, 128);
}

} // namespace

TEST_CASE("Gamma_{n,l}") {
  CHECK(log_gamma_nl(3, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  const double scaled = std::exp(log_gamma_nl(100, 2)) * (2.0 * std::numbers::pi / 100.0);
  CHECK(scaled == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(std::abs(scaled - 1.0) <= 0.05);
  CHECK_THROWS_AS(log_gamma_nl(3, 3), DomainError);
  CHECK_THROWS_AS(log_gamma_nl(3, 0), DomainError);
  for (int n : {5, 17, 200, 1000})
    for (int l : {1, 2, 4})
      CHECK(log_gamma_nl(n, l) ==
            doctest::Approx(-0.5 * l * std::log(std::numbers::pi) + std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - l)))
                .epsilon(1e-12));
}

TEST_CASE("psi on the Archimedes case is constant") {
  const auto p = KernelParams::make(3, 1, 1.0);
  for (double t : {0.0, 0.1, 0.5, 0.9, 0.999999}) CHECK(std::abs(psi(p, t) - 0.5) <= 1e-12);
  CHECK(psi(p, 1.0000001) == 0.0);
}

TEST_CASE("psi vanishes outside the sphere and matches a direct evaluation") {
  for (int n : {4, 10, 64, 200}) {
    for (int l : {1, 2, 3}) {
      const double r = std::sqrt(static_cast<double>(n));
      const auto p = KernelParams::make(n, l, r);
      CHECK(psi(p, 1.01 * r) == 0.0);
      for (double t : {0.0, 0.3, 1.0, 2.5})
        CHECK(psi(p, t) == doctest::Approx(psi_oracle(n, l, r, t)).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(KernelParams::make(3, 3, 1.0), DomainError);
  CHECK_THROWS_AS(KernelParams::make(3, 1, 0.0), DomainError);
}

TEST_CASE("psi at the origin approaches the gaussian") {
  const double ratio = psi(KernelParams::make(100, 1, 10.0), 0.0) / gaussian_density(1, 1.0, 0.0);
  CHECK(std::abs(ratio - 1.0) <= 10.0 / std::sqrt(100.0));
  CHECK(ratio == doctest::Approx(0.992478).epsilon(1e-5));
}

TEST_CASE("psi scaling in log space") {
  for (int n : {5, 50, 300})
    for (int l : {1, 3})
      for (double r : {0.3, 2.0, 17.0})
        for (double u : {0.0, 0.2, 0.7}) {
          const double lhs = log_psi(KernelParams::make(n, l, r), u * r);
          const double rhs = -l * std::log(r) + log_psi(KernelParams::make(n, l, 1.0), u);
          CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
}

TEST_CASE("kernel normalization") {
  for (int n : {2, 3, 4, 6, 10, 25, 50, 100, 200}) {
    for (int l = 1; l <= 5 && l < n; ++l) {
      for (double r : {0.5, 1.0, std::sqrt(static_cast<double>(n))}) {
        CAPTURE(n);
        CAPTURE(l);
        CAPTURE(r);
        CHECK(std::abs(kernel_mass(n, l, r) - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("gaussian density values") {
  CHECK(gaussian_density(2, 1.0, 0.0) == doctest::Approx(0.15915494309189535).epsilon(1e-15));
  CHECK(gaussian_density(1, 1.0, 1.0) == doctest::Approx(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(gaussian_density(3, 2.0, 0.0) == doctest::Approx(std::pow(4 * std::numbers::pi, -1.5)).epsilon(1e-15));
  CHECK_THROWS_AS(gaussian_density(1, 0.0, 0.0), DomainError);
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
}

TEST_CASE("radial mixture of a single bin is the kernel at the midpoint") {
  const auto g = RadialDensity::binned({2.9, 3.1}, {1.0});
  for (double t : {0.0, 1.0, 2.0})
    CHECK(radial_mixture_marginal(g, 10, 2, t) == doctest::Approx(psi(KernelParams::make(10, 2, 3.0), t)).epsilon(1e-14));
  CHECK_THROWS_AS(radial_mixture_marginal(g, 10, 10, 0.0), DomainError);
}

TEST_CASE("chi mixture reproduces the gaussian") {
  for (int n : {16, 64, 256})
    for (int l : {1, 2, 3})
      for (double t = 0.0; t <= 3.0 + 1e-12; t += 0.25) {
        const double got = radial_mixture_marginal(RadialDensity::chi(n), n, l, t);
        CHECK(std::abs(got / oracle::gaussian_pdf(l, t) - 1.0) <= 1e-3);
      }
  CHECK_THROWS_AS(radial_mixture_marginal(RadialDensity::chi(10), 12, 1, 0.0), DomainError);
}

TEST_CASE("histogram mixture reproduces the gaussian within Monte Carlo error") {
  const int n = 64;
  const Eigen::VectorXd norms = sample_norms(BodySpec::make(BodyKind::StandardGaussian, n), 1'000'000, 3);
  const auto g = radial_histogram(std::span<const double>(norms.data(), static_cast<std::size_t>(norms.size())), 400);
  for (int l : {1, 2})
    for (double t = 0.0; t <= 3.0 + 1e-12; t += 0.25)
      CHECK(std::abs(radial_mixture_marginal(g, n, l, t) / oracle::gaussian_pdf(l, t) - 1.0) <= 0.02);
}

TEST_CASE("ratio scan") {
  const auto r = psi_gaussian_ratio_scan(100, 1, 1.77, 1771);
  CHECK(r.sup_abs_deviation <= 10.0 / std::sqrt(100.0));
  CHECK(r.sup_abs_deviation == doctest::Approx(0.01529372).epsilon(1e-4));
  CHECK(r.radius_grid.front() == 0.0);
  CHECK(r.radius_grid.back() == doctest::Approx(1.77));
  CHECK_THROWS_AS(psi_gaussian_ratio_scan(100, 1, std::pow(100.0, 0.125), 10), RangeError);
  CHECK_THROWS_AS(psi_gaussian_ratio_scan(100, 1, 1.0, 1), RangeError);

  // The n=400 / n=100 sup ratio is near 1/4, not 1/2: the leading term of
  // the deviation decays like 1/n on this window.
  const auto r400 = psi_gaussian_ratio_scan(400, 1, std::pow(400.0, 0.125) * 0.999, 4001);
  const auto r100 = psi_gaussian_ratio_scan(100, 1, std::pow(100.0, 0.125) * 0.999, 4001);
  CHECK(r400.sup_abs_deviation / r100.sup_abs_deviation == doctest::Approx(0.246).epsilon(0.01));

  const auto small = psi_gaussian_ratio_scan(3, 1, 0.99, 50);
  for (double v : small.per_point_ratios) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}
