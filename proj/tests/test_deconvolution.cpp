#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cltlab/deconvolution.hpp"
#include "cltlab/errors.hpp"
#include "oracles.hpp"

using namespace cltlab;

namespace {

UniformGrid gaussian_grid(int dim, double variance, double half_width, double spacing) {
  auto g = UniformGrid::symmetric(dim, half_width, spacing);
  g.fill([&](const Eigen::Vector2d& x) {
    return dim == 1 ? oracle::normal_pdf(x[0], variance) : oracle::normal_pdf(x[0], variance) * oracle::normal_pdf(x[1], variance);
  });
  return g;
}

double sup_error(const UniformGrid& g, double variance) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < g.values.rows(); ++i)
    for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
      const double exact = g.dimension == 1 ? oracle::normal_pdf(g.coordinate(i), variance)
                                            : oracle::normal_pdf(g.coordinate(i), variance) *
                                                  oracle::normal_pdf(g.coordinate(j), variance);
      e = std::max(e, std::abs(g.values(i, j) - exact));
    }
  return e;
}

} // namespace

TEST_CASE("certificate arithmetic") {
  const auto a = check_conditions(DeconvParams::make(2, 1e-12, 0.5, 0.005, 10.0));
  CHECK_FALSE(a.admissible);
  CHECK(a.violated_conditions.size() == 1);
  CHECK(100.0 * std::pow(4.0, 1.5) * std::pow(1e-12, 0.25) == doctest::Approx(0.8));

  const auto b = check_conditions(DeconvParams::make(2, 1e-24, 0.5, 0.005, 10.0, 1e-2));
  CHECK(b.admissible);
  CHECK(b.violated_conditions.empty());
  CHECK(100.0 * std::pow(4.0, 1.5) * std::pow(1e-24, 0.25) == doctest::Approx(8e-4));

  const auto c = check_conditions(DeconvParams::make(8, 1e-30, 0.5, 0.001, 10.0));
  CHECK(c.admissible);
  CHECK(c.lower_radius == 4.0);
  CHECK(c.upper_radius == 1.0);
  CHECK(c.lower_factor == 0.994);
  CHECK(c.upper_factor == 1.008);

  CHECK_FALSE(check_conditions(DeconvParams::make(2, 1e-24, 0.5, 0.01, 10.0)).admissible);
  CHECK_FALSE(check_conditions(DeconvParams::make(2, 1e-3, 0.1, 0.005, 10.0)).admissible);
  CHECK_THROWS_AS(DeconvParams::make(2, 0.0, 0.5, 0.005, 10.0), InvalidSpec);
  CHECK_THROWS_AS(DeconvParams::make(2, 1e-9, 0.5, 0.005, 10.0, 1.0), InvalidSpec);
}

TEST_CASE("certificate is monotone in alpha and epsilon") {
  for (int n : {1, 2, 5}) {
    for (double beta : {0.25, 0.5, 1.0}) {
      bool was_admissible = false;
      for (double alpha = 1.0; alpha > 1e-60; alpha *= 0.1) {
        const bool now = check_conditions(DeconvParams::make(n, alpha, beta, 0.005, 10.0)).admissible;
        CHECK((!was_admissible || now));
        was_admissible = now;
      }
      was_admissible = false;
      for (double eps = 1e-6; eps < 0.01; eps *= 1.5) {
        const bool now = check_conditions(DeconvParams::make(n, 1e-30, beta, eps, 10.0)).admissible;
        CHECK((!was_admissible || now));
        was_admissible = now;
      }
    }
  }
}

TEST_CASE("grid convolution of gaussians") {
  const auto g = gaussian_grid(1, 0.5, 10.0, 0.01);
  CHECK(std::abs(g.mass() - 1.0) <= 1e-12);
  const auto once = grid_convolve(g, 0.1);
  CHECK(sup_error(once, 0.6) <= 1e-6);
  CHECK(std::abs(once.mass() - 1.0) <= 1e-6);
  CHECK(once.values.minCoeff() >= 0.0);
  const auto twice = grid_convolve(once, 0.2);
  CHECK(sup_error(twice, 0.8) <= 2e-6);
  CHECK((twice.values - grid_convolve(g, 0.3).values).cwiseAbs().maxCoeff() <= 2e-6);

  const auto g2 = gaussian_grid(2, 0.5, 7.0, 0.05);
  const auto c2 = grid_convolve(g2, 0.2);
  CHECK(sup_error(c2, 0.7) <= 1e-6);
  CHECK(std::abs(c2.mass() - 1.0) <= 1e-6);
}

TEST_CASE("grid convolution guards and symmetry") {
  const auto g = gaussian_grid(1, 1.0, 8.0, 0.01);
  CHECK_THROWS_AS(grid_convolve(g, 1e-6), GridTooCoarse);
  auto neg = g;
  neg.values(3, 0) = -1e-3;
  CHECK_THROWS_AS(grid_convolve(neg, 0.1), InvalidSpec);
  auto heavy = g;
  heavy.values *= 1.01;
  CHECK_THROWS_AS(grid_convolve(heavy, 0.1), InvalidSpec);

  // Asymmetric-looking but symmetric input: a two-bump mixture.
  auto s = UniformGrid::symmetric(1, 8.0, 0.01);
  s.fill([](const Eigen::Vector2d& x) {
    return 0.5 * oracle::normal_pdf(x[0] - 2.0, 0.3) + 0.5 * oracle::normal_pdf(x[0] + 2.0, 0.3);
  });
  s.values /= s.mass();
  const auto out = grid_convolve(s, 0.05);
  for (Eigen::Index i = 0; i < out.size; ++i)
    CHECK(std::abs(out.values(i, 0) - out.values(out.size - 1 - i, 0)) <= 1e-14);
}

TEST_CASE("closed-form convolutions match quadrature") {
  for (double alpha : {1e-3, 0.05, 0.5}) {
    for (double x : {-3.0, -1.7, -0.4, 0.0, 0.9, 1.7320508, 2.5, 5.0}) {
      const double s = std::sqrt(alpha);
      for (const auto& f : {ClosedFormDensity::uniform(), ClosedFormDensity::laplace(), ClosedFormDensity::gaussian(0.7)}) {
        CAPTURE(f.name());
        CAPTURE(alpha);
        CAPTURE(x);
        // (f * g)(x) = int f(x - y) g(y) dy, g centered normal; split at kinks of f.
        auto integrand = [&](double y) { return f.density(x - y) * oracle::normal_pdf(y, alpha); };
        double q = 0.0;
        std::vector<double> cuts{-37 * s, 37 * s};
        for (double k : {x - std::sqrt(3.0), x, x + std::sqrt(3.0)})
          if (k > -37 * s && k < 37 * s) cuts.push_back(k);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) q += oracle::integrate(integrand, cuts[i], cuts[i + 1], 256);
        CHECK(f.convolved(x, alpha) == doctest::Approx(q).epsilon(1e-9).scale(1e-300));
      }
    }
  }
  // Far tails stay finite and positive.
  CHECK(ClosedFormDensity::laplace().convolved(40.0, 1e-12) > 0.0);
  CHECK(std::isfinite(ClosedFormDensity::laplace().convolved(-40.0, 1e-24)));
  CHECK(ClosedFormDensity::uniform().convolved(0.0, 1e-24) == doctest::Approx(1.0 / (2 * std::sqrt(3.0))));
  CHECK(ClosedFormDensity::gaussian().convolved(0.3, 0.0) == ClosedFormDensity::gaussian().density(0.3));
}

TEST_CASE("sandwich verification") {
  const auto p = DeconvParams::make(1, 1e-24, 0.5, 0.005, 6.0);
  const auto g = verify_sandwich(ClosedFormDensity::gaussian(), p);
  CHECK(g.status == SandwichStatus::Verified);
  CHECK(g.min_lower_margin > 0.0);
  CHECK(g.min_upper_margin > 0.0);
  CHECK(g.hypothesis_deviation <= 1e-12);

  const auto shifted = verify_sandwich(ClosedFormDensity::gaussian(1.0 - p.alpha), p);
  CHECK(shifted.status == SandwichStatus::Verified);

  CHECK(verify_sandwich(ClosedFormDensity::uniform(), p).status == SandwichStatus::HypothesisNotMet);
  CHECK(verify_sandwich(ClosedFormDensity::laplace(), p).status == SandwichStatus::HypothesisNotMet);

  const auto bad = verify_sandwich(ClosedFormDensity::gaussian(), DeconvParams::make(1, 1e-12, 0.5, 0.005, 6.0));
  CHECK(bad.status == SandwichStatus::Inadmissible);
  CHECK_FALSE(bad.certificate.violated_conditions.empty());
  CHECK(bad.points.empty());

  const auto two = verify_sandwich(ClosedFormDensity::gaussian(1.0 + 1e-4), DeconvParams::make(2, 1e-24, 0.5, 0.005, 6.0));
  CHECK(two.status == SandwichStatus::Verified);
  CHECK(two.dimension == 2);
  CHECK_THROWS_AS(verify_sandwich(ClosedFormDensity::gaussian(), DeconvParams::make(3, 1e-30, 0.5, 0.005, 6.0)), DimensionError);
}
