#include <doctest.h>

#include <cmath>

#include "cltlab/errors.hpp"
#include "cltlab/model.hpp"
#include "oracles.hpp"

using namespace cltlab;

TEST_CASE("gaussian spec validation") {
  CHECK_NOTHROW(GaussianSpec::make(3, 1.0));
  CHECK_THROWS_AS(GaussianSpec::make(3, 0.0), InvalidSpec);
  CHECK_THROWS_AS(GaussianSpec::make(0, 1.0), InvalidSpec);
  CHECK_THROWS_AS(GaussianSpec::make(2, -1.0), InvalidSpec);
}

TEST_CASE("body spec validation and names") {
  CHECK_THROWS_AS(BodySpec::make(BodyKind::Cube, 0), InvalidSpec);
  for (BodyKind kind : kAllBodies) CHECK(parse_body_kind(to_string(kind)) == kind);
  CHECK(parse_body_kind("laplace") == BodyKind::ProductLaplace);
  CHECK(parse_body_kind("gaussian") == BodyKind::StandardGaussian);
  CHECK_THROWS_AS(parse_body_kind("torus"), InvalidSpec);
}

TEST_CASE("schedule at alpha = 10 gives lambda = 1/70") {
  const auto s = ConvolutionSchedule::make(10.0, 100);
  CHECK(s.lambda == 1.0 / 70.0);
  CHECK(s.noise_variance == doctest::Approx(0.5179474679).epsilon(1e-10));
  for (int n : {1, 2, 7, 100, 300, 1000, 12345}) {
    const auto t = ConvolutionSchedule::make(10.0, n);
    CHECK(t.noise_variance == doctest::Approx(oracle::high_precision_noise_variance(n, 10.0)).epsilon(1e-15));
    CHECK(t.noise_variance == doctest::Approx(std::pow(n, -1.0 / 7.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(ConvolutionSchedule::make(0.0, 10), InvalidSpec);
  CHECK_THROWS_AS(ConvolutionSchedule::make(1e5, 10), InvalidSpec);

  auto tampered = s;
  tampered.lambda = 0.0143;
  CHECK_THROWS_AS(validate(tampered), InvalidSpec);
}

TEST_CASE("subspace basis invariants") {
  CHECK_NOTHROW(SubspaceBasis::make(Eigen::MatrixXd::Identity(2, 4)));
  Eigen::MatrixXd skew(2, 2);
  skew << 1, 0, 1e-6, 1;
  CHECK_THROWS_AS(SubspaceBasis::make(skew), InvalidSpec);
  CHECK_THROWS_AS(SubspaceBasis::make(Eigen::MatrixXd::Identity(3, 2)), InvalidSpec);
}

TEST_CASE("radial density invariants") {
  CHECK_NOTHROW(RadialDensity::binned({0.0, 1.0, 2.0}, {0.25, 0.75}));
  CHECK_THROWS_AS(RadialDensity::binned({0.0, 1.0, 2.0}, {0.5, 0.6}), InvalidSpec);
  CHECK_THROWS_AS(RadialDensity::binned({0.0, 1.0, 2.0}, {1.1, -0.1}), InvalidSpec);
  CHECK_THROWS_AS(RadialDensity::binned({0.0, 1.0, 1.0}, {0.5, 0.5}), InvalidSpec);
  CHECK_THROWS_AS(RadialDensity::binned({0.0, 1.0}, {0.9}), InvalidSpec);
  CHECK_NOTHROW(RadialDensity::binned({0.0, 1.0}, {1.0 - 5e-7}));
  CHECK_THROWS_AS(RadialDensity::chi(0), InvalidSpec);
}

TEST_CASE("ratio report sup equals max deviation") {
  const auto r = RatioReport::make({0.0, 1.0, 2.0}, {1.01, 0.97, 1.02});
  CHECK(r.sup_abs_deviation == doctest::Approx(0.03));
  auto bad = r;
  bad.sup_abs_deviation = 0.5;
  CHECK_THROWS_AS(validate(bad), InvalidSpec);
}

TEST_CASE("density estimate and certificate invariants") {
  DensityEstimate e;
  e.points = Eigen::MatrixXd::Zero(1, 2);
  e.values = {0.1, -0.1};
  e.std_error = {0.0, 0.0};
  CHECK_THROWS_AS(validate(e), InvalidSpec);

  DeconvCertificate c;
  c.admissible = true;
  c.epsilon = 0.02;
  c.lower_factor = 1 - 6 * c.epsilon;
  c.upper_factor = 1 + 8 * c.epsilon;
  CHECK_THROWS_AS(validate(c), InvalidSpec);
}
