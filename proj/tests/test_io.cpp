#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cltlab/grassmann.hpp"
#include "cltlab/io.hpp"
#include "cltlab/errors.hpp"

using namespace cltlab;

namespace {

template <class T>
T round_trip(const T& value) {
  return json::parse(dump_json(json(value))).get<T>();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cltlab_test_" + name);
}

} // namespace

TEST_CASE("model types round trip bit-exactly") {
  std::mt19937_64 engine(5);
  std::uniform_real_distribution<double> u(1e-3, 1e3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 7;
    const auto body = BodySpec::make(kAllBodies[trial % 5], n);
    CHECK(round_trip(body) == body);
    const auto g = GaussianSpec::make(n, u(engine));
    CHECK(round_trip(g) == g);
    const auto s = ConvolutionSchedule::make(u(engine) / 10.0, n + 10);
    CHECK(round_trip(s) == s);
    const auto b = random_subspace(n + 3, 1 + trial % 3, static_cast<std::uint64_t>(trial));
    CHECK(round_trip(b) == b);
    const auto k = KernelParams::make(n + 2, 1, u(engine));
    const auto k2 = round_trip(k);
    CHECK(k2.n == k.n);
    CHECK(k2.l == k.l);
    CHECK(k2.r == k.r);
    const auto p = DeconvParams::make(n, 1e-20 * u(engine), 0.5, 0.005, 10.0, 0.02);
    CHECK(round_trip(p) == p);
    const auto c = check_conditions(p);
    CHECK(round_trip(c) == c);
  }

  std::vector<double> mass(7, 1.0 / 7.0);
  double residue = 1.0;
  for (double m : mass) residue -= m;
  mass[0] += residue;
  const auto hist = RadialDensity::binned({0.0, 0.1, 0.3, 0.35, 1.0, 2.0, 2.5, 3.0 / 0.7}, mass);
  CHECK(round_trip(hist) == hist);
  const auto chi = RadialDensity::chi(9);
  CHECK(round_trip(chi) == chi);

  DensityEstimate e;
  e.points = Eigen::MatrixXd::Random(2, 4);
  e.values = {0.1, 0.2, 1.0 / 3.0, 0.0};
  e.std_error = {1e-3, 2e-3, 1e-17, 0.0};
  e.sample_count = 123456789012;
  e.bandwidth = 0.1234567890123;
  CHECK(round_trip(e) == e);

  const auto r = RatioReport::make({0.0, 0.5, 1.0 / 3.0}, {1.0, 0.99, 1.0 + 1e-15});
  CHECK(round_trip(r) == r);

  const auto kc = KdeConfig::radial({0.0, 0.5}, 6, BandwidthRule::Fixed, 0.25);
  const auto kc2 = round_trip(kc);
  CHECK(kc2.radii == kc.radii);
  CHECK(kc2.directions == 6);
  CHECK(kc2.bandwidth == 0.25);
  CHECK(kc2.rule == BandwidthRule::Fixed);
}

TEST_CASE("deserialization validates") {
  CHECK_THROWS_AS(json::parse(R"({"dimension": 3, "variance": 0})").get<GaussianSpec>(), InvalidSpec);
  CHECK_THROWS_AS(json::parse(R"({"dimension": 3})").get<GaussianSpec>(), FormatError);
  CHECK_THROWS_AS(json::parse(R"({"kind": "torus", "dimension": 3})").get<BodySpec>(), InvalidSpec);
  CHECK_THROWS_AS(json::parse(R"({"ambient_dim": 2, "subspace_dim": 1, "rows": [[1.0, 1.0]]})").get<SubspaceBasis>(),
                  InvalidSpec);
  CHECK_THROWS_AS(json::parse(R"({"form": "binned", "edges": [0, 1], "mass": [0.5]})").get<RadialDensity>(), InvalidSpec);
  CHECK(json(BodyKind::ProductLaplace) == "product_laplace");
}

TEST_CASE("reports carry the schema version") {
  const auto rep = make_report("test", {{"seed", 1}}, {{"x", 1}});
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["config"]["seed"] == 1);
  CHECK(dump_json(rep).back() == '\n');
}

TEST_CASE("batch files round trip") {
  const auto batch = sample_body(BodySpec::make(BodyKind::Simplex, 3), 1000, 8);
  const auto bin = temp_path("batch.bin");
  write_batch(bin, batch, BatchFormat::Bin, {{"seed", 8}});
  const auto back = read_batch(bin);
  CHECK(back == batch);
  CHECK(std::filesystem::file_size(bin) == 3 * 1000 * sizeof(double));
  std::ifstream sidecar(bin.string() + ".json");
  const auto meta = json::parse(sidecar);
  CHECK(meta["dimension"] == 3);
  CHECK(meta["config"]["seed"] == 8);

  const auto csv = temp_path("batch.csv");
  write_batch(csv, batch, BatchFormat::Csv, {{"seed", 8}});
  const auto from_csv = read_batch(csv);
  CHECK(from_csv.data == batch.data);
  CHECK(from_csv.dimension == 3);
  std::filesystem::remove(bin);
  std::filesystem::remove(bin.string() + ".json");
  std::filesystem::remove(csv);

  CHECK(parse_batch_format("bin") == BatchFormat::Bin);
  CHECK_THROWS_AS(parse_batch_format("parquet"), InvalidSpec);
}
