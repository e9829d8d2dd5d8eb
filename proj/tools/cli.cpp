#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "cltlab/deconvolution.hpp"
#include "cltlab/density.hpp"
#include "cltlab/errors.hpp"
#include "cltlab/grassmann.hpp"
#include "cltlab/io.hpp"
#include "cltlab/radial.hpp"
#include "cltlab/rng.hpp"
#include "cltlab/samplers.hpp"
#include "cltlab/spherical.hpp"

namespace cltlab::cli {

namespace {

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

// Writes to a file when a path is given, otherwise to the fallback stream.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw FormatError("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_json(const std::string& path, std::ostream& fallback, const json& report) {
  Sink sink(path, fallback);
  *sink << dump_json(report);
}

void csv_header(std::ostream& os, const json& config) { os << "# config: " << config.dump() << '\n'; }

std::optional<ConvolutionSchedule> schedule_for(double alpha, int n) {
  if (alpha <= 0.0) return std::nullopt;
  return ConvolutionSchedule::make(alpha, n);
}

Eigen::MatrixXd line_points(double half_width, int count) {
  Eigen::MatrixXd p(1, count);
  for (int i = 0; i < count; ++i) p(0, i) = -half_width + 2.0 * half_width * i / (count - 1);
  return p;
}

std::vector<double> radius_steps(double max_radius, double step) {
  std::vector<double> radii;
  for (int i = 0; i * step <= max_radius + 1e-12; ++i) radii.push_back(i * step);
  return radii;
}

struct SampleArgs {
  std::string body = "cube";
  int n = 10;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  std::string format = "bin";
  std::string output;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const BodySpec spec = BodySpec::make(parse_body_kind(a.body), a.n);
  const BatchFormat format = parse_batch_format(a.format);
  const auto schedule = schedule_for(a.alpha, a.n);
  const json config = {{"command", "sample"}, {"body", to_string(spec.kind)}, {"n", a.n},
                       {"samples", a.samples}, {"seed", a.seed},  {"alpha", a.alpha},
                       {"format", a.format},   {"output", a.output}};
  SampleBatch batch = sample_body(spec, a.samples, a.seed);
  if (schedule) batch = convolve_and_rescale(batch, *schedule, a.seed);
  write_batch(a.output, batch, format, config);
  const double mean_sq = batch.data.colwise().squaredNorm().mean() / a.n;
  json result = {{"path", a.output},
                 {"dimension", batch.dimension},
                 {"count", batch.count},
                 {"noise_variance", schedule ? schedule->noise_variance : 0.0},
                 {"mean_squared_norm_over_n", mean_sq}};
  write_json("", out, make_report("sample", config, std::move(result)));
  return kExitOk;
}

struct ProjectArgs {
  std::string input;
  int l = 1;
  std::uint64_t seed = 0;
  std::string format = "bin";
  std::string output;
};

int cmd_project(const ProjectArgs& a, std::ostream& out) {
  const json config = {{"command", "project"}, {"input", a.input}, {"l", a.l},
                       {"seed", a.seed},       {"format", a.format}, {"output", a.output}};
  const BatchFormat format = parse_batch_format(a.format);
  const SampleBatch batch = read_batch(a.input);
  const SubspaceBasis basis = random_subspace(batch.dimension, a.l, a.seed);
  const SampleBatch projected = project(batch, basis);
  write_batch(a.output, projected, format, config);
  json result = {{"path", a.output}, {"dimension", projected.dimension}, {"count", projected.count},
                 {"basis", basis}};
  write_json("", out, make_report("project", config, std::move(result)));
  return kExitOk;
}

struct RatioArgs {
  std::string body = "cube";
  int n = 300;
  int l = 1;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  double max_radius = 2.0;
  double alpha = 0.0;
  int points = 41;
  double radius_step = 0.25;
  int directions = 8;
  std::string output;
  std::string csv;
};

int cmd_ratio(const RatioArgs& a, std::ostream& out) {
  const BodySpec spec = BodySpec::make(parse_body_kind(a.body), a.n);
  if (a.l < 1 || a.l > kMaxKdeDimension) throw DimensionTooHigh("ratio supports 1 <= l <= 3");
  if (a.points < 2) throw InvalidSpec("--points must be >= 2");
  const auto schedule = schedule_for(a.alpha, a.n);
  const double v = schedule ? schedule->noise_variance : 0.0;
  const json config = {{"command", "ratio"},     {"body", to_string(spec.kind)}, {"n", a.n},
                       {"l", a.l},               {"samples", a.samples},         {"seed", a.seed},
                       {"max_radius", a.max_radius}, {"convolve", a.alpha},      {"points", a.points},
                       {"radius_step", a.radius_step}, {"directions", a.directions}, {"output", a.output},
                       {"csv", a.csv}};
  const MTildeSeeds seeds = m_tilde_seeds(a.seed, 0);
  const SubspaceBasis basis = random_subspace(a.n, a.l, seeds.basis);
  const SampleBatch projected = sample_projected(spec, a.samples, seeds.samples, basis, {v, 1.0, seeds.noise});
  const KdeConfig kde = a.l == 1 ? KdeConfig::at_points(line_points(a.max_radius, a.points))
                                 : KdeConfig::radial(radius_steps(a.max_radius, a.radius_step), a.directions);
  const DensityEstimate estimate = estimate_density(projected, kde);
  const double reference = 1.0 + v;
  const RatioReport ratio = ratio_to_gaussian(estimate, reference, a.max_radius);

  json result = {{"ratio_report", ratio},        {"reference_variance", reference},
                 {"noise_variance", v},          {"bandwidth", estimate.bandwidth},
                 {"sample_count", estimate.sample_count}, {"basis", basis}};
  write_json(a.output, out, make_report("ratio", config, std::move(result)));

  if (!a.csv.empty()) {
    Sink sink(a.csv, out);
    csv_header(*sink, config);
    for (int c = 0; c < a.l; ++c) *sink << 'x' << c << ',';
    *sink << "ratio,stderr\n";
    for (Eigen::Index j = 0; j < estimate.points.cols(); ++j) {
      const double radius = estimate.points.col(j).norm();
      if (radius > a.max_radius) continue;
      const double g = gaussian_density(a.l, reference, radius);
      const auto k = static_cast<std::size_t>(j);
      for (int c = 0; c < a.l; ++c) *sink << num(estimate.points(c, j)) << ',';
      *sink << num(estimate.values[k] / g) << ',' << num(estimate.std_error[k] / g) << '\n';
    }
  }
  return kExitOk;
}

struct ThinShellArgs {
  std::string body = "cube";
  int n = 100;
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  std::vector<double> epsilon;
  double alpha = 0.0;
  std::string output;
};

int cmd_thinshell(ThinShellArgs a, std::ostream& out) {
  const BodySpec spec = BodySpec::make(parse_body_kind(a.body), a.n);
  if (a.epsilon.empty()) a.epsilon.push_back(std::pow(static_cast<double>(a.n), -1.0 / 15.0));
  const auto schedule = schedule_for(a.alpha, a.n);
  const json config = {{"command", "thinshell"}, {"body", to_string(spec.kind)}, {"n", a.n},
                       {"samples", a.samples},   {"seed", a.seed},  {"epsilon", a.epsilon},
                       {"alpha", a.alpha},       {"output", a.output}};
  StreamOptions options;
  if (schedule) options = {schedule->noise_variance, 1.0 / std::sqrt(1.0 + schedule->noise_variance), a.seed};
  const Eigen::VectorXd norms = sample_norms(spec, a.samples, a.seed, options);
  const std::span<const double> view(norms.data(), static_cast<std::size_t>(norms.size()));
  Sink sink(a.output, out);
  csv_header(*sink, config);
  *sink << "epsilon,fraction,stderr\n";
  for (double eps : a.epsilon) {
    const ShellFraction f = thin_shell_fraction(view, a.n, eps);
    *sink << num(eps) << ',' << num(f.fraction) << ',' << num(f.std_error) << '\n';
  }
  return kExitOk;
}

struct PsiScanArgs {
  int n = 100;
  int l = 1;
  double tmax = 1.7;
  int points = 101;
  std::string output;
};

int cmd_psi_scan(const PsiScanArgs& a, std::ostream& out) {
  const json config = {{"command", "psi-scan"}, {"n", a.n}, {"l", a.l}, {"tmax", a.tmax},
                       {"points", a.points},    {"output", a.output}};
  const RatioReport report = psi_gaussian_ratio_scan(a.n, a.l, a.tmax, a.points);
  const KernelParams params = KernelParams::make(a.n, a.l, std::sqrt(static_cast<double>(a.n)));
  Sink sink(a.output, out);
  csv_header(*sink, config);
  *sink << "# sup_abs_deviation: " << num(report.sup_abs_deviation) << '\n';
  *sink << "t,psi,gaussian,ratio\n";
  for (std::size_t i = 0; i < report.radius_grid.size(); ++i) {
    const double t = report.radius_grid[i];
    *sink << num(t) << ',' << num(psi(params, t)) << ',' << num(gaussian_density(a.l, 1.0, t)) << ','
          << num(report.per_point_ratios[i]) << '\n';
  }
  return kExitOk;
}

struct MTildeArgs {
  std::string body = "cube";
  int n = 200;
  int l = 2;
  std::vector<double> radii;
  int subspaces = 32;
  std::size_t samples = 250000;
  std::uint64_t seed = 0;
  int directions = 8;
  double alpha = 0.0;
  std::string output;
};

int cmd_mtilde(MTildeArgs a, std::ostream& out) {
  const BodySpec spec = BodySpec::make(parse_body_kind(a.body), a.n);
  if (a.radii.empty()) a.radii = radius_steps(2.0, 0.25);
  const auto schedule = schedule_for(a.alpha, a.n);
  const json config = {{"command", "mtilde"},      {"body", to_string(spec.kind)}, {"n", a.n},
                       {"l", a.l},                 {"radii", a.radii},              {"subspaces", a.subspaces},
                       {"samples", a.samples},     {"seed", a.seed},                {"directions", a.directions},
                       {"alpha", a.alpha},         {"output", a.output}};
  const MTildeProfile profile =
      m_tilde_profile(spec, schedule, a.l, a.radii, a.subspaces, a.samples, a.seed, a.directions);
  write_json(a.output, out, make_report("mtilde", config, json(profile)));
  return kExitOk;
}

struct DeconvArgs {
  int n = 2;
  double alpha = 1e-24;
  double beta = 0.5;
  double epsilon = 0.005;
  double R = 10.0;
  double c0 = 1e-2;
  std::string output;
};

json deconv_config(const char* command, const DeconvArgs& a) {
  return {{"command", command}, {"n", a.n},   {"alpha", a.alpha}, {"beta", a.beta},
          {"epsilon", a.epsilon}, {"R", a.R}, {"c0", a.c0},       {"output", a.output}};
}

int cmd_deconv(const DeconvArgs& a, std::ostream& out) {
  const DeconvParams params = DeconvParams::make(a.n, a.alpha, a.beta, a.epsilon, a.R, a.c0);
  write_json(a.output, out, make_report("deconv", deconv_config("deconv", a), json(check_conditions(params))));
  return kExitOk;
}

struct VerifyArgs {
  DeconvArgs params;
  std::string density = "gaussian";
  double variance = 1.0;
  double spacing = 0.0;
};

int cmd_deconv_verify(const VerifyArgs& a, std::ostream& out) {
  const DeconvParams params =
      DeconvParams::make(a.params.n, a.params.alpha, a.params.beta, a.params.epsilon, a.params.R, a.params.c0);
  const ClosedFormDensity body = parse_closed_form(a.density, a.variance);
  json config = deconv_config("deconv-verify", a.params);
  config["density"] = a.density;
  config["variance"] = a.variance;
  config["spacing"] = a.spacing;
  const SandwichReport report = verify_sandwich(body, params, a.spacing);

  Sink sink(a.params.output, out);
  csv_header(*sink, config);
  *sink << "# result: " << json(report).dump() << '\n';
  *sink << (params.n == 1 ? "x0" : "x0,x1") << ",radius,density,gaussian,lower_margin,upper_margin\n";
  for (const SandwichPoint& p : report.points) {
    *sink << num(p.x[0]) << ',';
    if (params.n == 2) *sink << num(p.x[1]) << ',';
    *sink << num(p.radius) << ',' << num(p.density) << ',' << num(p.gaussian) << ','
          << (p.in_lower_region ? num(p.lower_margin) : "") << ','
          << (p.in_upper_region ? num(p.upper_margin) : "") << '\n';
  }
  return kExitOk;
}

struct SuiteArgs {
  std::string profile = "desk";
  std::vector<int> only;
  std::string output;
};

int cmd_suite(const SuiteArgs& a, std::ostream& out) {
  if (a.profile != "desk") throw InvalidSpec("unknown suite profile '" + a.profile + "' (expected desk)");
  const auto results = acceptance::run(a.only, out);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  out << passed << "/" << results.size() << " criteria passed\n";
  if (!a.output.empty()) {
    json config = {{"command", "suite"}, {"profile", a.profile}, {"only", a.only}};
    write_json(a.output, out, make_report("suite", config, acceptance::to_json(results)));
  }
  return passed == results.size() ? kExitOk : kExitSuiteFailed;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cltlab: pointwise CLT laboratory for isotropic log-concave measures"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags take precedence");
  int threads = 0;
  app.add_option("--threads", threads, "Maximum worker threads (results do not depend on it)")
      ->check(CLI::NonNegativeNumber);

  auto seed_option = [](CLI::App* sub, std::uint64_t& seed) {
    sub->add_option("--seed", seed, "Root seed")->required();
  };
  const auto bodies = CLI::IsMember({"cube", "ball", "simplex", "product_laplace", "laplace",
                                     "standard_gaussian", "gaussian"});

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Sample a catalog body (optionally convolved and rescaled)");
  s->add_option("--body", sample.body, "Body kind")->check(bodies)->capture_default_str();
  s->add_option("--n", sample.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  s->add_option("--samples", sample.samples, "Sample count")->check(CLI::PositiveNumber)->capture_default_str();
  seed_option(s, sample.seed);
  s->add_option("--alpha", sample.alpha, "Convolution schedule alpha (0 = none)")->capture_default_str();
  s->add_option("--format", sample.format, "Batch format")->check(CLI::IsMember({"bin", "csv"}))->capture_default_str();
  s->add_option("--output", sample.output, "Batch path")->required();

  ProjectArgs proj;
  auto* p = app.add_subcommand("project", "Project a stored batch onto a Haar-random subspace");
  p->add_option("--input", proj.input, "Batch path")->required();
  p->add_option("--l", proj.l, "Subspace dimension")->check(CLI::PositiveNumber)->capture_default_str();
  seed_option(p, proj.seed);
  p->add_option("--format", proj.format, "Batch format")->check(CLI::IsMember({"bin", "csv"}))->capture_default_str();
  p->add_option("--output", proj.output, "Projected batch path")->required();

  RatioArgs ratio;
  auto* r = app.add_subcommand("ratio", "Pointwise density ratio of a projected body to the gaussian");
  r->add_option("--body", ratio.body, "Body kind")->check(bodies)->capture_default_str();
  r->add_option("--n", ratio.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--l", ratio.l, "Subspace dimension (<= 3)")->check(CLI::Range(1, 3))->capture_default_str();
  r->add_option("--samples", ratio.samples, "Sample count")->check(CLI::PositiveNumber)->capture_default_str();
  seed_option(r, ratio.seed);
  r->add_option("--max-radius", ratio.max_radius, "Evaluation radius")->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--convolve", ratio.alpha, "Add gaussian noise with the schedule of this alpha (0 = none)")
      ->capture_default_str();
  r->add_option("--points", ratio.points, "Grid points on [-R, R] for l = 1")->capture_default_str();
  r->add_option("--radius-step", ratio.radius_step, "Radial grid step for l >= 2")
      ->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--directions", ratio.directions, "Directions per radius for l >= 2")
      ->check(CLI::PositiveNumber)->capture_default_str();
  r->add_option("--output", ratio.output, "JSON report path (default stdout)");
  r->add_option("--csv", ratio.csv, "Per-point CSV path");

  ThinShellArgs shell;
  auto* t = app.add_subcommand("thinshell", "Fraction of samples outside the thin shell");
  t->add_option("--body", shell.body, "Body kind")->check(bodies)->capture_default_str();
  t->add_option("--n", shell.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--samples", shell.samples, "Sample count")->check(CLI::PositiveNumber)->capture_default_str();
  seed_option(t, shell.seed);
  t->add_option("--epsilon", shell.epsilon, "Shell half-widths (default n^(-1/15))")->check(CLI::PositiveNumber);
  t->add_option("--alpha", shell.alpha, "Convolution schedule alpha (0 = none)")->capture_default_str();
  t->add_option("--output", shell.output, "CSV path (default stdout)");

  PsiScanArgs scan;
  auto* k = app.add_subcommand("psi-scan", "psi_{n,l,sqrt n} / gamma_l on [0, tmax]");
  k->add_option("--n", scan.n, "Ambient dimension")->capture_default_str();
  k->add_option("--l", scan.l, "Marginal dimension")->capture_default_str();
  k->add_option("--tmax", scan.tmax, "Upper end of the grid (< n^(1/8))")->capture_default_str();
  k->add_option("--points", scan.points, "Grid points")->capture_default_str();
  k->add_option("--output", scan.output, "CSV path (default stdout)");

  MTildeArgs mt;
  auto* m = app.add_subcommand("mtilde", "Subspace-averaged radial ratio profile");
  m->add_option("--body", mt.body, "Body kind")->check(bodies)->capture_default_str();
  m->add_option("--n", mt.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--l", mt.l, "Subspace dimension (<= 3)")->check(CLI::Range(1, 3))->capture_default_str();
  m->add_option("--radii", mt.radii, "Radii (default 0, 0.25, ..., 2)");
  m->add_option("--subspaces", mt.subspaces, "Number of random subspaces")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--samples", mt.samples, "Samples per subspace")->check(CLI::PositiveNumber)->capture_default_str();
  seed_option(m, mt.seed);
  m->add_option("--directions", mt.directions, "Directions per radius")->check(CLI::PositiveNumber)->capture_default_str();
  m->add_option("--alpha", mt.alpha, "Convolution schedule alpha (0 = none)")->capture_default_str();
  m->add_option("--output", mt.output, "JSON report path (default stdout)");

  auto deconv_options = [](CLI::App* sub, DeconvArgs& d) {
    sub->add_option("--n", d.n, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--alpha", d.alpha, "Noise variance")->capture_default_str();
    sub->add_option("--beta", d.beta, "Radius exponent")->capture_default_str();
    sub->add_option("--epsilon", d.epsilon, "Closeness of f * gamma[alpha] to the gaussian")->capture_default_str();
    sub->add_option("--R", d.R, "Radius of the hypothesis")->capture_default_str();
    sub->add_option("--c0", d.c0, "Universal constant c0")->capture_default_str();
    sub->add_option("--output", d.output, "Output path (default stdout)");
  };
  DeconvArgs deconv;
  auto* d = app.add_subcommand("deconv", "Deconvolution certificate");
  deconv_options(d, deconv);

  VerifyArgs verify;
  verify.params.n = 1;
  verify.params.R = 6.0;
  auto* v = app.add_subcommand("deconv-verify", "Check the deconvolution sandwich for a closed-form density");
  deconv_options(v, verify.params);
  v->add_option("--density", verify.density, "Density")->check(CLI::IsMember({"gaussian", "uniform", "laplace"}))
      ->capture_default_str();
  v->add_option("--variance", verify.variance, "Variance of the gaussian density")->capture_default_str();
  v->add_option("--spacing", verify.spacing, "Grid spacing (0 = default)")->capture_default_str();

  SuiteArgs suite;
  auto* q = app.add_subcommand("suite", "Run the acceptance criteria");
  q->add_option("--profile", suite.profile, "Profile")->check(CLI::IsMember({"desk"}))->capture_default_str();
  q->add_option("--only", suite.only, "Criterion numbers to run")->delimiter(',');
  q->add_option("--output", suite.output, "JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  struct ThreadCap {
    int previous = max_threads();
    explicit ThreadCap(int t) { set_max_threads(t); }
    ~ThreadCap() { set_max_threads(previous); }
  } cap(threads);
  try {
    if (s->parsed()) return cmd_sample(sample, out);
    if (p->parsed()) return cmd_project(proj, out);
    if (r->parsed()) return cmd_ratio(ratio, out);
    if (t->parsed()) return cmd_thinshell(shell, out);
    if (k->parsed()) return cmd_psi_scan(scan, out);
    if (m->parsed()) return cmd_mtilde(mt, out);
    if (d->parsed()) return cmd_deconv(deconv, out);
    if (v->parsed()) return cmd_deconv_verify(verify, out);
    if (q->parsed()) return cmd_suite(suite, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cltlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace cltlab::cli
