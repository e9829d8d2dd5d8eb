#include "cltlab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cltlab/errors.hpp"

namespace cltlab {

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd parse_rows(const json& rows) {
  if (!rows.is_array()) throw FormatError("expected a list of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != c) throw FormatError("ragged matrix rows");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

// Columns of an l x M point matrix as a list of points.
json point_list(const Eigen::MatrixXd& points) { return matrix_rows(points.transpose()); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
T get_required(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

} // namespace

void to_json(json& j, BodyKind kind) { j = std::string(to_string(kind)); }
void from_json(const json& j, BodyKind& kind) { kind = parse_body_kind(j.get<std::string>()); }

void to_json(json& j, const BodySpec& spec) { j = {{"kind", spec.kind}, {"dimension", spec.dimension}}; }
void from_json(const json& j, BodySpec& spec) {
  spec.kind = get_required<BodyKind>(j, "kind");
  spec.dimension = get_required<int>(j, "dimension");
  validate(spec);
}

void to_json(json& j, const GaussianSpec& spec) {
  j = {{"dimension", spec.dimension}, {"variance", spec.variance}};
}
void from_json(const json& j, GaussianSpec& spec) {
  spec.dimension = get_required<int>(j, "dimension");
  spec.variance = get_required<double>(j, "variance");
  validate(spec);
}

void to_json(json& j, const ConvolutionSchedule& s) {
  j = {{"alpha", s.alpha}, {"lambda", s.lambda}, {"noise_variance", s.noise_variance}, {"dimension", s.dimension}};
}
void from_json(const json& j, ConvolutionSchedule& s) {
  s.alpha = get_required<double>(j, "alpha");
  s.lambda = get_required<double>(j, "lambda");
  s.noise_variance = get_required<double>(j, "noise_variance");
  s.dimension = get_required<int>(j, "dimension");
  validate(s);
}

void to_json(json& j, const SubspaceBasis& basis) {
  j = {{"ambient_dim", basis.ambient_dim}, {"subspace_dim", basis.subspace_dim}, {"rows", matrix_rows(basis.rows)}};
}
void from_json(const json& j, SubspaceBasis& basis) {
  basis.ambient_dim = get_required<int>(j, "ambient_dim");
  basis.subspace_dim = get_required<int>(j, "subspace_dim");
  basis.rows = parse_rows(j.at("rows"));
  validate(basis);
}

void to_json(json& j, const RadialDensity& d) {
  if (d.form == RadialDensity::Form::ClosedFormChi) {
    j = {{"form", "closed_form_chi"}, {"chi_dof", d.chi_dof}};
    return;
  }
  j = {{"form", "binned"}, {"edges", d.edges}, {"mass", d.mass}};
}
void from_json(const json& j, RadialDensity& d) {
  const auto form = get_required<std::string>(j, "form");
  if (form == "closed_form_chi") {
    d = RadialDensity{};
    d.form = RadialDensity::Form::ClosedFormChi;
    d.chi_dof = get_required<int>(j, "chi_dof");
  } else if (form == "binned") {
    d = RadialDensity{};
    d.edges = get_required<std::vector<double>>(j, "edges");
    d.mass = get_required<std::vector<double>>(j, "mass");
  } else {
    throw FormatError("unknown radial density form '" + form + "'");
  }
  validate(d);
}

void to_json(json& j, const DensityEstimate& e) {
  j = {{"points", point_list(e.points)}, {"values", e.values},   {"stderr", e.std_error},
       {"sample_count", e.sample_count}, {"bandwidth", e.bandwidth}};
}
void from_json(const json& j, DensityEstimate& e) {
  e.points = parse_rows(j.at("points")).transpose();
  e.values = get_required<std::vector<double>>(j, "values");
  e.std_error = get_required<std::vector<double>>(j, "stderr");
  e.sample_count = get_required<std::size_t>(j, "sample_count");
  e.bandwidth = get_required<double>(j, "bandwidth");
  validate(e);
}

void to_json(json& j, const RatioReport& r) {
  j = {{"radius_grid", r.radius_grid},
       {"per_point_ratios", r.per_point_ratios},
       {"sup_abs_deviation", r.sup_abs_deviation}};
}
void from_json(const json& j, RatioReport& r) {
  r.radius_grid = get_required<std::vector<double>>(j, "radius_grid");
  r.per_point_ratios = get_required<std::vector<double>>(j, "per_point_ratios");
  r.sup_abs_deviation = get_required<double>(j, "sup_abs_deviation");
  validate(r);
}

void to_json(json& j, const DeconvCertificate& c) {
  j = {{"admissible", c.admissible},     {"violated_conditions", c.violated_conditions},
       {"epsilon", c.epsilon},           {"lower_radius", c.lower_radius},
       {"upper_radius", c.upper_radius}, {"lower_factor", c.lower_factor},
       {"upper_factor", c.upper_factor}};
}
void from_json(const json& j, DeconvCertificate& c) {
  c.admissible = get_required<bool>(j, "admissible");
  c.violated_conditions = get_required<std::vector<std::string>>(j, "violated_conditions");
  c.epsilon = get_required<double>(j, "epsilon");
  c.lower_radius = get_required<double>(j, "lower_radius");
  c.upper_radius = get_required<double>(j, "upper_radius");
  c.lower_factor = get_required<double>(j, "lower_factor");
  c.upper_factor = get_required<double>(j, "upper_factor");
  validate(c);
}

void to_json(json& j, const DeconvParams& p) {
  j = {{"n", p.n}, {"alpha", p.alpha}, {"beta", p.beta}, {"epsilon", p.epsilon}, {"R", p.R}, {"c0", p.c0}};
}
void from_json(const json& j, DeconvParams& p) {
  p.n = get_required<int>(j, "n");
  p.alpha = get_required<double>(j, "alpha");
  p.beta = get_required<double>(j, "beta");
  p.epsilon = get_required<double>(j, "epsilon");
  p.R = get_required<double>(j, "R");
  p.c0 = j.value("c0", 1e-2);
  validate(p);
}

void to_json(json& j, const KernelParams& p) { j = {{"n", p.n}, {"l", p.l}, {"r", p.r}}; }
void from_json(const json& j, KernelParams& p) {
  p.n = get_required<int>(j, "n");
  p.l = get_required<int>(j, "l");
  p.r = get_required<double>(j, "r");
  validate(p);
}

void to_json(json& j, const KdeConfig& c) {
  j = {{"rule", c.rule == BandwidthRule::Scott ? "scott" : "fixed"}, {"bandwidth", c.bandwidth}};
  if (c.points.size() > 0)
    j["points"] = point_list(c.points);
  else
    j["radial_grid"] = {{"radii", c.radii}, {"directions", c.directions}};
}
void from_json(const json& j, KdeConfig& c) {
  c = KdeConfig{};
  const auto rule = get_required<std::string>(j, "rule");
  if (rule == "scott")
    c.rule = BandwidthRule::Scott;
  else if (rule == "fixed")
    c.rule = BandwidthRule::Fixed;
  else
    throw FormatError("unknown bandwidth rule '" + rule + "'");
  c.bandwidth = j.value("bandwidth", 0.0);
  if (j.contains("points")) {
    c.points = parse_rows(j.at("points")).transpose();
  } else {
    const auto& grid = j.at("radial_grid");
    c.radii = get_required<std::vector<double>>(grid, "radii");
    c.directions = get_required<int>(grid, "directions");
  }
  validate(c);
}

void to_json(json& j, const ShellFraction& f) {
  j = {{"fraction", f.fraction}, {"stderr", f.std_error}, {"count", f.count}};
}

void to_json(json& j, const TruncatedMoment& m) {
  j = {{"near_origin", m.near_origin}, {"far", m.far}, {"total", m.total()}};
}

void to_json(json& j, const MTildeProfile& p) {
  j = {{"radii", p.radii},
       {"ratios", p.ratios},
       {"stderr", p.std_error},
       {"per_subspace_sup", p.per_subspace_sup},
       {"sup_abs_deviation", p.sup_abs_deviation},
       {"noise_variance", p.noise_variance},
       {"bandwidth", p.bandwidth},
       {"subspace_count", p.subspace_count},
       {"samples_per_subspace", p.samples_per_subspace}};
}

void to_json(json& j, const SandwichReport& r) {
  j = {{"status", std::string(to_string(r.status))},
       {"certificate", r.certificate},
       {"dimension", r.dimension},
       {"hypothesis_deviation", number_or_null(r.hypothesis_deviation)},
       {"min_lower_margin", number_or_null(r.min_lower_margin)},
       {"min_upper_margin", number_or_null(r.min_upper_margin)},
       {"point_count", r.points.size()}};
}

json make_report(std::string_view kind, const json& config, json payload) {
  return {{"schema_version", kSchemaVersion}, {"report", std::string(kind)}, {"config", config},
          {"result", std::move(payload)}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

BatchFormat parse_batch_format(std::string_view name) {
  if (name == "bin") return BatchFormat::Bin;
  if (name == "csv") return BatchFormat::Csv;
  throw InvalidSpec("unknown batch format '" + std::string(name) + "' (expected bin or csv)");
}

json batch_sidecar(const SampleBatch& batch, const json& config) {
  json meta = {{"schema_version", kSchemaVersion},
          {"dimension", batch.dimension},
          {"count", batch.count},
          {"seed", batch.seed},
          {"source", batch.source},
          {"dtype", "float64"},
          {"byte_order", "little"},
          {"layout", "column-major [dimension, count]; each sample contiguous"}};
  if (!config.is_null()) meta["config"] = config;
  return meta;
}

void write_batch(const std::filesystem::path& path, const SampleBatch& batch, BatchFormat format,
                 const json& config) {
  validate(batch);
  if (format == BatchFormat::Bin) {
    static_assert(std::endian::native == std::endian::little, "binary batch files are little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(batch.data.data()),
              static_cast<std::streamsize>(batch.data.size() * sizeof(double)));
    std::ofstream sidecar(path.string() + ".json");
    if (!sidecar) throw FormatError("cannot write sidecar for " + path.string());
    sidecar << dump_json(batch_sidecar(batch, config));
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  if (!config.is_null()) out << "# config: " << config.dump() << '\n';
  for (int c = 0; c < batch.dimension; ++c) out << (c ? "," : "") << 'x' << c;
  out << '\n';
  char buffer[32];
  for (std::size_t i = 0; i < batch.count; ++i) {
    for (int c = 0; c < batch.dimension; ++c) {
      std::snprintf(buffer, sizeof buffer, "%.17g", batch.data(c, static_cast<Eigen::Index>(i)));
      out << (c ? "," : "") << buffer;
    }
    out << '\n';
  }
}

SampleBatch read_batch(const std::filesystem::path& path) {
  const std::filesystem::path sidecar_path = path.string() + ".json";
  if (std::filesystem::exists(sidecar_path)) {
    std::ifstream sidecar(sidecar_path);
    const json meta = json::parse(sidecar);
    const auto dimension = get_required<int>(meta, "dimension");
    const auto count = get_required<std::size_t>(meta, "count");
    if (dimension < 1) throw FormatError("sidecar dimension must be >= 1");
    Eigen::MatrixXd data(dimension, static_cast<Eigen::Index>(count));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(double)))
      throw FormatError("binary batch " + path.string() + " is shorter than its sidecar declares");
    return SampleBatch::make(std::move(data), get_required<std::uint64_t>(meta, "seed"), meta.value("source", json()));
  }
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  do {
    if (!std::getline(in, line)) throw FormatError("empty CSV batch " + path.string());
  } while (line.starts_with('#'));
  const auto dimension = static_cast<int>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int cells = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cells;
    }
    if (cells != dimension) throw FormatError("CSV row with " + std::to_string(cells) + " columns, expected " +
                                              std::to_string(dimension));
  }
  const auto count = static_cast<Eigen::Index>(values.size() / static_cast<std::size_t>(dimension));
  Eigen::MatrixXd data = Eigen::Map<Eigen::MatrixXd>(values.data(), dimension, count);
  return SampleBatch::make(std::move(data), 0, {{"type", "csv"}, {"path", path.string()}});
}

} // namespace cltlab
