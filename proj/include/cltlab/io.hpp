#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cltlab/deconvolution.hpp"
#include "cltlab/density.hpp"
#include "cltlab/model.hpp"
#include "cltlab/radial.hpp"
#include "cltlab/samplers.hpp"
#include "cltlab/spherical.hpp"

// JSON interchange (snake_case fields) for every model type. Deserialization
// validates, so a parsed value always satisfies its invariants.
namespace cltlab {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

void to_json(json& j, BodyKind kind);
void from_json(const json& j, BodyKind& kind);
void to_json(json& j, const BodySpec& spec);
void from_json(const json& j, BodySpec& spec);
void to_json(json& j, const GaussianSpec& spec);
void from_json(const json& j, GaussianSpec& spec);
void to_json(json& j, const ConvolutionSchedule& schedule);
void from_json(const json& j, ConvolutionSchedule& schedule);
void to_json(json& j, const SubspaceBasis& basis);
void from_json(const json& j, SubspaceBasis& basis);
void to_json(json& j, const RadialDensity& density);
void from_json(const json& j, RadialDensity& density);
void to_json(json& j, const DensityEstimate& estimate);
void from_json(const json& j, DensityEstimate& estimate);
void to_json(json& j, const RatioReport& report);
void from_json(const json& j, RatioReport& report);
void to_json(json& j, const DeconvCertificate& certificate);
void from_json(const json& j, DeconvCertificate& certificate);
void to_json(json& j, const DeconvParams& params);
void from_json(const json& j, DeconvParams& params);
void to_json(json& j, const KernelParams& params);
void from_json(const json& j, KernelParams& params);
void to_json(json& j, const KdeConfig& config);
void from_json(const json& j, KdeConfig& config);
void to_json(json& j, const ShellFraction& fraction);
void to_json(json& j, const TruncatedMoment& moment);
void to_json(json& j, const MTildeProfile& profile);
void to_json(json& j, const SandwichReport& report);

// Wraps a report payload with the schema version and the resolved config.
json make_report(std::string_view kind, const json& config, json payload);

// Deterministic text form used for every JSON file the tools write.
std::string dump_json(const json& j);

enum class BatchFormat { Bin, Csv };
BatchFormat parse_batch_format(std::string_view name);

// Binary: raw little-endian float64 of the dimension x count matrix in
// column-major order (sample vectors contiguous), with a JSON sidecar at
// `path` + ".json". CSV: header x0..x(n-1), one sample per row. A non-null
// `config` is echoed into the sidecar, or as a leading "# config: " line in CSV.
void write_batch(const std::filesystem::path& path, const SampleBatch& batch, BatchFormat format,
                 const json& config = nullptr);
SampleBatch read_batch(const std::filesystem::path& path);

json batch_sidecar(const SampleBatch& batch, const json& config = nullptr);

} // namespace cltlab
