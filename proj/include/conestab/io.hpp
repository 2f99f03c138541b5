#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "conestab/experiments.hpp"
#include "conestab/transport.hpp"

namespace conestab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

/// Every problem found while validating a configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

ConvexCone cone_from_json(const Json& j);
Json cone_to_json(const ConvexCone& cone);

/// Builds a region. `cone` is needed by the "sector", "ellipsoid_sector" and
/// "edge_half_ball" kinds and by "clip": true.
Region region_from_json(const Json& j, const std::optional<ConvexCone>& cone);

/// Kinds "sector" {radius, center}, "polytope" {A, b} and "clipped_sector"
/// {radius, center, A, b}.
SectorBody body_from_json(const Json& j, const ConvexCone& cone);

struct RunConfig {
  std::string command;
  std::optional<Json> cone;    // inline spec, file contents already loaded
  std::optional<Json> region;
  std::optional<Json> body;    // K for anisotropic quantities; the unit sector by default
  std::uint64_t seed = kDefaultSeed;
  long samples = 1'000'000;
  long boundary_samples = 100'000;
  int count = 2000;
  std::vector<double> thetas;
  int h_min = 2;
  int h_max = 64;
  int trials = 20;
  int directions = 64;
  int radii = 64;
  std::vector<Vec> ys;
  double distance = 10.0;
  double tolerance = 1e-6;
  std::string out_dir = "out";
  /// Source paths of file references, kept for the round trip.
  std::optional<std::string> cone_file;
  std::optional<std::string> region_file;
};

/// Parses and validates a JSON configuration. File references ("cone_file",
/// "region_file") are resolved against `base_dir` and loaded. Throws
/// ConfigError listing every problem: JSON syntax errors with line and column,
/// unknown keys by name, wrong types and missing files.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Inverse of parse_config for configurations without file references.
Json config_to_json(const RunConfig& config);

/// 64-bit FNV-1a of the compact dump of `config_to_json`.
std::uint64_t config_hash(const RunConfig& config);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Doubles are written with %.17g, so equal values always give equal bytes.
std::string to_csv(const Table& table);
Json to_json(const Table& table);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const Table& table);
void write_json(const std::filesystem::path& path, const Json& json);

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::optional<ExponentFit> fit;
  std::string x_label = "mu";
  std::string y_label = "asymmetry";
};

/// Log-log scatter with the fitted line overlaid. Nonpositive points are
/// skipped.
std::string loglog_svg(const PlotSeries& series);

/// metadata.json: tool version, command, seed and configuration hash.
Json run_metadata(const RunConfig& config);

Table family_table(const FamilyResult& family);
Table deficit_table(const DeficitReport& report);
Table chain_table(const GromovChainReport& report);
Table plan_table(const TransportPlan& plan);
Table constant_table(const ConstantEstimate& estimate, const std::vector<ThetaConstant>& growth);
Table scan_table(const TranslationScan& upper, const LowerBoundScan& lower);
Table wedge_table(const WedgeReport& report);

Json plan_to_json(const TransportPlan& plan);
Json fit_to_json(const std::optional<ExponentFit>& fit);

}  // namespace conestab
