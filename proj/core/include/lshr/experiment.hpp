#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lshr/density.hpp"
#include "lshr/level_set.hpp"

namespace lshr {

enum class Study { kSpikeSlab, kMvn, kCauchyNormal, kCustomCone };
enum class SamplerChoice { kLshr1, kLshr2, kGibbs };

const char* to_string(Study study) noexcept;
const char* to_string(SamplerChoice sampler) noexcept;

/// Declarative description of one run. Serialized as JSON.
///
/// `iterations` is the subsample size L for the level-set samplers and the
/// chain length for Gibbs. Model fields are only meaningful for their study;
/// validation rejects a config that sets one for another study.
struct ExperimentConfig {
  Study study = Study::kSpikeSlab;
  SamplerChoice sampler = SamplerChoice::kLshr1;
  int dimension = 2;

  // spike-slab
  double spike_sd = 0.05;
  double slab_sd = 3.0;
  ScaleReading scale_reading = ScaleReading::kStandardDeviation;
  // mvn
  double rho = 0.0;
  // cauchy-normal; 0 selects the mode-balancing formula
  double sigma2 = 0.0;
  // custom-cone
  double cone_radius = 1.0;

  int m = 1000;
  double t1_fraction = 0.95;
  StopBound stop{};
  std::int64_t iterations = 20000;
  std::int64_t burn_in = 0;
  std::uint64_t seed = 0;
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field is written explicitly, so parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

/// Default iteration count and burn-in for a study/sampler pair.
std::int64_t default_iterations(Study study, SamplerChoice sampler);
std::int64_t default_burn_in(Study study, SamplerChoice sampler, std::int64_t iterations);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  ExperimentConfig config;
  std::string library_version;
  double duration_seconds = 0.0;
  std::filesystem::path output_dir;
  std::vector<OutputFile> outputs;
  std::string summary_json;  // per-level or chain summary

  std::string to_json() const;
};

/// Executes the sampler, writing samples.csv, diagnostics.json and
/// manifest.json into `output_dir`. Library errors propagate.
RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir);

/// Output directory for a config: `cli_out` if given; otherwise the config's
/// output_dir, resolved against $LSHR_OUTPUT_ROOT when relative.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const std::optional<std::string>& cli_out);

/// True if manifest.json exists and every listed file matches its digest.
bool verify_manifest(const std::filesystem::path& output_dir, std::string* problem = nullptr);

std::string sha256_file(const std::filesystem::path& path);
std::string library_version();

/// Samples written by a run: one row per draw.
struct LoadedSamples {
  std::vector<std::string> columns;
  Matrix theta;
  std::vector<int> tags;
};
LoadedSamples load_samples(const std::filesystem::path& csv_path, int dimension);

// ---------------------------------------------------------------------------
// compare / oracle
// ---------------------------------------------------------------------------

/// Reference ids: "spike-slab", "normal", "cone", "cauchy-normal".
struct ComparisonSide {
  std::string label;
  double ks = 0.0;
  std::vector<double> quantiles;
  std::vector<double> acf;
};

struct ComparisonReport {
  std::string reference_id;
  std::vector<double> reference_quantiles;
  ComparisonSide a;
  ComparisonSide b;

  std::string to_json() const;
};

/// Compares the stored samples of two runs against a reference. Writes
/// comparison.json, quantiles.csv and acf.csv into `output_dir`. Throws
/// ConfigError on a dimension mismatch.
ComparisonReport compare_runs(const ExperimentConfig& a, const std::filesystem::path& dir_a,
                              const ExperimentConfig& b, const std::filesystem::path& dir_b,
                              const std::string& reference_id,
                              const std::filesystem::path& output_dir);

/// Writes reference tables for a study: oracle_quantiles.csv (99 quantiles)
/// and oracle_density.csv (marginal density grid).
std::vector<std::filesystem::path> write_oracle_tables(const ExperimentConfig& config,
                                                       const std::filesystem::path& output_dir);

}  // namespace lshr
