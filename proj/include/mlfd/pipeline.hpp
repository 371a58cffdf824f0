#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlfd/learner.hpp"
#include "mlfd/multilevel.hpp"

namespace mlfd {

enum class Method { kBm, kMld };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Everything that determines a run. Command-line flags override a config
/// file, which overrides these defaults.
struct RunConfig {
  int r_max = 10;
  int levels = 3;
  std::size_t min_cell_side = 32;
  double holdout = 0.5;
  double ridge = kDefaultRidge;
  std::uint64_t seed = 0;
  Method method = Method::kBm;
  std::uint64_t mem_budget_mib = 512;
  unsigned workers = 1;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  DilationOptions dilation(unsigned dilation_workers = 1) const;
  MultilevelOptions multilevel(unsigned dilation_workers = 1) const;

  nlohmann::json to_json() const;
  /// Missing keys keep their current values; unknown keys are rejected.
  void merge_json(const nlohmann::json& j);
  static RunConfig from_json(const nlohmann::json& j);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig load_config_file(const std::filesystem::path& path);

/// Column names for the feature vector the config produces.
std::vector<std::string> feature_names(const RunConfig& cfg);

/// Bouligand-Minkowski descriptors (bm) or the entropy feature vector (mld).
std::vector<double> extract_features(const GrayImage& img, const RunConfig& cfg,
                                     unsigned dilation_workers = 1);

/// One row per manifest entry in manifest order. Images are processed on
/// `cfg.workers` threads; output order never depends on scheduling.
FeatureMatrix extract_dataset(const DatasetManifest& manifest, const RunConfig& cfg);

struct EvaluationResult {
  MetricsReport report;
  std::vector<std::size_t> features_used;
  std::optional<SelectionResult> selection;
};

/// Hold-out, optional rank-and-select on the training part (method mld),
/// LDA fit and test evaluation.
EvaluationResult evaluate_features(const FeatureMatrix& data, const RunConfig& cfg);

/// Metrics JSON with the effective config echoed under "config".
nlohmann::json evaluation_json(const EvaluationResult& result, const FeatureMatrix& data,
                               const RunConfig& cfg);

struct DescribeResult {
  DilationCurve curve;
  DescriptorVector descriptors;
  FdEstimate fd;
  std::optional<MultilevelFeatures> multilevel;
};

DescribeResult describe_image(const GrayImage& img, const RunConfig& cfg);

/// Blocks separated by blank lines: descriptor CSV, curve CSV, FD CSV and,
/// for mld, the EFV CSV.
std::string describe_to_text(const DescribeResult& r);

struct SynthSpec {
  int n_classes = 5;
  int samples_per_class = 10;
  std::size_t size = 64;
  std::uint64_t seed = 0;
};

/// Texture for (class, sample). Classes cycle through sinusoidal gratings,
/// checkerboards and smoothed value noise with class-specific parameters.
GrayImage synth_texture(int class_id, int sample, std::size_t size, std::uint64_t seed);

/// Writes `<out>/class_<c>/sample_<s>.pgm`; returns the number of files.
std::size_t generate_synthetic(const std::filesystem::path& out, const SynthSpec& spec);

}  // namespace mlfd
