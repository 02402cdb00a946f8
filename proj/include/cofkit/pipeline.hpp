#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cofkit/cooc.hpp"
#include "cofkit/filter.hpp"
#include "cofkit/image.hpp"
#include "cofkit/quantize.hpp"

namespace cofkit {

/// Flat pipeline settings; every field has a JSON key of the same name and a
/// CLI flag with dashes instead of underscores.
struct PipelineConfig {
  int k = 32;
  int grid_spacing = 10;
  int window = 7;
  double sigma_s2 = 2.0 * std::sqrt(15.0) + 1.0;
  /// Unset: mean nearest-center distance of the palette.
  std::optional<double> sigma_r;
  double epsilon = 1e-8;
  int iterations = 1;
  IterationMode mode = IterationMode::Iterative;
  std::uint64_t seed = 42;
  std::string region_mask;
  std::string matrix_in;
  std::string matrix_out;

  /// Throws Error naming the offending field.
  void validate() const;
  FilterParams filter_params() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Parses a JSON object; unknown keys and out-of-range values are rejected.
/// Keys absent from the object keep the values already in `base`.
PipelineConfig config_from_json(const std::string& text, PipelineConfig base = {});
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::string& path);

/// Error raised inside one pipeline stage; what() starts with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageTimings {
  double quantize_ms = 0.0;
  double collect_ms = 0.0;
  double soften_ms = 0.0;
  double normalize_ms = 0.0;
  double filter_ms = 0.0;
};

/// Learned state of the quantized pipeline.
struct PipelineModel {
  GuidedModel guided;
  AffinityMatrix affinity;
};

/// Quantize, collect hard co-occurrence, soften with the cluster affinity and
/// normalize into M. `mask` restricts where statistics are collected.
PipelineModel build_model(const PipelineConfig& cfg, const ColorImage& img,
                          const RegionMask* mask = nullptr, StageTimings* timings = nullptr);

/// Statistics from `mask` only, reusing an existing palette and guidance
/// (foreground / background matrices).
PmiMatrix region_pmi(const PipelineConfig& cfg, const PipelineModel& model, const RegionMask& mask);

struct PipelineResult {
  ColorImage image;
  PipelineModel model;
  std::vector<double> msd;
  StageTimings timings;
};

/// Quantize, Compute Co-occurrence, Hard2Soft, Cooc2PMI, CoF. With
/// cfg.matrix_in set, M and the palette come from the file and only the
/// label assignment runs. cfg.matrix_out receives the model used.
PipelineResult run_pipeline_detailed(const PipelineConfig& cfg, const ColorImage& img);

inline ColorImage run_pipeline(const PipelineConfig& cfg, const ColorImage& img) {
  return run_pipeline_detailed(cfg, img).image;
}

}  // namespace cofkit
