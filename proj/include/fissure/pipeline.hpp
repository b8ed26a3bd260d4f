#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fissure/odos.hpp"
#include "fissure/postprocess.hpp"
#include "fissure/preprocess.hpp"
#include "fissure/volume.hpp"

namespace fissure {

/// A pipeline stage failed; `stage()` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  FilterParams filter;
  PreprocessParams preprocess;
  PostprocessParams postprocess;
  double band_mm = 3.0;
  float mask_fill = -1000.0f;
  bool dump_intermediates = false;
  unsigned threads = 0;  ///< 0 = hardware concurrency

  void validate() const;
  /// key = value lines, '#' comments; unknown keys throw InputError.
  static PipelineConfig parse(const std::string& text);
  static PipelineConfig load(const std::filesystem::path& path);
  /// Every resolved parameter with its config key.
  [[nodiscard]] std::map<std::string, std::string> resolved() const;
  [[nodiscard]] std::string to_text() const;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct SegmentResult {
  BinaryVolume final_mask;
  std::vector<StageTiming> timings;
  std::size_t lungs_processed = 0;
};

/// Receives named intermediate volumes when dumping is enabled.
struct IntermediateSink {
  std::filesystem::path dir;
  void write(const std::string& name, const ScalarVolume& v) const;
  void write(const std::string& name, const BinaryVolume& v) const;
};

/// Full chain: mask, stick filter per view, fusion, vector field, per-view
/// orientation selection, view integration, shape measure, skeleton
/// post-processing and repair. A lung label volume with exactly two
/// distinct nonzero labels is processed one lung at a time.
SegmentResult segment(const ScalarVolume& ct, const ScalarVolume& lung_labels,
                      const PipelineConfig& cfg, const IntermediateSink* sink = nullptr);

/// Machine-readable run report (parameters, timings, voxel counts) as JSON.
std::string segment_report_json(const SegmentResult& r, const PipelineConfig& cfg);

}  // namespace fissure
