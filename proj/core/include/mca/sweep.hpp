#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mca/pipeline.hpp"

namespace mca {

struct SweepConfig {
  double loftr_threshold = 0.0;
  double distance_coefficient = 0.0;
  AffinityMetric metric = AffinityMetric::M4;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

inline constexpr std::array<double, 4> kDefaultThresholds{0.0, 0.2, 0.4, 0.6};
inline constexpr std::array<double, 6> kDefaultCoefficients{0.0, 2.0, 5.0, 10.0, 20.0, 40.0};
inline constexpr std::array<CameraPair, 8> kDefaultCameraPairs{
    CameraPair{1, 4}, CameraPair{1, 6}, CameraPair{1, 7}, CameraPair{2, 3},
    CameraPair{4, 7}, CameraPair{5, 6}, CameraPair{5, 7}, CameraPair{6, 7}};

/// thresholds x coefficients x {M4, M5}, threshold slowest, metric fastest.
[[nodiscard]] std::vector<SweepConfig> sweep_grid(const std::vector<double>& thresholds,
                                                  const std::vector<double>& coefficients);
/// The 48-config grid.
[[nodiscard]] std::vector<SweepConfig> default_sweep_grid();

/// Settings shared by every config of a sweep.
struct SweepOptions {
  int window = 3;
  double accept_threshold = 0.0;
  bool symmetric_residual = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct SweepRow {
  CameraPair pair;
  SweepConfig config;
  EvalCounts counts;
  Scores scores;
  std::size_t failed_frames = 0;
  std::string failure;  // first frame failure message, if any
};

[[nodiscard]] PipelineConfig to_pipeline_config(const SweepConfig& c, const SweepOptions& o);

/// Evaluates every config on the same frames (concurrently) and returns one
/// row per config, stably sorted by f1 descending (ties keep grid order).
[[nodiscard]] std::vector<SweepRow> run_sweep(const PairContext& ctx,
                                              const std::vector<FrameInput>& frames,
                                              const std::vector<SweepConfig>& configs,
                                              const SweepOptions& options = {});

/// Rows for a pair whose context could not be built (e.g. no overlap): every
/// config scored as zero predictions with `failure` recorded.
[[nodiscard]] std::vector<SweepRow> failed_sweep(const CameraPair& pair,
                                                 const std::vector<SweepConfig>& configs,
                                                 const std::vector<FrameInput>& frames,
                                                 const std::string& failure);

/// Best row per pair, in first-appearance pair order.
[[nodiscard]] std::vector<SweepRow> best_per_pair(const std::vector<SweepRow>& rows);

/// pair,threshold,coefficient,metric,tp,fp,fn,precision,recall,f1,failed_frames
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// JSON array with the same fields as the CSV; percentages are not used.
[[nodiscard]] std::string sweep_json(const std::vector<SweepRow>& rows);
/// pair,precision,recall,f1,threshold,coefficient,metric (percent, 2 decimals).
void write_best_summary(std::ostream& out, const std::vector<SweepRow>& rows);
/// Long-format f1 surface: pair,metric,threshold,coefficient,f1.
void write_f1_surface(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mca
