#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datff/convert.hpp"
#include "datff/preprocess.hpp"
#include "datff/tf_analysis.hpp"
#include "datff/types.hpp"
#include "datff/window_fit.hpp"

namespace datff {

/// Failure inside run_pipeline, tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  Method method = Method::datff;
  double isdft_alpha = 0.01;
  double isdft_w_threshold = 0.5;

  std::size_t m = 10;
  double ci = 0.9;
  double eps_occ = 0.01;
  double w_threshold = 0.5;
  Taper taper = Taper::attenuated;
  std::size_t stft_window = 0;  // 0: one tenth of the crop
  std::size_t stft_hop = 0;     // 0: non-overlapping

  BackgroundMethod background = BackgroundMethod::svd;
  std::size_t svd_rank = 1;
  double tz_threshold = 0.3;
  bool fit_after_bg = true;

  std::optional<double> crop_time;           // default: the grid's
  std::optional<FilterWindow> reuse_window;  // skip fitting, apply this one
  std::filesystem::path output_dir;          // empty: keep everything in memory

  void validate() const;
};

/// Everything the window fit produced.
struct WindowFit {
  OccurrenceHistogram histogram;
  std::vector<BoundaryPoint> points;
  FitResult fit;
  FilterWindow window;
};

struct PipelineResult {
  TimeBScan output;  // full length, time-zero corrected, background removed
  std::size_t time_zero_shift = 0;
  std::size_t crop_samples = 0;
  std::optional<WindowFit> fit;
  std::optional<FilterWindow> window;  // the window actually applied
};

/// DC removal -> full-band conversion -> time-zero -> (background) -> STFT
/// histogram -> boundary points -> WLR fit -> window -> windowed conversion of
/// the DC-removed spectra -> time-zero -> background removal. Artifacts are
/// written to cfg.output_dir when set.
PipelineResult run_pipeline(const FrequencyBScan& bscan, const PipelineConfig& cfg);

/// Fits the DATFF window from an already-preprocessed time B-scan whose
/// sample 0 sits at conversion index conversion_index_of_first_sample().
WindowFit fit_window(const TimeBScan& preprocessed, std::size_t n_freq, std::size_t crop_samples,
                     const PipelineConfig& cfg);

struct MSweepRow {
  std::size_t m = 0;
  double gamma = 0.0;
  std::size_t points = 0;
};

/// One fitted gamma per interval count, all from the same histogram.
std::vector<MSweepRow> m_sweep(const FrequencyBScan& bscan, const PipelineConfig& cfg,
                               std::span<const std::size_t> m_values);

struct GammaStability {
  std::vector<double> gammas;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

GammaStability gamma_stability(std::span<const FrequencyBScan> scans, const PipelineConfig& cfg);

}  // namespace datff
