#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "datff/types.hpp"

namespace datff {

/// Short-time Fourier transform settings. Zero lengths pick the defaults
/// for the analysed length: window = ceil(n/10), hop = window.
struct StftConfig {
  std::size_t window_len = 0;
  std::size_t hop = 0;
  double magnitude_floor = 0.01;  // occurrence threshold, fraction of per-trace max

  /// Fills in zero lengths for a trace of n_crop samples and validates.
  StftConfig resolved(std::size_t n_crop) const;
  void validate(std::size_t n_crop) const;
  bool operator==(const StftConfig&) const = default;
};

/// Physical axes for labelling STFT bins.
struct StftAxes {
  double time_step = 1.0;
  double first_sample_time = 0.0;
  double f_start = 0.0;
};

/// |STFT| of one trace, row-major [time bin][frequency bin].
struct StftMatrix {
  std::size_t n_time_bins = 0;
  std::size_t n_freq_bins = 0;
  std::vector<double> magnitudes;
  std::vector<std::size_t> block_start;  // first sample of each block
  std::vector<double> time_centers;      // s
  std::vector<double> bin_frequencies;   // Hz

  double at(std::size_t t, std::size_t b) const { return magnitudes[t * n_freq_bins + b]; }
  double max_magnitude() const;
};

/// Hamming-windowed blocks of cfg.window_len samples stepped by cfg.hop
/// (trailing partial block dropped):
///   |sum_m x[t+m] w[m] exp(-j2pi b m / L)|,  b = 0..L-1.
StftMatrix stft(std::span<const cplx> trace, const StftConfig& cfg, const StftAxes& axes = {});

/// Symmetric Hamming window of length L (w[0] = 0.08 for L > 1).
std::vector<double> hamming(std::size_t L);

/// Per cell, how many traces exceed the magnitude floor relative to their
/// own STFT maximum.
struct OccurrenceHistogram {
  std::size_t n_time_bins = 0;
  std::size_t n_freq_bins = 0;
  std::size_t n_traces = 0;
  StftConfig config;
  std::vector<std::uint32_t> counts;     // row-major [time bin][frequency bin]
  std::vector<std::size_t> block_start;  // first sample of each time bin

  std::uint32_t at(std::size_t t, std::size_t b) const { return counts[t * n_freq_bins + b]; }
  std::uint64_t total() const;
  bool operator==(const OccurrenceHistogram&) const = default;
};

OccurrenceHistogram occurrence_histogram(std::span<const StftMatrix> stfts, const StftConfig& cfg);

/// STFT of every trace (parallel) reduced straight into a histogram.
OccurrenceHistogram bscan_histogram(const TimeBScan& bscan, const StftConfig& cfg);

struct BoundaryPoint {
  std::size_t n = 1;    // conversion-grid time index
  std::size_t k = 1;    // sweep frequency index, 1..N
  double weight = 0.0;  // cell count in the interval
  bool operator==(const BoundaryPoint&) const = default;
};

/// Maps histogram rows onto the conversion grid: crop sample j corresponds to
/// conversion index first_index + j.
struct BoundaryGrid {
  std::size_t n_freq = 0;
  std::size_t first_index = 1;
};

/// Splits the time bins into m equal intervals; for each occupied interval
/// the frequency marginal is cumulated from the low end and the first bin
/// reaching `ci` of the interval's total sets k_i. n_i is the interval's
/// midpoint sample. Empty intervals are dropped.
std::vector<BoundaryPoint> boundary_points(const OccurrenceHistogram& hist, std::size_t m, double ci,
                                           const BoundaryGrid& grid);

/// Conversion index of crop sample 0 for a time-zero-shifted B-scan.
std::size_t conversion_index_of_first_sample(const TimeBScan& bscan);

}  // namespace datff
