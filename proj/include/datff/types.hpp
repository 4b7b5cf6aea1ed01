#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace datff {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Uniform stepped-frequency sweep. Frequency index k = 1..n_freq maps to
/// f_start + (k-1)*f_step. The frequency-to-time conversion yields samples
/// spaced by time_step() = 1/(n_freq*f_step).
struct SweepGrid {
  double f_start = 0.25e9;
  double f_step = 6.25e6;
  std::size_t n_freq = 1001;
  double crop_time = 20e-9;

  double time_step() const { return 1.0 / (static_cast<double>(n_freq) * f_step); }
  double frequency(std::size_t k) const { return f_start + static_cast<double>(k - 1) * f_step; }
  /// Swept bandwidth, first to last frequency point.
  double bandwidth() const { return static_cast<double>(n_freq - 1) * f_step; }
  /// Samples covering [0, crop_time] at time_step spacing, endpoints inclusive.
  std::size_t crop_samples() const;

  void validate() const;
  bool operator==(const SweepGrid&) const = default;
};

/// 1001 points over 0.25-6.5 GHz, 20 ns analysis window.
SweepGrid default_grid();

/// Samples covering [0, crop_time] at time_step spacing, capped at limit.
std::size_t crop_samples(double time_step, double crop_time, std::size_t limit);

class FrequencySweepTrace {
 public:
  FrequencySweepTrace(SweepGrid grid, std::vector<cplx> samples);

  const SweepGrid& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  /// 1-based, matching the k = 1..N sum convention.
  cplx operator()(std::size_t k) const { return samples_[k - 1]; }

 private:
  SweepGrid grid_;
  std::vector<cplx> samples_;
};

class FrequencyBScan {
 public:
  FrequencyBScan(SweepGrid grid, double trace_spacing, std::vector<FrequencySweepTrace> traces);

  const SweepGrid& grid() const { return grid_; }
  double trace_spacing() const { return trace_spacing_; }
  std::size_t n_traces() const { return traces_.size(); }
  const FrequencySweepTrace& trace(std::size_t i) const { return traces_[i]; }
  std::span<const FrequencySweepTrace> traces() const { return traces_; }

  FrequencyBScan scaled(cplx factor) const;

 private:
  SweepGrid grid_;
  double trace_spacing_;
  std::vector<FrequencySweepTrace> traces_;
};

/// Time-domain B-scan, trace-major. Sample j (0-based) of every trace sits at
/// time time_zero_offset() + j*time_step(). A raw conversion output starts at
/// one time step (sample n = 1 of the k,n = 1..N convention).
class TimeBScan {
 public:
  TimeBScan(double time_step, double trace_spacing, std::size_t n_traces, std::size_t n_time,
            std::vector<cplx> samples, double time_zero_offset);

  double time_step() const { return time_step_; }
  double trace_spacing() const { return trace_spacing_; }
  double time_zero_offset() const { return time_zero_offset_; }
  std::size_t n_traces() const { return n_traces_; }
  std::size_t n_time() const { return n_time_; }

  std::span<const cplx> data() const { return samples_; }
  std::span<const cplx> trace(std::size_t i) const {
    return std::span<const cplx>(samples_).subspan(i * n_time_, n_time_);
  }
  cplx at(std::size_t trace_index, std::size_t j) const { return samples_[trace_index * n_time_ + j]; }
  double time_of(std::size_t j) const { return time_zero_offset_ + static_cast<double>(j) * time_step_; }

  /// Same axes, new sample values (size must match).
  TimeBScan with_samples(std::vector<cplx> samples) const;
  /// First n samples of every trace.
  TimeBScan cropped(std::size_t n) const;
  TimeBScan scaled(cplx factor) const;
  double energy() const;

 private:
  double time_step_;
  double trace_spacing_;
  std::size_t n_traces_;
  std::size_t n_time_;
  std::vector<cplx> samples_;
  double time_zero_offset_;
};

/// Inclusive pixel rectangle, 0-based trace and time-sample indices.
struct PixelRect {
  std::size_t trace_lo = 0;
  std::size_t trace_hi = 0;
  std::size_t time_lo = 0;
  std::size_t time_hi = 0;
  bool operator==(const PixelRect&) const = default;
};

struct RegionMask {
  std::vector<PixelRect> roi;
  std::vector<PixelRect> clutter;

  /// Throws unless every rectangle is well formed and inside the extent,
  /// both sets are non-empty and the two pixel sets are disjoint.
  void validate(std::size_t n_traces, std::size_t n_time) const;
  bool operator==(const RegionMask&) const = default;
};

}  // namespace datff
