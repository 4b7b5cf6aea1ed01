#include "datff/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace datff {

namespace {

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

std::size_t crop_samples(double time_step, double crop_time, std::size_t limit) {
  if (!(time_step > 0.0) || !(crop_time >= 0.0)) throw std::invalid_argument("crop_samples: bad time axis");
  // Guard against 20e-9/ts landing a hair under an integer.
  const auto whole = static_cast<std::size_t>(std::floor(crop_time / time_step + 1e-9));
  return std::min(whole + 1, limit);
}

std::size_t SweepGrid::crop_samples() const { return datff::crop_samples(time_step(), crop_time, n_freq); }

void SweepGrid::validate() const {
  if (!(f_start > 0.0)) throw std::invalid_argument("SweepGrid: f_start must be > 0");
  if (!(f_step > 0.0)) throw std::invalid_argument("SweepGrid: f_step must be > 0");
  if (n_freq < 2) throw std::invalid_argument("SweepGrid: n_freq must be >= 2");
  if (!(crop_time > 0.0)) throw std::invalid_argument("SweepGrid: crop_time must be > 0");
  if (crop_time > static_cast<double>(n_freq) * time_step() * (1.0 + 1e-12))
    throw std::invalid_argument("SweepGrid: crop_time exceeds n_freq * time_step");
}

SweepGrid default_grid() { return SweepGrid{}; }

FrequencySweepTrace::FrequencySweepTrace(SweepGrid grid, std::vector<cplx> samples)
    : grid_(grid), samples_(std::move(samples)) {
  grid_.validate();
  if (samples_.size() != grid_.n_freq)
    throw std::invalid_argument("FrequencySweepTrace: sample count " + std::to_string(samples_.size()) +
                                " != n_freq " + std::to_string(grid_.n_freq));
  if (!all_finite(samples_)) throw std::invalid_argument("FrequencySweepTrace: non-finite sample");
}

FrequencyBScan::FrequencyBScan(SweepGrid grid, double trace_spacing, std::vector<FrequencySweepTrace> traces)
    : grid_(grid), trace_spacing_(trace_spacing), traces_(std::move(traces)) {
  grid_.validate();
  if (traces_.empty()) throw std::invalid_argument("FrequencyBScan: at least one trace required");
  if (!(trace_spacing_ > 0.0) || !std::isfinite(trace_spacing_))
    throw std::invalid_argument("FrequencyBScan: trace_spacing must be positive");
  for (const auto& t : traces_)
    if (!(t.grid() == grid_)) throw std::invalid_argument("FrequencyBScan: traces do not share one grid");
}

FrequencyBScan FrequencyBScan::scaled(cplx factor) const {
  std::vector<FrequencySweepTrace> out;
  out.reserve(traces_.size());
  for (const auto& t : traces_) {
    std::vector<cplx> s(t.samples().begin(), t.samples().end());
    for (auto& z : s) z *= factor;
    out.emplace_back(grid_, std::move(s));
  }
  return FrequencyBScan(grid_, trace_spacing_, std::move(out));
}

TimeBScan::TimeBScan(double time_step, double trace_spacing, std::size_t n_traces, std::size_t n_time,
                     std::vector<cplx> samples, double time_zero_offset)
    : time_step_(time_step),
      trace_spacing_(trace_spacing),
      n_traces_(n_traces),
      n_time_(n_time),
      samples_(std::move(samples)),
      time_zero_offset_(time_zero_offset) {
  if (!(time_step_ > 0.0) || !std::isfinite(time_step_))
    throw std::invalid_argument("TimeBScan: time_step must be positive");
  if (!(trace_spacing_ > 0.0)) throw std::invalid_argument("TimeBScan: trace_spacing must be positive");
  if (n_traces_ == 0 || n_time_ == 0) throw std::invalid_argument("TimeBScan: empty extent");
  if (samples_.size() != n_traces_ * n_time_)
    throw std::invalid_argument("TimeBScan: sample buffer does not match n_traces*n_time");
  if (!std::isfinite(time_zero_offset_)) throw std::invalid_argument("TimeBScan: non-finite time_zero_offset");
  if (!all_finite(samples_)) throw std::invalid_argument("TimeBScan: non-finite sample");
}

TimeBScan TimeBScan::with_samples(std::vector<cplx> samples) const {
  return TimeBScan(time_step_, trace_spacing_, n_traces_, n_time_, std::move(samples), time_zero_offset_);
}

TimeBScan TimeBScan::cropped(std::size_t n) const {
  if (n == 0 || n > n_time_) throw std::invalid_argument("TimeBScan::cropped: bad length");
  std::vector<cplx> out(n_traces_ * n);
  for (std::size_t i = 0; i < n_traces_; ++i) {
    auto src = trace(i).first(n);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return TimeBScan(time_step_, trace_spacing_, n_traces_, n, std::move(out), time_zero_offset_);
}

TimeBScan TimeBScan::scaled(cplx factor) const {
  std::vector<cplx> s = samples_;
  for (auto& z : s) z *= factor;
  return with_samples(std::move(s));
}

double TimeBScan::energy() const {
  double e = 0.0;
  for (const auto& z : samples_) e += std::norm(z);
  return e;
}

void RegionMask::validate(std::size_t n_traces, std::size_t n_time) const {
  if (roi.empty()) throw std::invalid_argument("RegionMask: empty ROI");
  if (clutter.empty()) throw std::invalid_argument("RegionMask: empty clutter region");
  std::vector<unsigned char> owner(n_traces * n_time, 0);
  auto paint = [&](const std::vector<PixelRect>& rects, unsigned char tag, const char* name) {
    for (const auto& r : rects) {
      if (r.trace_lo > r.trace_hi || r.time_lo > r.time_hi)
        throw std::invalid_argument(std::string("RegionMask: inverted ") + name + " rectangle");
      if (r.trace_hi >= n_traces || r.time_hi >= n_time)
        throw std::invalid_argument(std::string("RegionMask: ") + name + " rectangle outside the B-scan");
      for (std::size_t t = r.trace_lo; t <= r.trace_hi; ++t)
        for (std::size_t j = r.time_lo; j <= r.time_hi; ++j) {
          auto& o = owner[t * n_time + j];
          if (o != 0 && o != tag) throw std::invalid_argument("RegionMask: ROI and clutter overlap");
          o = tag;
        }
    }
  };
  paint(roi, 1, "roi");
  paint(clutter, 2, "clutter");
}

}  // namespace datff
