#include "datff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace datff {

ScrReport scr(const TimeBScan& bscan, const RegionMask& mask) {
  const std::size_t n_traces = bscan.n_traces();
  const std::size_t n_time = bscan.n_time();
  mask.validate(n_traces, n_time);

  std::vector<unsigned char> label(n_traces * n_time, 0);
  auto paint = [&](const std::vector<PixelRect>& rects, unsigned char tag) {
    for (const auto& r : rects)
      for (std::size_t t = r.trace_lo; t <= r.trace_hi; ++t)
        for (std::size_t j = r.time_lo; j <= r.time_hi; ++j) label[t * n_time + j] = tag;
  };
  paint(mask.roi, 1);
  paint(mask.clutter, 2);

  ScrReport rep;
  const auto data = bscan.data();
  for (std::size_t p = 0; p < label.size(); ++p) {
    if (label[p] == 1) {
      rep.roi_energy += std::norm(data[p]);
      ++rep.n_roi_pixels;
    } else if (label[p] == 2) {
      rep.clutter_energy += std::norm(data[p]);
      ++rep.n_clutter_pixels;
    }
  }
  if (!(rep.clutter_energy > 0.0)) throw Error("scr: clutter region empty of energy");
  rep.scr_db = 10.0 * std::log10((static_cast<double>(rep.n_clutter_pixels) * rep.roi_energy) /
                                 (static_cast<double>(rep.n_roi_pixels) * rep.clutter_energy));
  return rep;
}

double depth_resolution(double bandwidth, double epsilon_r) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("depth_resolution: bandwidth must be > 0");
  if (!(epsilon_r >= 1.0)) throw std::invalid_argument("depth_resolution: epsilon_r must be >= 1");
  return kSpeedOfLight / (2.0 * bandwidth * std::sqrt(epsilon_r));
}

double time_to_depth(double two_way_time, double epsilon_r) {
  if (!(two_way_time >= 0.0)) throw std::invalid_argument("time_to_depth: time must be >= 0");
  if (!(epsilon_r >= 1.0)) throw std::invalid_argument("time_to_depth: epsilon_r must be >= 1");
  return two_way_time * kSpeedOfLight / (2.0 * std::sqrt(epsilon_r));
}

RegionMask synthetic_region_mask(const SyntheticScene& scene, const TimeBScan& bscan, std::size_t trace_margin,
                                 std::size_t time_margin, std::size_t clutter_guard) {
  const std::size_t n_traces = bscan.n_traces();
  const std::size_t n_time = bscan.n_time();
  const auto sample_of = [&](double raw_time) {
    return (raw_time - bscan.time_zero_offset()) / bscan.time_step();
  };

  RegionMask mask;
  for (const auto& target : scene.targets) {
    const double apex = std::round(target.x_pos / scene.trace_spacing);
    if (apex < 0.0 || apex >= static_cast<double>(n_traces)) continue;
    const auto a = static_cast<std::size_t>(apex);
    PixelRect r;
    r.trace_lo = a >= trace_margin ? a - trace_margin : 0;
    r.trace_hi = std::min(n_traces - 1, a + trace_margin);
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t t = r.trace_lo; t <= r.trace_hi; ++t) {
      const double s = sample_of(scene.system_delay + two_way_time(scene, target, t));
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    lo = std::floor(lo) - static_cast<double>(time_margin);
    hi = std::ceil(hi) + static_cast<double>(time_margin);
    if (hi < 0.0 || lo > static_cast<double>(n_time - 1)) continue;
    r.time_lo = static_cast<std::size_t>(std::max(lo, 0.0));
    r.time_hi = static_cast<std::size_t>(std::min(hi, static_cast<double>(n_time - 1)));
    mask.roi.push_back(r);
  }
  if (mask.roi.empty()) throw Error("synthetic_region_mask: no target inside the image");

  // Pixels excluded from clutter: ROIs plus the guard band.
  std::vector<unsigned char> in_roi(n_traces * n_time, 0);
  for (const auto& r : mask.roi)
    for (std::size_t t = r.trace_lo; t <= r.trace_hi; ++t)
      for (std::size_t j = r.time_lo; j <= r.time_hi; ++j) in_roi[t * n_time + j] = 1;
  if (clutter_guard > 0) {
    const double g = static_cast<double>(clutter_guard);
    for (const auto& target : scene.targets)
      for (std::size_t t = 0; t < n_traces; ++t) {
        const double s = sample_of(scene.system_delay + two_way_time(scene, target, t));
        const double lo = std::max(std::floor(s) - g, 0.0);
        const double hi = std::min(std::ceil(s) + g, static_cast<double>(n_time) - 1.0);
        for (double j = lo; j <= hi; ++j) in_roi[t * n_time + static_cast<std::size_t>(j)] = 1;
      }
  }

  for (std::size_t j = 0; j < n_time; ++j) {
    std::size_t t = 0;
    while (t < n_traces) {
      if (in_roi[t * n_time + j]) {
        ++t;
        continue;
      }
      const std::size_t start = t;
      while (t < n_traces && !in_roi[t * n_time + j]) ++t;
      mask.clutter.push_back({start, t - 1, j, j});
    }
  }
  return mask;
}

}  // namespace datff
