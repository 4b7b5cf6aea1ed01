#pragma once

#include <cstddef>

#include "datff/synth.hpp"
#include "datff/types.hpp"

namespace datff {

struct ScrReport {
  double scr_db = 0.0;
  std::size_t n_roi_pixels = 0;
  std::size_t n_clutter_pixels = 0;
  double roi_energy = 0.0;
  double clutter_energy = 0.0;
};

/// SCR = 10 log10( N_c sum_{R_I} |v|^2 / (N_I sum_{R_c} |v|^2) ) over the
/// complex pixels. Overlapping rectangles within one region count once.
ScrReport scr(const TimeBScan& bscan, const RegionMask& mask);

/// c0 / (2 BW sqrt(eps_r)).
double depth_resolution(double bandwidth, double epsilon_r);

/// t c0 / (2 sqrt(eps_r)).
double time_to_depth(double two_way_time, double epsilon_r);

/// Convenience ROI/clutter split for synthetic scenes: for every target, the
/// traces within +-trace_margin of its apex and the samples spanning its
/// hyperbola there, padded by +-time_margin. Clutter is every pixel farther
/// than clutter_guard samples from all target tracks (over all traces),
/// emitted as one-row rectangles; clutter_guard = 0 makes it the plain
/// complement of the ROIs. Targets falling outside the image are skipped. The time axis is taken from `bscan` after time-zero
/// correction (sample 0 = the direct-coupling arrival).
RegionMask synthetic_region_mask(const SyntheticScene& scene, const TimeBScan& bscan, std::size_t trace_margin = 5,
                                 std::size_t time_margin = 3, std::size_t clutter_guard = 10);

}  // namespace datff
