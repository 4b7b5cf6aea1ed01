#pragma once

#include <cstdint>
#include <vector>

#include "datff/types.hpp"

namespace datff {

struct Target {
  double x_pos = 0.0;         // m along the survey line
  double depth = 0.5;         // m
  double reflectivity = 1.0;  // amplitude
  bool operator==(const Target&) const = default;
};

/// Synthetic SFCW survey over a homogeneous lossy half-space.
///
/// Trace i (at x = i*trace_spacing) is
///   X_k = c_i exp(-j2pi f_k d)
///       + sum_t r_t exp(-j2pi f_k (tau_t + d)) exp(-beta f_k tau_t)
///       + noise_k
/// with tau_t = 2 sqrt(depth^2 + (x - x_pos)^2) sqrt(eps_r) / c0, d the
/// system delay and c_i = direct_coupling_amp * (1 + coupling_jitter * u_i),
/// u_i uniform in [-1, 1] drawn from (seed, i). Noise is circular complex
/// Gaussian with per-component standard deviation noise_sigma. With
/// system_rolloff > 0 the deterministic part is multiplied by a Tukey taper
/// over k.
struct SyntheticScene {
  SweepGrid grid;
  std::size_t n_traces = 1;
  double trace_spacing = 0.03;
  double epsilon_r = 10.0;
  double beta = 0.0;
  std::vector<Target> targets;
  double noise_sigma = 0.0;
  double direct_coupling_amp = 0.0;
  std::uint64_t seed = 0;
  // Cable/antenna delay common to every path. Defaults keep the bare model.
  double system_delay = 0.0;
  // Relative per-trace amplitude variation of the direct coupling.
  double coupling_jitter = 0.0;
  // Fraction of the band rolled off (raised cosine) at each edge by the
  // antenna/receiver response; applies to coupling and targets, not noise.
  double system_rolloff = 0.0;

  void validate() const;
  bool operator==(const SyntheticScene&) const = default;
};

/// Tukey taper value at frequency index k (1-based); 1 when rolloff is 0.
double system_response(const SyntheticScene& scene, std::size_t k);

double trace_position(const SyntheticScene& scene, std::size_t trace_index);

/// Two-way travel time from the antenna at trace_index to the target.
double two_way_time(const SyntheticScene& scene, const Target& target, std::size_t trace_index);

FrequencySweepTrace simulate_trace(const SyntheticScene& scene, std::size_t trace_index);

/// Parallel over traces; each trace depends only on (scene, index).
FrequencyBScan simulate_bscan(const SyntheticScene& scene);

/// The pinned scene every ordering/stability check runs on.
SyntheticScene reference_scene();

}  // namespace datff
