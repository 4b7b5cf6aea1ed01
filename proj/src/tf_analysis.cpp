#include "datff/tf_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace datff {

StftConfig StftConfig::resolved(std::size_t n_crop) const {
  StftConfig c = *this;
  if (c.window_len == 0) c.window_len = std::max<std::size_t>(1, (n_crop + 9) / 10);
  if (c.hop == 0) c.hop = c.window_len;
  c.validate(n_crop);
  return c;
}

void StftConfig::validate(std::size_t n_crop) const {
  if (window_len < 1 || window_len > n_crop)
    throw std::invalid_argument("StftConfig: window_len must lie in [1, " + std::to_string(n_crop) + "]");
  if (hop < 1 || hop > window_len) throw std::invalid_argument("StftConfig: hop must lie in [1, window_len]");
  if (!(magnitude_floor > 0.0 && magnitude_floor < 1.0))
    throw std::invalid_argument("StftConfig: magnitude_floor must lie in (0, 1)");
}

double StftMatrix::max_magnitude() const {
  return magnitudes.empty() ? 0.0 : *std::max_element(magnitudes.begin(), magnitudes.end());
}

std::vector<double> hamming(std::size_t L) {
  if (L == 1) return {1.0};
  std::vector<double> w(L);
  for (std::size_t m = 0; m < L; ++m)
    w[m] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(m) / static_cast<double>(L - 1));
  return w;
}

StftMatrix stft(std::span<const cplx> trace, const StftConfig& cfg_in, const StftAxes& axes) {
  const StftConfig cfg = cfg_in.resolved(trace.size());
  const std::size_t L = cfg.window_len;
  const auto win = hamming(L);

  std::vector<cplx> twiddle(L);
  for (std::size_t m = 0; m < L; ++m)
    twiddle[m] = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / static_cast<double>(L));

  StftMatrix out;
  out.n_freq_bins = L;
  for (std::size_t t = 0; t + L <= trace.size(); t += cfg.hop) out.block_start.push_back(t);
  out.n_time_bins = out.block_start.size();
  out.magnitudes.resize(out.n_time_bins * L);

  std::vector<cplx> block(L);
  for (std::size_t tb = 0; tb < out.n_time_bins; ++tb) {
    const std::size_t t0 = out.block_start[tb];
    for (std::size_t m = 0; m < L; ++m) block[m] = trace[t0 + m] * win[m];
    for (std::size_t b = 0; b < L; ++b) {
      cplx acc{0.0, 0.0};
      for (std::size_t m = 0; m < L; ++m) acc += block[m] * twiddle[(b * m) % L];
      out.magnitudes[tb * L + b] = std::abs(acc);
    }
    out.time_centers.push_back(axes.first_sample_time +
                               (static_cast<double>(t0) + 0.5 * static_cast<double>(L - 1)) * axes.time_step);
  }
  const double bin_width = 1.0 / (axes.time_step * static_cast<double>(L));
  for (std::size_t b = 0; b < L; ++b) out.bin_frequencies.push_back(axes.f_start + static_cast<double>(b) * bin_width);
  return out;
}

std::uint64_t OccurrenceHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

namespace {

void accumulate_occupancy(const StftMatrix& s, double floor_fraction, std::vector<std::uint32_t>& counts) {
  const double level = floor_fraction * s.max_magnitude();
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i)
    if (s.magnitudes[i] > level) ++counts[i];
}

}  // namespace

OccurrenceHistogram occurrence_histogram(std::span<const StftMatrix> stfts, const StftConfig& cfg) {
  if (stfts.empty()) throw std::invalid_argument("occurrence_histogram: no STFTs");
  OccurrenceHistogram h;
  h.n_time_bins = stfts.front().n_time_bins;
  h.n_freq_bins = stfts.front().n_freq_bins;
  h.n_traces = stfts.size();
  h.config = cfg;
  h.block_start = stfts.front().block_start;
  h.counts.assign(h.n_time_bins * h.n_freq_bins, 0);
  for (const auto& s : stfts) {
    if (s.n_time_bins != h.n_time_bins || s.n_freq_bins != h.n_freq_bins || s.block_start != h.block_start)
      throw std::invalid_argument("occurrence_histogram: STFT shape mismatch");
    accumulate_occupancy(s, cfg.magnitude_floor, h.counts);
  }
  return h;
}

OccurrenceHistogram bscan_histogram(const TimeBScan& bscan, const StftConfig& cfg_in) {
  const StftConfig cfg = cfg_in.resolved(bscan.n_time());
  const StftAxes axes{bscan.time_step(), bscan.time_zero_offset(), 0.0};
  const std::size_t n_traces = bscan.n_traces();

  // Per-trace STFTs in parallel; the integer reduction runs in trace order.
  std::vector<StftMatrix> stfts(n_traces);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_traces); ++i)
    stfts[static_cast<std::size_t>(i)] = stft(bscan.trace(static_cast<std::size_t>(i)), cfg, axes);
  return occurrence_histogram(stfts, cfg);
}

std::vector<BoundaryPoint> boundary_points(const OccurrenceHistogram& hist, std::size_t m, double ci,
                                           const BoundaryGrid& grid) {
  if (m < 1) throw std::invalid_argument("boundary_points: m must be >= 1");
  if (!(ci > 0.0 && ci < 1.0)) throw std::invalid_argument("boundary_points: ci must lie in (0, 1)");
  if (grid.n_freq < 1) throw std::invalid_argument("boundary_points: n_freq must be >= 1");
  const std::size_t T = hist.n_time_bins;
  const std::size_t B = hist.n_freq_bins;
  if (T == 0 || B == 0) throw Error("boundary_points: no occupied time-frequency cells");
  const std::size_t L = hist.config.window_len;

  std::vector<BoundaryPoint> points;
  std::vector<std::uint64_t> marginal(B);
  std::size_t t = 0;
  for (std::size_t i = 0; i < m; ++i) {
    // Bin t belongs to interval floor(t*m/T).
    const std::size_t first_bin = t;
    while (t < T && (t * m) / T == i) ++t;
    if (t == first_bin) continue;
    const std::size_t last_bin = t - 1;

    std::fill(marginal.begin(), marginal.end(), 0);
    std::uint64_t total = 0;
    for (std::size_t tb = first_bin; tb <= last_bin; ++tb)
      for (std::size_t b = 0; b < B; ++b) {
        marginal[b] += hist.at(tb, b);
        total += hist.at(tb, b);
      }
    if (total == 0) continue;

    const double target = ci * static_cast<double>(total);
    std::uint64_t cum = 0;
    std::size_t edge = B - 1;
    for (std::size_t b = 0; b < B; ++b) {
      cum += marginal[b];
      if (static_cast<double>(cum) >= target) {
        edge = b;
        break;
      }
    }
    const auto k_raw = std::lround(static_cast<double>(edge) * static_cast<double>(grid.n_freq) / static_cast<double>(B));
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max<long>(k_raw, 1)), 1, grid.n_freq);

    const std::size_t s_first = hist.block_start[first_bin];
    const std::size_t s_last = hist.block_start[last_bin] + L - 1;
    const std::size_t mid = (s_first + s_last + 1) / 2;
    points.push_back({grid.first_index + mid, k, static_cast<double>(total)});
  }
  if (points.empty()) throw Error("boundary_points: no occupied time-frequency cells");
  return points;
}

std::size_t conversion_index_of_first_sample(const TimeBScan& bscan) {
  const double idx = std::round(bscan.time_zero_offset() / bscan.time_step());
  return idx < 1.0 ? 1 : static_cast<std::size_t>(idx);
}

}  // namespace datff
