#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "datff/types.hpp"

namespace datff {

enum class Taper { attenuated, flat };

std::string_view to_string(Taper t);
Taper parse_taper(std::string_view s);

/// Time-frequency filter window H. For time index n = 1..n_time the samples
/// k = 1..cutoff[n-1] are kept, weighted by exp(-alpha*k*n/N) (attenuated
/// taper) or 1 (flat); everything above the cutoff is dropped.
struct FilterWindow {
  std::size_t n_freq = 0;
  std::size_t n_time = 0;
  double gamma = -1.0;
  double alpha = 0.0;
  double w_threshold = 0.5;
  std::vector<std::size_t> cutoff;  // K_n, index n-1
  Taper taper = Taper::attenuated;

  std::size_t K(std::size_t n) const { return cutoff[n - 1]; }
  double weight(std::size_t n, std::size_t k) const;

  /// 1 <= K_n <= N, K_n non-increasing, gamma < 0, alpha >= 0, 0 < w < 1.
  void validate() const;
  bool operator==(const FilterWindow&) const = default;
};

/// x_n = (1/N) sum_{k=1..N} X_k exp((-alpha + j2pi) k n / N), n = 1..n_time.
/// n_time = 0 selects N.
std::vector<cplx> attenuated_idft(const FrequencySweepTrace& trace, double alpha, std::size_t n_time = 0);

/// attenuated_idft with alpha = 0.
std::vector<cplx> inverse_dft(const FrequencySweepTrace& trace, std::size_t n_time = 0);

/// x_n = (1/N) sum_{k=1..K_n} X_k H_{n,k} exp(j2pi k n / N).
std::vector<cplx> windowed_convert(const FrequencySweepTrace& trace, const FilterWindow& window);

/// K_n = clamp(floor(N ln(1/w) / (alpha n)), 1, N): the largest k with
/// exp(-alpha k n / N) >= w.
FilterWindow build_isdft_window(double alpha, double w_threshold, std::size_t n_freq, std::size_t n_time);

/// K_n = N everywhere with a flat taper; reduces windowed_convert to the
/// inverse DFT.
FilterWindow full_band_window(std::size_t n_freq, std::size_t n_time);

enum class Method { idft, isdft, datff };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct ConversionMethod {
  Method kind = Method::idft;
  double alpha = 0.01;        // isdft
  double w_threshold = 0.5;   // isdft
  std::optional<FilterWindow> window;  // datff

  static ConversionMethod idft() { return {}; }
  static ConversionMethod isdft(double alpha, double w) { return {Method::isdft, alpha, w, std::nullopt}; }
  static ConversionMethod datff(FilterWindow w) { return {Method::datff, 0.0, w.w_threshold, std::move(w)}; }
};

/// Converts every trace (parallel over traces). n_time = 0 selects N, or the
/// window's n_time for datff.
TimeBScan convert_bscan(const FrequencyBScan& bscan, const ConversionMethod& method, std::size_t n_time = 0);

namespace kernel {

/// Shared inner loop: out[n-1] = (1/N) sum_{k=1..K_n} X_k exp((-alpha + j2pi) k n / N)
/// with K_n = cutoff[n-1] (or N when cutoff is empty). Parallel over n.
void attenuated_sum(std::span<const cplx> spectrum, double alpha, std::span<const std::size_t> cutoff,
                    std::span<cplx> out, bool parallel);

}  // namespace kernel

}  // namespace datff
