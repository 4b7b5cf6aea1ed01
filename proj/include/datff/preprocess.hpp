#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "datff/types.hpp"

namespace datff {

enum class BackgroundMethod { none, svd, ms };

std::string_view to_string(BackgroundMethod m);
BackgroundMethod parse_background(std::string_view s);

struct PreprocessConfig {
  double time_zero_threshold = 0.3;  // fraction of each trace's peak magnitude
  BackgroundMethod background_method = BackgroundMethod::svd;
  std::size_t svd_rank_removed = 1;

  void validate() const;
};

/// Subtracts the complex mean of the sweep.
FrequencySweepTrace dc_remove(const FrequencySweepTrace& trace);
FrequencyBScan dc_remove(const FrequencyBScan& bscan);

/// Median (over non-zero traces) of the first sample index whose magnitude
/// reaches threshold * that trace's peak. Throws if every trace is zero.
std::size_t detect_time_zero(const TimeBScan& bscan, double threshold);

/// Moves every trace `shift` samples earlier, zero-filling the tail, and
/// advances time_zero_offset accordingly.
TimeBScan shift_time_zero(const TimeBScan& bscan, std::size_t shift);

TimeBScan time_zero_correct(const TimeBScan& bscan, const PreprocessConfig& cfg);

/// Leading right-singular subspace of the traces x time matrix. Applying it
/// subtracts X V V^H, i.e. the best rank-r approximation of the matrix it was
/// fitted on.
class SvdBackground {
 public:
  static SvdBackground fit(const TimeBScan& bscan, std::size_t rank);

  TimeBScan apply(const TimeBScan& bscan) const;
  std::size_t rank() const { return rank_; }
  std::size_t n_time() const { return n_time_; }
  const std::vector<double>& singular_values() const { return singular_values_; }

 private:
  std::size_t rank_ = 0;
  std::size_t n_time_ = 0;
  std::vector<cplx> basis_;  // n_time x rank, column-major
  std::vector<double> singular_values_;
};

/// Removes the leading `rank` singular components.
TimeBScan background_remove_svd(const TimeBScan& bscan, std::size_t rank);

/// Subtracts the across-trace mean trace.
TimeBScan background_remove_ms(const TimeBScan& bscan);

TimeBScan background_remove(const TimeBScan& bscan, BackgroundMethod method, std::size_t svd_rank = 1);

}  // namespace datff
