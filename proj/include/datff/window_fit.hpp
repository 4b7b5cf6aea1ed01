#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "datff/convert.hpp"
#include "datff/tf_analysis.hpp"

namespace datff {

struct FitResult {
  double gamma = 0.0;
  std::vector<BoundaryPoint> points_used;
  double residual = 0.0;
};

/// Weighted least-squares objective sum_i (gamma + N/(k_i n_i))^2 w_i.
double wlr_objective(std::span<const BoundaryPoint> points, std::size_t n_freq, double gamma);

/// Closed-form minimiser of wlr_objective: the weighted mean of -N/(k_i n_i).
/// Points with zero weight are ignored; throws if none carry weight.
FitResult fit_gamma(std::span<const BoundaryPoint> points, std::size_t n_freq);

/// Window whose cutoff follows the boundary k n = -N/gamma:
/// K_n = clamp(floor(-N/(gamma n)), 1, N), alpha = gamma ln(w_threshold).
FilterWindow build_datff_window(const FitResult& fit, double w_threshold, std::size_t n_freq, std::size_t n_time,
                                Taper taper = Taper::attenuated);

}  // namespace datff
