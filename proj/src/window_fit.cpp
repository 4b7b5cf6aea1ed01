#include "datff/window_fit.hpp"

#include <cmath>
#include <stdexcept>

namespace datff {

namespace {

double boundary_term(const BoundaryPoint& p, std::size_t n_freq) {
  return static_cast<double>(n_freq) / (static_cast<double>(p.k) * static_cast<double>(p.n));
}

}  // namespace

double wlr_objective(std::span<const BoundaryPoint> points, std::size_t n_freq, double gamma) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double r = gamma + boundary_term(p, n_freq);
    sum += r * r * p.weight;
  }
  return sum;
}

FitResult fit_gamma(std::span<const BoundaryPoint> points, std::size_t n_freq) {
  FitResult fit;
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : points) {
    if (p.k < 1 || p.n < 1) throw std::invalid_argument("fit_gamma: boundary indices must be >= 1");
    if (!(p.weight >= 0.0)) throw std::invalid_argument("fit_gamma: negative weight");
    if (p.weight == 0.0) continue;
    num += boundary_term(p, n_freq) * p.weight;
    den += p.weight;
    fit.points_used.push_back(p);
  }
  if (den == 0.0) throw Error("fit_gamma: all boundary weights are zero");
  fit.gamma = -num / den;
  fit.residual = wlr_objective(fit.points_used, n_freq, fit.gamma);
  return fit;
}

FilterWindow build_datff_window(const FitResult& fit, double w_threshold, std::size_t n_freq, std::size_t n_time,
                                Taper taper) {
  if (!(fit.gamma < 0.0)) throw Error("build_datff_window: fitted gamma must be negative");
  if (!(w_threshold > 0.0 && w_threshold < 1.0))
    throw std::invalid_argument("build_datff_window: w_threshold must lie in (0, 1)");
  if (n_freq < 1 || n_time < 1) throw std::invalid_argument("build_datff_window: empty extent");

  FilterWindow w;
  w.n_freq = n_freq;
  w.n_time = n_time;
  w.gamma = fit.gamma;
  w.alpha = fit.gamma * std::log(w_threshold);
  w.w_threshold = w_threshold;
  w.taper = taper;
  w.cutoff.resize(n_time);
  const double N = static_cast<double>(n_freq);
  for (std::size_t n = 1; n <= n_time; ++n) {
    const double raw = -N / (fit.gamma * static_cast<double>(n));
    std::size_t K = n_freq;
    if (raw < N) K = raw < 1.0 ? 1 : static_cast<std::size_t>(std::floor(raw));
    w.cutoff[n - 1] = K;
  }
  return w;
}

}  // namespace datff
