#include "datff/convert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace datff {

namespace {

// Re-anchor the twiddle recurrence every kAnchor steps so the drift stays at a
// few tens of ulps regardless of N.
constexpr std::size_t kAnchor = 64;

// exp((-alpha + j2pi) * m / N) with the phase reduced modulo N first.
cplx twiddle(double alpha, std::size_t m, std::size_t n_freq) {
  const double N = static_cast<double>(n_freq);
  const double mag = std::exp(-alpha * static_cast<double>(m) / N);
  const double phase = 2.0 * kPi * static_cast<double>(m % n_freq) / N;
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

std::size_t clamp_cutoff(double raw, std::size_t n_freq) {
  if (!(raw >= 1.0)) return 1;  // also catches NaN
  if (raw >= static_cast<double>(n_freq)) return n_freq;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw)));
}

}  // namespace

std::string_view to_string(Taper t) { return t == Taper::flat ? "flat" : "attenuated"; }

Taper parse_taper(std::string_view s) {
  if (s == "attenuated") return Taper::attenuated;
  if (s == "flat") return Taper::flat;
  throw std::invalid_argument("unknown taper '" + std::string(s) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::idft: return "idft";
    case Method::isdft: return "isdft";
    case Method::datff: return "datff";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "idft") return Method::idft;
  if (s == "isdft") return Method::isdft;
  if (s == "datff") return Method::datff;
  throw std::invalid_argument("unknown conversion method '" + std::string(s) + "'");
}

double FilterWindow::weight(std::size_t n, std::size_t k) const {
  if (k > K(n)) return 0.0;
  if (taper == Taper::flat) return 1.0;
  return std::exp(-alpha * static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(n_freq));
}

void FilterWindow::validate() const {
  if (n_freq < 1 || n_time < 1) throw std::invalid_argument("FilterWindow: empty extent");
  if (cutoff.size() != n_time) throw std::invalid_argument("FilterWindow: cutoff length != n_time");
  if (!(gamma < 0.0)) throw std::invalid_argument("FilterWindow: gamma must be negative");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("FilterWindow: alpha must be >= 0");
  if (!(w_threshold > 0.0 && w_threshold < 1.0))
    throw std::invalid_argument("FilterWindow: w_threshold must lie in (0, 1)");
  for (std::size_t i = 0; i < n_time; ++i) {
    if (cutoff[i] < 1 || cutoff[i] > n_freq) throw std::invalid_argument("FilterWindow: K_n outside [1, N]");
    if (i > 0 && cutoff[i] > cutoff[i - 1]) throw std::invalid_argument("FilterWindow: K_n must be non-increasing");
  }
}

namespace kernel {

void attenuated_sum(std::span<const cplx> spectrum, double alpha, std::span<const std::size_t> cutoff,
                    std::span<cplx> out, bool parallel) {
  const std::size_t N = spectrum.size();
  const std::size_t n_time = out.size();
  if (!cutoff.empty() && cutoff.size() < n_time) throw std::invalid_argument("attenuated_sum: short cutoff");
  const double inv_n = 1.0 / static_cast<double>(N);
  const cplx* X = spectrum.data();

#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t ni = 0; ni < static_cast<std::ptrdiff_t>(n_time); ++ni) {
    const std::size_t n = static_cast<std::size_t>(ni) + 1;
    const std::size_t K = cutoff.empty() ? N : std::min(cutoff[ni], N);
    const cplx step = twiddle(alpha, n, N);
    const double sr = step.real();
    const double si = step.imag();
    double acc_r = 0.0;
    double acc_i = 0.0;
    for (std::size_t k0 = 1; k0 <= K; k0 += kAnchor) {
      const std::size_t k1 = std::min(K, k0 + kAnchor - 1);
      const cplx w0 = twiddle(alpha, k0 * n, N);
      double wr = w0.real();
      double wi = w0.imag();
      for (std::size_t k = k0; k <= k1; ++k) {
        const double xr = X[k - 1].real();
        const double xi = X[k - 1].imag();
        acc_r += xr * wr - xi * wi;
        acc_i += xr * wi + xi * wr;
        const double tr = wr * sr - wi * si;
        wi = wr * si + wi * sr;
        wr = tr;
      }
    }
    out[ni] = cplx(acc_r * inv_n, acc_i * inv_n);
  }
}

}  // namespace kernel

std::vector<cplx> attenuated_idft(const FrequencySweepTrace& trace, double alpha, std::size_t n_time) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("attenuated_idft: alpha must be >= 0");
  const std::size_t N = trace.size();
  if (n_time == 0) n_time = N;
  std::vector<cplx> out(n_time);
  kernel::attenuated_sum(trace.samples(), alpha, {}, out, true);
  return out;
}

std::vector<cplx> inverse_dft(const FrequencySweepTrace& trace, std::size_t n_time) {
  return attenuated_idft(trace, 0.0, n_time);
}

std::vector<cplx> windowed_convert(const FrequencySweepTrace& trace, const FilterWindow& window) {
  if (window.n_freq != trace.size())
    throw std::invalid_argument("windowed_convert: window n_freq " + std::to_string(window.n_freq) +
                                " != trace length " + std::to_string(trace.size()));
  std::vector<cplx> out(window.n_time);
  const double alpha = window.taper == Taper::flat ? 0.0 : window.alpha;
  kernel::attenuated_sum(trace.samples(), alpha, window.cutoff, out, true);
  return out;
}

FilterWindow build_isdft_window(double alpha, double w_threshold, std::size_t n_freq, std::size_t n_time) {
  if (!(alpha > 0.0)) throw std::invalid_argument("build_isdft_window: alpha must be > 0");
  if (!(w_threshold > 0.0 && w_threshold < 1.0))
    throw std::invalid_argument("build_isdft_window: w_threshold must lie in (0, 1)");
  FilterWindow w;
  w.n_freq = n_freq;
  w.n_time = n_time;
  w.alpha = alpha;
  w.w_threshold = w_threshold;
  w.gamma = alpha / std::log(w_threshold);
  w.taper = Taper::attenuated;
  w.cutoff.resize(n_time);
  const double numer = static_cast<double>(n_freq) * std::log(1.0 / w_threshold) / alpha;
  for (std::size_t n = 1; n <= n_time; ++n) w.cutoff[n - 1] = clamp_cutoff(numer / static_cast<double>(n), n_freq);
  return w;
}

FilterWindow full_band_window(std::size_t n_freq, std::size_t n_time) {
  FilterWindow w;
  w.n_freq = n_freq;
  w.n_time = n_time;
  // gamma -> 0- is the limit in which K_n = -N/(gamma n) saturates at N.
  w.gamma = -std::numeric_limits<double>::denorm_min();
  w.alpha = 0.0;
  w.w_threshold = 0.5;
  w.taper = Taper::flat;
  w.cutoff.assign(n_time, n_freq);
  return w;
}

TimeBScan convert_bscan(const FrequencyBScan& bscan, const ConversionMethod& method, std::size_t n_time) {
  const std::size_t N = bscan.grid().n_freq;
  std::vector<std::size_t> cutoff;
  double alpha = 0.0;

  switch (method.kind) {
    case Method::idft:
      if (n_time == 0) n_time = N;
      break;
    case Method::isdft: {
      if (n_time == 0) n_time = N;
      auto w = build_isdft_window(method.alpha, method.w_threshold, N, n_time);
      cutoff = std::move(w.cutoff);
      alpha = w.alpha;
      break;
    }
    case Method::datff: {
      if (!method.window) throw std::invalid_argument("convert_bscan: datff requires a window");
      const auto& w = *method.window;
      if (w.n_freq != N)
        throw std::invalid_argument("convert_bscan: window grid (N=" + std::to_string(w.n_freq) +
                                    ") does not match B-scan grid (N=" + std::to_string(N) + ")");
      w.validate();
      if (n_time == 0) n_time = w.n_time;
      if (n_time > w.n_time) throw std::invalid_argument("convert_bscan: n_time exceeds window extent");
      cutoff.assign(w.cutoff.begin(), w.cutoff.begin() + static_cast<std::ptrdiff_t>(n_time));
      alpha = w.taper == Taper::flat ? 0.0 : w.alpha;
      break;
    }
  }
  if (n_time > N) throw std::invalid_argument("convert_bscan: n_time exceeds n_freq");

  const std::size_t n_traces = bscan.n_traces();
  std::vector<cplx> out(n_traces * n_time);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_traces); ++i) {
    std::span<cplx> dst(out.data() + static_cast<std::size_t>(i) * n_time, n_time);
    kernel::attenuated_sum(bscan.trace(static_cast<std::size_t>(i)).samples(), alpha, cutoff, dst, false);
  }
  const double ts = bscan.grid().time_step();
  return TimeBScan(ts, bscan.trace_spacing(), n_traces, n_time, std::move(out), ts);
}

}  // namespace datff
