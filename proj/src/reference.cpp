#include "datff/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace datff::reference {

namespace {

cplx literal_sum(std::span<const cplx> X, double alpha, std::size_t n, std::size_t K) {
  const double N = static_cast<double>(X.size());
  cplx acc{0.0, 0.0};
  for (std::size_t k = 1; k <= K; ++k) {
    const double kn = static_cast<double>(k) * static_cast<double>(n);
    acc += X[k - 1] * std::exp(cplx(-alpha, 2.0 * kPi) * kn / N);
  }
  return acc / N;
}

}  // namespace

std::vector<cplx> attenuated_idft(const FrequencySweepTrace& trace, double alpha, std::size_t n_time) {
  const std::size_t N = trace.size();
  if (n_time == 0) n_time = N;
  std::vector<cplx> out(n_time);
  for (std::size_t n = 1; n <= n_time; ++n) out[n - 1] = literal_sum(trace.samples(), alpha, n, N);
  return out;
}

std::vector<cplx> windowed_convert(const FrequencySweepTrace& trace, const FilterWindow& window) {
  if (window.n_freq != trace.size()) throw std::invalid_argument("reference::windowed_convert: grid mismatch");
  const double alpha = window.taper == Taper::flat ? 0.0 : window.alpha;
  std::vector<cplx> out(window.n_time);
  for (std::size_t n = 1; n <= window.n_time; ++n)
    out[n - 1] = literal_sum(trace.samples(), alpha, n, window.K(n));
  return out;
}

TimeBScan convert_bscan(const FrequencyBScan& bscan, const ConversionMethod& method, std::size_t n_time) {
  const std::size_t N = bscan.grid().n_freq;
  FilterWindow window;
  switch (method.kind) {
    case Method::idft:
      window = full_band_window(N, n_time == 0 ? N : n_time);
      break;
    case Method::isdft:
      window = build_isdft_window(method.alpha, method.w_threshold, N, n_time == 0 ? N : n_time);
      break;
    case Method::datff:
      if (!method.window) throw std::invalid_argument("reference::convert_bscan: datff requires a window");
      window = *method.window;
      if (window.n_freq != N) throw std::invalid_argument("reference::convert_bscan: grid mismatch");
      if (n_time != 0) {
        window.cutoff.resize(n_time);
        window.n_time = n_time;
      }
      break;
  }
  std::vector<cplx> out;
  out.reserve(bscan.n_traces() * window.n_time);
  for (const auto& t : bscan.traces()) {
    auto x = reference::windowed_convert(t, window);
    out.insert(out.end(), x.begin(), x.end());
  }
  const double ts = bscan.grid().time_step();
  return TimeBScan(ts, bscan.trace_spacing(), bscan.n_traces(), window.n_time, std::move(out), ts);
}

}  // namespace datff::reference
