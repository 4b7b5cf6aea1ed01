#include "datff/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace datff {

namespace {

// Independent stream per (seed, trace, purpose).
std::mt19937_64 stream(std::uint64_t seed, std::size_t trace_index, std::uint32_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trace_index), static_cast<std::uint32_t>(trace_index >> 32), purpose};
  return std::mt19937_64(seq);
}

cplx unit_phasor(double cycles) {
  // cycles may be large; reduce before calling sin/cos.
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, -2.0 * kPi * frac);
}

}  // namespace

void SyntheticScene::validate() const {
  grid.validate();
  if (n_traces < 1) throw std::invalid_argument("SyntheticScene: n_traces must be >= 1");
  if (!(trace_spacing > 0.0)) throw std::invalid_argument("SyntheticScene: trace_spacing must be > 0");
  if (!(epsilon_r >= 1.0)) throw std::invalid_argument("SyntheticScene: epsilon_r must be >= 1");
  if (!(beta >= 0.0)) throw std::invalid_argument("SyntheticScene: beta must be >= 0");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("SyntheticScene: noise_sigma must be >= 0");
  if (!(system_delay >= 0.0)) throw std::invalid_argument("SyntheticScene: system_delay must be >= 0");
  if (!(coupling_jitter >= 0.0)) throw std::invalid_argument("SyntheticScene: coupling_jitter must be >= 0");
  if (!(system_rolloff >= 0.0 && system_rolloff <= 0.5))
    throw std::invalid_argument("SyntheticScene: system_rolloff must lie in [0, 0.5]");
  for (const auto& t : targets)
    if (!(t.depth > 0.0)) throw std::invalid_argument("SyntheticScene: target depth must be > 0");
}

double system_response(const SyntheticScene& scene, std::size_t k) {
  const std::size_t N = scene.grid.n_freq;
  if (k < 1 || k > N) throw std::invalid_argument("system_response: k out of range");
  if (scene.system_rolloff <= 0.0 || N < 2) return 1.0;
  const double span = scene.system_rolloff * static_cast<double>(N - 1);
  const double edge = static_cast<double>(std::min(k - 1, N - k));
  if (edge >= span) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * edge / span));
}

double trace_position(const SyntheticScene& scene, std::size_t trace_index) {
  return static_cast<double>(trace_index) * scene.trace_spacing;
}

double two_way_time(const SyntheticScene& scene, const Target& target, std::size_t trace_index) {
  const double dx = trace_position(scene, trace_index) - target.x_pos;
  return 2.0 * std::hypot(target.depth, dx) * std::sqrt(scene.epsilon_r) / kSpeedOfLight;
}

FrequencySweepTrace simulate_trace(const SyntheticScene& scene, std::size_t trace_index) {
  scene.validate();
  if (trace_index >= scene.n_traces) throw std::invalid_argument("simulate_trace: trace_index out of range");
  const auto& g = scene.grid;
  std::vector<cplx> X(g.n_freq, cplx{0.0, 0.0});

  if (scene.direct_coupling_amp != 0.0) {
    double gain = 1.0;
    if (scene.coupling_jitter > 0.0) {
      auto rng = stream(scene.seed, trace_index, 0);
      gain += scene.coupling_jitter * std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    }
    const double amp = scene.direct_coupling_amp * gain;
    for (std::size_t k = 1; k <= g.n_freq; ++k) X[k - 1] += amp * unit_phasor(g.frequency(k) * scene.system_delay);
  }

  for (const auto& t : scene.targets) {
    const double tau = two_way_time(scene, t, trace_index);
    for (std::size_t k = 1; k <= g.n_freq; ++k) {
      const double f = g.frequency(k);
      X[k - 1] += t.reflectivity * std::exp(-scene.beta * f * tau) * unit_phasor(f * (tau + scene.system_delay));
    }
  }

  if (scene.system_rolloff > 0.0)
    for (std::size_t k = 1; k <= g.n_freq; ++k) X[k - 1] *= system_response(scene, k);

  if (scene.noise_sigma > 0.0) {
    auto rng = stream(scene.seed, trace_index, 1);
    std::normal_distribution<double> gauss(0.0, scene.noise_sigma);
    for (auto& z : X) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z += cplx(re, im);
    }
  }
  return FrequencySweepTrace(g, std::move(X));
}

FrequencyBScan simulate_bscan(const SyntheticScene& scene) {
  scene.validate();
  std::vector<std::vector<cplx>> raw(scene.n_traces);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(scene.n_traces); ++i) {
    auto t = simulate_trace(scene, static_cast<std::size_t>(i));
    raw[static_cast<std::size_t>(i)].assign(t.samples().begin(), t.samples().end());
  }
  std::vector<FrequencySweepTrace> traces;
  traces.reserve(scene.n_traces);
  for (auto& r : raw) traces.emplace_back(scene.grid, std::move(r));
  return FrequencyBScan(scene.grid, scene.trace_spacing, std::move(traces));
}

SyntheticScene reference_scene() {
  SyntheticScene s;
  s.grid = default_grid();
  s.n_traces = 120;
  s.trace_spacing = 0.03;
  s.epsilon_r = 10.0;
  s.beta = 0.2;
  // Every trace sees at least one target inside the analysed window.
  s.targets = {
      {0.6, 0.2, 1.0},
      {1.85, 0.6, 1.0},
      {3.0, 0.4, 1.0},
  };
  s.noise_sigma = 0.01;
  s.direct_coupling_amp = 3.0;
  s.seed = 20211103;
  s.system_delay = 3.0 * s.grid.time_step();
  s.coupling_jitter = 0.05;
  s.system_rolloff = 0.1;
  return s;
}

}  // namespace datff
