#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "datff/convert.hpp"
#include "datff/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace datff;

namespace {

SyntheticScene bare_scene() {
  SyntheticScene s;
  s.grid = default_grid();
  s.n_traces = 1;
  s.trace_spacing = 0.03;
  s.epsilon_r = 10.0;
  return s;
}

std::size_t argmax_abs(const std::vector<cplx>& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[best])) best = i;
  return best;
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("empty scene gives an all-zero trace") {
    const auto t = simulate_trace(bare_scene(), 0);
    for (const auto& z : t.samples()) CHECK(z == cplx(0.0, 0.0));
  }

  TEST_CASE("travel time matches the geometry oracle") {
    auto s = bare_scene();
    s.n_traces = 50;
    const Target tgt{0.45, 0.7, 1.0};
    for (std::size_t i : {0u, 10u, 15u, 49u}) {
      const double dx = 0.03 * double(i) - 0.45;
      CHECK(two_way_time(s, tgt, i) == doctest::Approx(oracle::two_way(0.7, dx, 10.0)).epsilon(1e-14));
    }
    CHECK(trace_position(s, 7) == doctest::Approx(0.21));
  }

  TEST_CASE("target straight below peaks at the sample nearest its delay") {
    auto s = bare_scene();
    s.targets = {{0.0, 0.5, 1.0}};
    const double tau = oracle::two_way(0.5, 0.0, 10.0);
    CHECK(tau == doctest::Approx(10.54e-9).epsilon(1e-3));
    const auto x = inverse_dft(simulate_trace(s, 0));
    const double n_exact = tau / s.grid.time_step();
    const double n_peak = double(argmax_abs(x) + 1);  // sample j is n = j + 1
    CHECK(std::abs(n_peak - n_exact) <= 0.5);
  }

  TEST_CASE("peak locus follows the hyperbola") {
    auto s = bare_scene();
    s.n_traces = 61;
    s.targets = {{0.9, 0.4, 1.0}};
    const auto b = simulate_bscan(s);
    const double ts = s.grid.time_step();
    std::vector<double> peaks;
    for (std::size_t i = 0; i < s.n_traces; ++i) {
      const auto x = inverse_dft(b.trace(i));
      const double n_peak = double(argmax_abs(x) + 1);
      const double n_exact = oracle::two_way(0.4, 0.03 * double(i) - 0.9, 10.0) / ts;
      CHECK(std::abs(n_peak - n_exact) <= 1.0);
      peaks.push_back(n_peak);
    }
    // The apex is the middle of the run of earliest peaks.
    const double first = *std::min_element(peaks.begin(), peaks.end());
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < peaks.size(); ++i)
      if (peaks[i] == first) {
        if (hi == 0) lo = i;
        hi = i;
      }
    const double earliest = 0.5 * double(lo + hi);
    CHECK(std::abs(double(earliest) - 30.0) <= 1.0);
  }

  TEST_CASE("noise power is 2 sigma^2") {
    auto s = bare_scene();
    s.n_traces = 120;
    s.noise_sigma = 0.3;
    s.seed = 99;
    const auto b = simulate_bscan(s);
    double p = 0.0;
    std::size_t count = 0;
    for (const auto& t : b.traces())
      for (const auto& z : t.samples()) {
        p += std::norm(z);
        ++count;
      }
    REQUIRE(count >= 100000);
    p /= double(count);
    CHECK(std::abs(p - 2.0 * 0.09) <= 0.05 * 2.0 * 0.09);
  }

  TEST_CASE("same seed reproduces the scan byte for byte") {
    const auto s = reference_scene();
    const auto a = simulate_bscan(s);
    const auto b = simulate_bscan(s);
    for (std::size_t i = 0; i < a.n_traces(); ++i)
      CHECK(std::memcmp(a.trace(i).samples().data(), b.trace(i).samples().data(),
                        a.grid().n_freq * sizeof(cplx)) == 0);
    // Traces are independent of how many others are simulated.
    auto shorter = s;
    shorter.n_traces = 10;
    CHECK(oracle::rel_err(simulate_trace(shorter, 9).samples(), a.trace(9).samples()) == 0.0);
  }

  TEST_CASE("seed changes the noise only") {
    auto s = reference_scene();
    s.coupling_jitter = 0.0;
    auto quiet = s;
    quiet.noise_sigma = 0.0;
    auto reseeded = s;
    reseeded.seed = s.seed + 1;
    auto quiet_reseeded = quiet;
    quiet_reseeded.seed = reseeded.seed;

    const std::size_t i = 17;
    const auto clean_a = simulate_trace(quiet, i);
    const auto clean_b = simulate_trace(quiet_reseeded, i);
    CHECK(oracle::rel_err(clean_a.samples(), clean_b.samples()) == 0.0);

    const auto noisy_a = simulate_trace(s, i);
    const auto noisy_b = simulate_trace(reseeded, i);
    std::vector<cplx> na(noisy_a.size()), nb(noisy_b.size());
    for (std::size_t k = 0; k < na.size(); ++k) {
      na[k] = noisy_a.samples()[k] - clean_a.samples()[k];
      nb[k] = noisy_b.samples()[k] - clean_b.samples()[k];
    }
    CHECK(oracle::rel_err(na, nb) > 0.5);
  }

  TEST_CASE("doubling reflectivities doubles the noiseless trace exactly") {
    auto s = bare_scene();
    s.n_traces = 5;
    s.beta = 0.1;
    s.targets = {{0.03, 0.3, 0.7}, {0.09, 0.8, 0.2}};
    auto twice = s;
    for (auto& t : twice.targets) t.reflectivity *= 2.0;
    for (std::size_t i = 0; i < s.n_traces; ++i) {
      const auto a = simulate_trace(s, i);
      const auto b = simulate_trace(twice, i);
      for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(b.samples()[k] == 2.0 * a.samples()[k]);
    }
  }

  TEST_CASE("attenuation makes target magnitude strictly decreasing in frequency") {
    auto s = bare_scene();
    s.beta = 0.05;
    s.targets = {{0.0, 0.6, 1.0}};
    const auto t = simulate_trace(s, 0);
    const double tau = oracle::two_way(0.6, 0.0, 10.0);
    for (std::size_t k = 2; k <= t.size(); ++k) REQUIRE(std::abs(t(k)) < std::abs(t(k - 1)));
    CHECK(std::abs(t(1)) == doctest::Approx(std::exp(-0.05 * 0.25e9 * tau)).epsilon(1e-12));
  }

  TEST_CASE("coupling: delay and per-trace jitter") {
    auto s = bare_scene();
    s.n_traces = 30;
    s.direct_coupling_amp = 2.0;
    s.system_delay = 5.0 * s.grid.time_step();
    s.coupling_jitter = 0.1;
    s.seed = 3;
    for (std::size_t i = 0; i < s.n_traces; ++i) {
      const auto x = inverse_dft(simulate_trace(s, i));
      CHECK(argmax_abs(x) + 1 == 5);
      const double gain = std::abs(x[4]) / 2.0;
      CHECK(gain >= 0.9 - 1e-12);
      CHECK(gain <= 1.1 + 1e-12);
    }
    // Without jitter the coupling is the flat constant.
    s.coupling_jitter = 0.0;
    s.system_delay = 0.0;
    const auto flat = simulate_trace(s, 4);
    for (const auto& z : flat.samples()) CHECK(z == cplx(2.0, 0.0));
  }

  TEST_CASE("system response is a symmetric Tukey taper") {
    auto s = bare_scene();
    CHECK(system_response(s, 1) == 1.0);
    s.system_rolloff = 0.1;  // 100 indices each side
    CHECK(system_response(s, 1) == 0.0);
    CHECK(system_response(s, 1001) == 0.0);
    CHECK(system_response(s, 51) == doctest::Approx(0.5));
    CHECK(system_response(s, 951) == doctest::Approx(0.5));
    CHECK(system_response(s, 101) == 1.0);
    CHECK(system_response(s, 500) == 1.0);
    for (std::size_t k = 1; k <= 1001; ++k) REQUIRE(system_response(s, k) == system_response(s, 1002 - k));
    CHECK_THROWS(system_response(s, 0));

    s.direct_coupling_amp = 1.0;
    const auto t = simulate_trace(s, 0);
    CHECK(t(1) == cplx(0.0, 0.0));
    CHECK(t(500) == cplx(1.0, 0.0));
  }

  TEST_CASE("scene validation") {
    auto bad = [](auto mutate) {
      auto s = bare_scene();
      mutate(s);
      return s;
    };
    CHECK_THROWS(bad([](SyntheticScene& s) { s.epsilon_r = 0.5; }).validate());
    CHECK_THROWS(bad([](SyntheticScene& s) { s.beta = -1.0; }).validate());
    CHECK_THROWS(bad([](SyntheticScene& s) { s.noise_sigma = -0.1; }).validate());
    CHECK_THROWS(bad([](SyntheticScene& s) { s.targets = {{0.0, 0.0, 1.0}}; }).validate());
    CHECK_THROWS(bad([](SyntheticScene& s) { s.system_rolloff = 0.6; }).validate());
    CHECK_THROWS(bad([](SyntheticScene& s) { s.n_traces = 0; }).validate());
    CHECK_THROWS(simulate_trace(bare_scene(), 1));
  }

  TEST_CASE("reference scene: every trace sees a target inside the analysed window") {
    const auto s = reference_scene();
    CHECK_NOTHROW(s.validate());
    const double window = 18e-9;  // nine 13-sample STFT blocks
    for (std::size_t i = 0; i < s.n_traces; ++i) {
      double nearest = 1.0;
      for (const auto& t : s.targets) nearest = std::min(nearest, two_way_time(s, t, i));
      REQUIRE(nearest < window);
    }
  }
}
