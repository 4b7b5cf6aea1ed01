#include <doctest.h>

#include <cmath>
#include <random>

#include "datff/convert.hpp"
#include "datff/reference.hpp"
#include "datff/synth.hpp"
#include "datff/window_fit.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace datff;
using testutil::small_grid;

namespace {

FrequencySweepTrace random_trace(std::size_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return FrequencySweepTrace(small_grid(N), oracle::random_spectrum(N, rng));
}

double energy(std::span<const cplx> x) {
  double e = 0.0;
  for (const auto& z : x) e += std::norm(z);
  return e;
}

FilterWindow gamma_window(double gamma, std::size_t N, std::size_t n_time, Taper taper = Taper::attenuated) {
  FitResult f;
  f.gamma = gamma;
  return build_datff_window(f, 0.5, N, n_time, taper);
}

}  // namespace

TEST_SUITE("spectral-convert") {
  TEST_CASE("all-ones spectrum peaks at n = N") {
    const FrequencySweepTrace t(small_grid(4), {1.0, 1.0, 1.0, 1.0});
    const auto x = attenuated_idft(t, 0.0);
    REQUIRE(x.size() == 4);
    for (int n = 0; n < 3; ++n) CHECK(std::abs(x[n]) < 1e-15);
    CHECK(std::abs(x[3] - cplx(1.0, 0.0)) < 1e-15);
  }

  TEST_CASE("single-term attenuated sum") {
    std::vector<cplx> X(8, cplx{});
    X[1] = 1.0;  // X_2
    const auto x = attenuated_idft(FrequencySweepTrace(small_grid(8), X), 0.5);
    for (std::size_t n = 1; n <= 8; ++n) CHECK(std::abs(x[n - 1]) == doctest::Approx(std::exp(-double(n) / 8.0) / 8.0));
    CHECK(std::abs(x[7]) == doctest::Approx(0.04599).epsilon(1e-4));
  }

  TEST_CASE("random 1001-point traces match the direct sum") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto t = random_trace(1001, seed);
      CHECK(oracle::rel_err(inverse_dft(t), oracle::direct_sum(t.samples(), 0.0, 1001)) < 1e-9);
      CHECK(oracle::rel_err(attenuated_idft(t, 0.01), oracle::direct_sum(t.samples(), 0.01, 1001)) < 1e-9);
    }
  }

  TEST_CASE("special cases collapse to the inverse DFT") {
    const auto t = random_trace(257, 4);
    const auto a = attenuated_idft(t, 0.0);
    const auto b = inverse_dft(t);
    const auto c = windowed_convert(t, full_band_window(257, 257));
    CHECK(oracle::rel_err(a, b) < 1e-12);
    CHECK(oracle::rel_err(c, b) < 1e-12);
    CHECK(oracle::rel_err(reference::attenuated_idft(t, 0.0), b) < 1e-12);
  }

  TEST_CASE("cutoff of one keeps only X_1") {
    auto X = random_trace(16, 5);
    std::vector<cplx> s(X.samples().begin(), X.samples().end());
    s[0] = 0.0;
    FilterWindow w = full_band_window(16, 16);
    w.cutoff.assign(16, 1);
    for (const auto& z : windowed_convert(FrequencySweepTrace(small_grid(16), s), w)) CHECK(z == cplx(0.0, 0.0));
  }

  TEST_CASE("gamma = -1 window on N = 8 matches the literal definition") {
    const auto t = random_trace(8, 6);
    for (Taper taper : {Taper::attenuated, Taper::flat}) {
      const auto w = gamma_window(-1.0, 8, 8, taper);
      const double alpha = taper == Taper::flat ? 0.0 : w.alpha;
      const auto expect = oracle::direct_sum(t.samples(), alpha, 8, w.cutoff);
      CHECK(oracle::rel_err(windowed_convert(t, w), expect) < 1e-12);
      CHECK(oracle::rel_err(reference::windowed_convert(t, w), expect) < 1e-12);
    }
  }

  TEST_CASE("isdft window closed form") {
    const auto w = build_isdft_window(0.01, 0.5, 1001, 1001);
    CHECK(w.K(139) == 499);
    CHECK(w.K(1) == 1001);
    CHECK(w.gamma == doctest::Approx(0.01 / std::log(0.5)));
    CHECK(w.taper == Taper::attenuated);
    CHECK_NOTHROW(w.validate());
    for (std::size_t n = 2; n <= 1001; ++n) {
      const std::size_t K = w.K(n);
      CHECK(K <= w.K(n - 1));
      if (K > 1 && K < 1001) {
        CHECK(std::exp(-0.01 * double(K) * double(n) / 1001.0) >= 0.5);
        CHECK(std::exp(-0.01 * double(K + 1) * double(n) / 1001.0) < 0.5);
      }
    }
    const auto near_one = build_isdft_window(0.01, 1.0 - 1e-9, 1001, 50);
    for (std::size_t n = 1; n <= 50; ++n) CHECK(near_one.K(n) == 1);
    CHECK_THROWS(build_isdft_window(0.0, 0.5, 1001, 10));
    CHECK_THROWS(build_isdft_window(0.01, 1.0, 1001, 10));
  }

  TEST_CASE("window validation") {
    auto w = gamma_window(-1.0, 8, 8);
    CHECK_NOTHROW(w.validate());
    auto bad = w;
    bad.cutoff[3] = 5;
    CHECK_THROWS(bad.validate());
    bad = w;
    bad.cutoff[0] = 9;
    CHECK_THROWS(bad.validate());
    bad = w;
    bad.gamma = 0.1;
    CHECK_THROWS(bad.validate());
    bad = w;
    bad.cutoff.pop_back();
    CHECK_THROWS(bad.validate());
    CHECK(parse_taper("flat") == Taper::flat);
    CHECK_THROWS(parse_taper("hann"));
    CHECK(parse_method("datff") == Method::datff);
    CHECK_THROWS(parse_method("czt"));
  }

  TEST_CASE("converters are linear") {
    const auto x = random_trace(64, 7);
    const auto y = random_trace(64, 8);
    const cplx a(0.5, 1.5), b(-2.0, 0.25);
    std::vector<cplx> s(64);
    for (std::size_t k = 0; k < 64; ++k) s[k] = a * x.samples()[k] + b * y.samples()[k];
    const FrequencySweepTrace xy(small_grid(64), s);
    const auto w = gamma_window(-0.4, 64, 64);

    auto check = [&](auto op) {
      const auto lhs = op(xy);
      const auto ox = op(x);
      const auto oy = op(y);
      std::vector<cplx> rhs(lhs.size());
      for (std::size_t n = 0; n < lhs.size(); ++n) rhs[n] = a * ox[n] + b * oy[n];
      CHECK(oracle::rel_err(lhs, rhs) < 1e-12);
    };
    check([](const FrequencySweepTrace& t) { return inverse_dft(t); });
    check([](const FrequencySweepTrace& t) { return attenuated_idft(t, 0.3); });
    check([&](const FrequencySweepTrace& t) { return windowed_convert(t, w); });
  }

  TEST_CASE("attenuated transform factorises per n") {
    const std::size_t N = 12;
    const auto t = random_trace(N, 9);
    const double alpha = 0.7;
    const auto x = attenuated_idft(t, alpha);
    for (std::size_t n = 1; n <= N; ++n) {
      std::vector<cplx> mod(N);
      for (std::size_t k = 1; k <= N; ++k) mod[k - 1] = t(k) * std::exp(-alpha * double(k) * double(n) / double(N));
      const auto y = oracle::direct_sum(mod, 0.0, N);
      CHECK(std::abs(x[n - 1] - y[n - 1]) < 1e-12 * (1.0 + std::abs(y[n - 1])));
    }
  }

  TEST_CASE("output energy falls on average as cutoffs shrink") {
    const std::size_t N = 16;
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);
    double full = 0.0, reduced = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
      const FrequencySweepTrace t(small_grid(N), oracle::random_spectrum(N, rng));
      auto w = gamma_window(-0.5, N, N);
      const auto a = windowed_convert(t, w);
      CHECK(oracle::rel_err(a, oracle::direct_sum(t.samples(), w.alpha, N, w.cutoff)) < 1e-12);
      const std::size_t n = pick(rng);
      if (w.cutoff[n] > 1) --w.cutoff[n];
      full += energy(a);
      reduced += energy(windowed_convert(t, w));
    }
    CHECK(reduced < full);
  }

  TEST_CASE("bscan conversion: kernels equal the serial reference") {
    auto s = testutil::one_target_scene();
    s.n_traces = 6;
    s.noise_sigma = 0.1;
    const auto b = simulate_bscan(s);
    const auto w = gamma_window(-0.05, 1001, 126);
    for (const auto& m : {ConversionMethod::idft(), ConversionMethod::isdft(0.01, 0.5), ConversionMethod::datff(w)}) {
      const auto fast = convert_bscan(b, m, m.kind == Method::datff ? 0 : 126);
      const auto slow = reference::convert_bscan(b, m, m.kind == Method::datff ? 0 : 126);
      REQUIRE(fast.n_time() == 126);
      CHECK(oracle::rel_err(fast.data(), slow.data()) < 1e-12);
      CHECK(fast.time_zero_offset() == b.grid().time_step());
    }
    const auto flat = convert_bscan(b, ConversionMethod::datff(full_band_window(1001, 1001)));
    const auto idft = convert_bscan(b, ConversionMethod::idft());
    CHECK(oracle::rel_err(flat.data(), idft.data()) < 1e-12);
  }

  TEST_CASE("grid mismatch is an error") {
    auto s = testutil::one_target_scene();
    s.n_traces = 2;
    const auto b = simulate_bscan(s);
    CHECK_THROWS(convert_bscan(b, ConversionMethod::datff(gamma_window(-0.05, 1000, 126))));
    CHECK_THROWS(convert_bscan(b, ConversionMethod::datff(gamma_window(-0.05, 1001, 126)), 200));
    CHECK_THROWS(convert_bscan(b, ConversionMethod::idft(), 2000));
    ConversionMethod no_window;
    no_window.kind = Method::datff;
    CHECK_THROWS(convert_bscan(b, no_window));
    CHECK_THROWS(windowed_convert(random_trace(16, 1), gamma_window(-1.0, 8, 8)));
  }

  TEST_CASE("idft on the reference scene puts each apex at its travel time") {
    const auto s = reference_scene();
    const auto x = convert_bscan(simulate_bscan(s), ConversionMethod::idft());
    const double ts = s.grid.time_step();
    for (const auto& tgt : s.targets) {
      const auto apex = static_cast<std::size_t>(std::lround(tgt.x_pos / s.trace_spacing));
      for (std::size_t i = apex - 3; i <= apex + 3; ++i) {
        const double n_exact = (two_way_time(s, tgt, i) + s.system_delay) / ts;
        const auto centre = static_cast<std::size_t>(std::lround(n_exact)) - 1;
        std::size_t best = centre - 4;
        for (std::size_t j = centre - 4; j <= centre + 4; ++j)
          if (std::abs(x.at(i, j)) > std::abs(x.at(i, best))) best = j;
        CHECK(std::abs(double(best + 1) - n_exact) <= 1.0);
      }
    }
  }
}
