#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "datff/window_fit.hpp"
#include "oracles.hpp"

using namespace datff;

namespace {

std::vector<BoundaryPoint> to_points(const std::vector<oracle::Pt>& pts) {
  std::vector<BoundaryPoint> out;
  for (const auto& p : pts) out.push_back({p.n, p.k, p.w});
  return out;
}

std::vector<oracle::Pt> random_points(std::mt19937_64& rng, std::size_t count) {
  std::uniform_int_distribution<std::size_t> n(5, 140), k(100, 1001);
  std::uniform_real_distribution<double> w(0.5, 100.0);
  std::vector<oracle::Pt> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back({n(rng), k(rng), w(rng)});
  return pts;
}

FitResult with_gamma(double g) {
  FitResult f;
  f.gamma = g;
  return f;
}

}  // namespace

TEST_SUITE("window-fit") {
  TEST_CASE("hand examples") {
    const std::vector<BoundaryPoint> one = {{10, 100, 5.0}};
    const auto a = fit_gamma(one, 1000);
    CHECK(a.gamma == -1.0);
    CHECK(a.residual == 0.0);

    const std::vector<BoundaryPoint> two = {{10, 100, 3.0}, {20, 100, 1.0}};
    const auto b = fit_gamma(two, 1000);
    CHECK(b.gamma == -0.875);
    CHECK(b.residual == doctest::Approx(3 * 0.125 * 0.125 + 0.375 * 0.375));
    CHECK(b.points_used.size() == 2);
  }

  TEST_CASE("closed form matches the grid-search argmin") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
      const auto pts = random_points(rng, 10);
      const double g = fit_gamma(to_points(pts), 1001).gamma;
      CHECK(std::abs(g - oracle::grid_argmin(pts, 1001)) <= 1e-4);
    }
  }

  TEST_CASE("closed form is a local minimum inside the point range") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 200; ++rep) {
      const auto pts = random_points(rng, 1 + rep % 12);
      const auto bp = to_points(pts);
      const auto fit = fit_gamma(bp, 1001);
      const double f0 = wlr_objective(bp, 1001, fit.gamma);
      CHECK(f0 == doctest::Approx(oracle::objective(pts, 1001, fit.gamma)).epsilon(1e-12));
      CHECK(fit.residual == doctest::Approx(f0).epsilon(1e-12));
      for (double d : {1e-3, 1e-2}) {
        CHECK(f0 <= wlr_objective(bp, 1001, fit.gamma + d));
        CHECK(f0 <= wlr_objective(bp, 1001, fit.gamma - d));
      }
      double lo = 1e300, hi = -1e300;
      for (const auto& p : pts) {
        const double v = -1001.0 / (double(p.k) * double(p.n));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(fit.gamma >= lo - 1e-15);
      CHECK(fit.gamma <= hi + 1e-15);
      CHECK(fit.gamma < 0.0);

      auto scaled = bp;
      for (auto& p : scaled) p.weight *= 7.25;
      CHECK(fit_gamma(scaled, 1001).gamma == doctest::Approx(fit.gamma).epsilon(1e-14));
    }
  }

  TEST_CASE("zero weights are skipped, bad points rejected") {
    const std::vector<BoundaryPoint> mixed = {{10, 100, 0.0}, {20, 100, 2.0}};
    const auto f = fit_gamma(mixed, 1000);
    CHECK(f.gamma == -0.5);
    CHECK(f.points_used.size() == 1);
    const std::vector<BoundaryPoint> none = {{10, 100, 0.0}};
    CHECK_THROWS_AS(fit_gamma(none, 1000), Error);
    const std::vector<BoundaryPoint> zero_k = {{10, 0, 1.0}};
    CHECK_THROWS(fit_gamma(zero_k, 1000));
    const std::vector<BoundaryPoint> negative = {{10, 10, -1.0}};
    CHECK_THROWS(fit_gamma(negative, 1000));
  }

  TEST_CASE("window geometry at gamma = -0.058") {
    const auto w = build_datff_window(with_gamma(-0.058), 0.5, 1001, 1001);
    CHECK(w.K(125) == 138);
    CHECK(w.K(1) == 1001);
    CHECK(w.alpha == doctest::Approx(-0.058 * std::log(0.5)));
    CHECK(w.alpha > 0.0);
    CHECK_NOTHROW(w.validate());
    const double c = 1001.0 / 0.058;
    for (std::size_t n = 1; n <= 1001; ++n) {
      if (n > 1) CHECK(w.K(n) <= w.K(n - 1));
      const std::size_t K = w.K(n);
      if (K < 1001 && K > 1) {
        const double kn = double(K) * double(n);
        CHECK(kn <= c);
        CHECK(kn >= c - double(n));
        // |W| = w at the exact boundary, so K_n is the last index kept.
        CHECK(std::exp(-w.alpha * double(K) * double(n) / 1001.0) >= 0.5 * (1.0 - 1e-12));
        CHECK(std::exp(-w.alpha * double(K + 1) * double(n) / 1001.0) < 0.5);
      }
    }
  }

  TEST_CASE("gamma = -1 on N = 8") {
    const auto w = build_datff_window(with_gamma(-1.0), 0.5, 8, 8, Taper::flat);
    CHECK(w.cutoff == std::vector<std::size_t>{8, 4, 2, 2, 1, 1, 1, 1});
    CHECK(w.taper == Taper::flat);
    CHECK(w.weight(1, 8) == 1.0);
  }

  TEST_CASE("non-negative gamma is rejected") {
    CHECK_THROWS_AS(build_datff_window(with_gamma(0.0), 0.5, 1001, 10), Error);
    CHECK_THROWS(build_datff_window(with_gamma(0.3), 0.5, 1001, 10));
    CHECK_THROWS(build_datff_window(with_gamma(-0.1), 1.5, 1001, 10));
  }
}
