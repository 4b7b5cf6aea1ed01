#include "datff/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <stdexcept>

#include "datff/io.hpp"

namespace datff {

namespace {

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct Prepared {
  FrequencyBScan spectra;  // DC removed
  TimeBScan full_band;     // time-zero corrected, no background removal
  std::size_t shift = 0;
  std::size_t crop = 0;
};

std::size_t crop_for(const SweepGrid& grid, const PipelineConfig& cfg) {
  SweepGrid g = grid;
  if (cfg.crop_time) g.crop_time = *cfg.crop_time;
  g.validate();
  return g.crop_samples();
}

Prepared prepare(const FrequencyBScan& bscan, const PipelineConfig& cfg) {
  auto spectra = stage("dc_remove", [&] { return dc_remove(bscan); });
  spdlog::info("dc_remove: {} traces x {} frequencies", spectra.n_traces(), spectra.grid().n_freq);

  auto full = stage("convert", [&] { return convert_bscan(spectra, ConversionMethod::idft()); });
  spdlog::info("convert: full-band idft, n_time={}", full.n_time());

  const std::size_t shift = stage("time_zero", [&] { return detect_time_zero(full, cfg.tz_threshold); });
  spdlog::info("time_zero: threshold={} shift={} samples", cfg.tz_threshold, shift);
  auto corrected = shift_time_zero(full, shift);
  const std::size_t crop = stage("crop", [&] { return crop_for(bscan.grid(), cfg); });
  return {std::move(spectra), std::move(corrected), shift, crop};
}

WindowFit fit_from_prepared(const Prepared& p, const PipelineConfig& cfg) {
  const auto fit_input = stage("background", [&] {
    return cfg.fit_after_bg ? background_remove(p.full_band, cfg.background, cfg.svd_rank) : p.full_band;
  });
  return fit_window(fit_input, p.spectra.grid().n_freq, p.crop, cfg);
}

}  // namespace

void PipelineConfig::validate() const {
  if (m < 1) throw std::invalid_argument("PipelineConfig: m must be >= 1");
  if (!(ci > 0.0 && ci < 1.0)) throw std::invalid_argument("PipelineConfig: ci must lie in (0, 1)");
  if (!(eps_occ > 0.0 && eps_occ < 1.0)) throw std::invalid_argument("PipelineConfig: eps_occ must lie in (0, 1)");
  if (!(w_threshold > 0.0 && w_threshold < 1.0))
    throw std::invalid_argument("PipelineConfig: w_threshold must lie in (0, 1)");
  if (!(isdft_alpha > 0.0)) throw std::invalid_argument("PipelineConfig: isdft alpha must be > 0");
  if (!(isdft_w_threshold > 0.0 && isdft_w_threshold < 1.0))
    throw std::invalid_argument("PipelineConfig: isdft w_threshold must lie in (0, 1)");
  if (!(tz_threshold > 0.0 && tz_threshold < 1.0))
    throw std::invalid_argument("PipelineConfig: tz_threshold must lie in (0, 1)");
  if (svd_rank < 1) throw std::invalid_argument("PipelineConfig: svd_rank must be >= 1");
  if (crop_time && !(*crop_time > 0.0)) throw std::invalid_argument("PipelineConfig: crop_time must be > 0");
}

WindowFit fit_window(const TimeBScan& preprocessed, std::size_t n_freq, std::size_t crop_samples,
                     const PipelineConfig& cfg) {
  WindowFit out;
  const auto cropped = stage("crop", [&] { return preprocessed.cropped(std::min(crop_samples, preprocessed.n_time())); });
  StftConfig scfg;
  scfg.window_len = cfg.stft_window;
  scfg.hop = cfg.stft_hop;
  scfg.magnitude_floor = cfg.eps_occ;
  out.histogram = stage("stft", [&] { return bscan_histogram(cropped, scfg); });
  spdlog::info("stft: window={} hop={} eps_occ={} -> {}x{} histogram, {} occupied counts",
               out.histogram.config.window_len, out.histogram.config.hop, cfg.eps_occ, out.histogram.n_time_bins,
               out.histogram.n_freq_bins, out.histogram.total());

  const BoundaryGrid grid{n_freq, conversion_index_of_first_sample(cropped)};
  out.points = stage("boundary", [&] { return boundary_points(out.histogram, cfg.m, cfg.ci, grid); });
  spdlog::info("boundary: m={} ci={} -> {} points", cfg.m, cfg.ci, out.points.size());

  out.fit = stage("fit", [&] { return fit_gamma(out.points, n_freq); });
  spdlog::info("fit: gamma={:.6g} residual={:.6g}", out.fit.gamma, out.fit.residual);

  out.window = stage("window", [&] { return build_datff_window(out.fit, cfg.w_threshold, n_freq, n_freq, cfg.taper); });
  spdlog::info("window: alpha={:.6g} w_threshold={} K_1={} K_N={}", out.window.alpha, cfg.w_threshold,
               out.window.cutoff.front(), out.window.cutoff.back());
  return out;
}

PipelineResult run_pipeline(const FrequencyBScan& bscan, const PipelineConfig& cfg) {
  stage("config", [&] { cfg.validate(); });
  const std::size_t N = bscan.grid().n_freq;
  Prepared p = prepare(bscan, cfg);

  PipelineResult res{p.full_band, p.shift, p.crop, std::nullopt, std::nullopt};
  TimeBScan converted = p.full_band;

  switch (cfg.method) {
    case Method::idft:
      break;
    case Method::isdft: {
      res.window = stage("window", [&] { return build_isdft_window(cfg.isdft_alpha, cfg.isdft_w_threshold, N, N); });
      spdlog::info("window: isdft alpha={} w_threshold={}", cfg.isdft_alpha, cfg.isdft_w_threshold);
      break;
    }
    case Method::datff: {
      if (cfg.reuse_window) {
        res.window = *cfg.reuse_window;
        spdlog::info("window: reusing gamma={:.6g}", res.window->gamma);
      } else {
        res.fit = fit_from_prepared(p, cfg);
        res.window = res.fit->window;
      }
      break;
    }
  }

  if (res.window) {
    const auto method = ConversionMethod::datff(*res.window);
    converted = stage("convert", [&] { return shift_time_zero(convert_bscan(p.spectra, method), p.shift); });
    spdlog::info("convert: {} windowed conversion", to_string(cfg.method));
  }

  res.output = stage("background", [&] { return background_remove(converted, cfg.background, cfg.svd_rank); });
  spdlog::info("background: {} (rank {})", to_string(cfg.background), cfg.svd_rank);

  if (!cfg.output_dir.empty()) {
    stage("output", [&] {
      std::filesystem::create_directories(cfg.output_dir);
      save_time_bscan(res.output, cfg.output_dir / "time.csv");
      if (res.window) save_window(*res.window, cfg.output_dir / "window.csv");
      if (res.fit) save_histogram(res.fit->histogram, cfg.output_dir / "hist.csv");
      render_radargram(res.output.cropped(std::min(p.crop, res.output.n_time())), cfg.output_dir / "radargram.pgm",
                       Normalize::per_image);
      spdlog::info("output: artifacts written to {}", cfg.output_dir.string());
    });
  }
  return res;
}

std::vector<MSweepRow> m_sweep(const FrequencyBScan& bscan, const PipelineConfig& cfg,
                               std::span<const std::size_t> m_values) {
  if (m_values.empty()) throw std::invalid_argument("m_sweep: no m values");
  stage("config", [&] { cfg.validate(); });
  Prepared p = prepare(bscan, cfg);
  const WindowFit base = fit_from_prepared(p, cfg);
  const auto cropped_first = conversion_index_of_first_sample(p.full_band);
  const BoundaryGrid grid{bscan.grid().n_freq, cropped_first};

  std::vector<MSweepRow> rows;
  for (const std::size_t m : m_values) {
    const auto pts = stage("boundary", [&] { return boundary_points(base.histogram, m, cfg.ci, grid); });
    const auto fit = stage("fit", [&] { return fit_gamma(pts, bscan.grid().n_freq); });
    rows.push_back({m, fit.gamma, fit.points_used.size()});
  }
  return rows;
}

GammaStability gamma_stability(std::span<const FrequencyBScan> scans, const PipelineConfig& cfg) {
  if (scans.size() < 2) throw std::invalid_argument("gamma_stability: at least two scans required");
  stage("config", [&] { cfg.validate(); });
  GammaStability out;
  for (const auto& s : scans) {
    Prepared p = prepare(s, cfg);
    out.gammas.push_back(fit_from_prepared(p, cfg).fit.gamma);
  }
  // Shifted by the first value so identical inputs give exactly zero spread.
  const double n = static_cast<double>(out.gammas.size());
  const double g0 = out.gammas.front();
  double shift_sum = 0.0;
  for (double g : out.gammas) shift_sum += g - g0;
  const double dmean = shift_sum / n;
  out.mean = g0 + dmean;
  double ss = 0.0;
  for (double g : out.gammas) ss += (g - g0 - dmean) * (g - g0 - dmean);
  out.stddev = std::sqrt(ss / (n - 1.0));
  return out;
}

}  // namespace datff
