#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "datff/convert.hpp"
#include "datff/io.hpp"
#include "datff/metrics.hpp"
#include "datff/parallel.hpp"
#include "datff/pipeline.hpp"
#include "datff/preprocess.hpp"
#include "datff/synth.hpp"
#include "datff/tf_analysis.hpp"
#include "datff/window_fit.hpp"

namespace fs = std::filesystem;
using namespace datff;

namespace {

// Failure outside run_pipeline, tagged with the subcommand.
int fail(const std::string& stage, const std::exception& e) {
  if (dynamic_cast<const StageError*>(&e)) {
    std::cerr << "error: " << e.what() << "\n";
  } else {
    std::cerr << "error: [" << stage << "] " << e.what() << "\n";
  }
  return 1;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, spdlog::level::level_enum> kLevels{
    {"trace", spdlog::level::trace}, {"debug", spdlog::level::debug}, {"info", spdlog::level::info},
    {"warn", spdlog::level::warn},   {"error", spdlog::level::err},   {"off", spdlog::level::off}};

// Options shared by every command that fits a window.
struct FitOptions {
  std::size_t m = 10;
  double ci = 0.9;
  double eps_occ = 0.01;
  double w_threshold = 0.5;
  std::string taper = "attenuated";
  std::size_t stft_window = 0;
  std::size_t stft_hop = 0;
  std::string background = "svd";
  std::size_t svd_rank = 1;
  double tz_threshold = 0.3;
  bool fit_after_bg = true;
  std::optional<double> crop_time;

  void attach(CLI::App* app) {
    app->add_option("--m", m, "Number of equal time intervals")->check(CLI::PositiveNumber);
    app->add_option("--ci", ci, "Confidence level of the per-interval frequency CDF");
    app->add_option("--eps-occ", eps_occ, "Occupancy floor relative to each trace's STFT maximum");
    app->add_option("--wthr", w_threshold, "Taper magnitude at the cutoff (sets alpha = gamma ln w)");
    app->add_option("--taper", taper, "attenuated | flat")->check(CLI::IsMember({"attenuated", "flat"}));
    app->add_option("--stft-window", stft_window, "STFT window length in samples (0: crop/10)");
    app->add_option("--stft-hop", stft_hop, "STFT hop in samples (0: window length)");
    app->add_option("--bg", background, "svd | ms | none")->check(CLI::IsMember({"svd", "ms", "none"}));
    app->add_option("--svd-rank", svd_rank, "Singular components removed")->check(CLI::PositiveNumber);
    app->add_option("--tz-threshold", tz_threshold, "Time-zero threshold as a fraction of the trace maximum");
    app->add_flag("--fit-after-bg,!--no-fit-after-bg", fit_after_bg,
                  "Remove the background before fitting the window (default on)");
    app->add_option("--crop-time", crop_time, "Analysis window in seconds (default: 20 ns)");
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.m = m;
    cfg.ci = ci;
    cfg.eps_occ = eps_occ;
    cfg.w_threshold = w_threshold;
    cfg.taper = parse_taper(taper);
    cfg.stft_window = stft_window;
    cfg.stft_hop = stft_hop;
    cfg.background = parse_background(background);
    cfg.svd_rank = svd_rank;
    cfg.tz_threshold = tz_threshold;
    cfg.fit_after_bg = fit_after_bg;
    cfg.crop_time = crop_time;
    return cfg;
  }
};

double crop_time_or_default(const std::optional<double>& crop_time) {
  return crop_time ? *crop_time : default_grid().crop_time;
}

void cmd_synth(const fs::path& scene_path, bool reference, std::optional<std::uint64_t> seed,
               std::optional<double> beta, const fs::path& scene_out, const fs::path& out) {
  if (scene_path.empty() == !reference) throw Error("give exactly one of --scene or --reference");
  SyntheticScene scene = reference ? reference_scene() : load_scene(scene_path);
  if (seed) scene.seed = *seed;
  if (beta) scene.beta = *beta;
  scene.validate();
  if (!scene_out.empty()) save_scene(scene, scene_out);
  const auto bscan = simulate_bscan(scene);
  save_frequency_bscan(bscan, out);
  spdlog::info("synth: {} traces x {} frequencies -> {}", bscan.n_traces(), bscan.grid().n_freq, out.string());
}

void cmd_preprocess(const fs::path& in, const fs::path& out, const std::string& bg, std::size_t rank,
                    double tz_threshold, bool no_tz) {
  const std::string fmt = sniff_format(in);
  TimeBScan scan = [&] {
    if (fmt == "SFCW") {
      const auto spectra = dc_remove(load_frequency_bscan(in));
      spdlog::info("preprocess: dc removal and full-band conversion");
      return convert_bscan(spectra, ConversionMethod::idft());
    }
    if (fmt == "TIME") return load_time_bscan(in);
    throw Error("unsupported input format '" + fmt + "'");
  }();
  if (!no_tz) {
    const std::size_t shift = detect_time_zero(scan, tz_threshold);
    spdlog::info("preprocess: time-zero shift {} samples", shift);
    scan = shift_time_zero(scan, shift);
  }
  scan = background_remove(scan, parse_background(bg), rank);
  save_time_bscan(scan, out);
}

void cmd_fit_window(const fs::path& in, const FitOptions& opts, std::optional<std::size_t> n_freq_opt,
                    const fs::path& out, const fs::path& hist_out, const fs::path& points_out) {
  const PipelineConfig cfg = opts.config();
  cfg.validate();
  const std::string fmt = sniff_format(in);
  TimeBScan scan = [&] {
    if (fmt == "TIME") return load_time_bscan(in);
    if (fmt != "SFCW") throw Error("unsupported input format '" + fmt + "'");
    const auto spectra = dc_remove(load_frequency_bscan(in));
    n_freq_opt = spectra.grid().n_freq;
    auto full = convert_bscan(spectra, ConversionMethod::idft());
    full = shift_time_zero(full, detect_time_zero(full, cfg.tz_threshold));
    return cfg.fit_after_bg ? background_remove(full, cfg.background, cfg.svd_rank) : full;
  }();
  const std::size_t N = n_freq_opt.value_or(scan.n_time());
  const std::size_t crop = crop_samples(scan.time_step(), crop_time_or_default(opts.crop_time), scan.n_time());
  const WindowFit fit = fit_window(scan, N, crop, cfg);
  save_window(fit.window, out);
  if (!hist_out.empty()) save_histogram(fit.histogram, hist_out);
  if (!points_out.empty()) {
    std::string text = "n,k,weight\n";
    for (const auto& p : fit.points)
      text += std::to_string(p.n) + "," + std::to_string(p.k) + "," + fmt_double(p.weight) + "\n";
    write_text(points_out, text);
  }
  std::cout << "gamma=" << fmt_double(fit.fit.gamma) << " alpha=" << fmt_double(fit.window.alpha)
            << " points=" << fit.points.size() << "\n";
}

void cmd_convert(const fs::path& in, const std::string& method, double alpha, double wthr, const fs::path& window_path,
                 std::size_t n_time, const fs::path& out) {
  const auto bscan = load_frequency_bscan(in);
  ConversionMethod cm;
  switch (parse_method(method)) {
    case Method::idft:
      cm = ConversionMethod::idft();
      break;
    case Method::isdft:
      cm = ConversionMethod::isdft(alpha, wthr);
      break;
    case Method::datff:
      if (window_path.empty()) throw Error("--method datff needs --window");
      cm = ConversionMethod::datff(load_window(window_path));
      break;
  }
  save_time_bscan(convert_bscan(bscan, cm, n_time), out);
}

void cmd_bgremove(const fs::path& in, const std::string& method, std::size_t rank, const fs::path& out) {
  save_time_bscan(background_remove(load_time_bscan(in), parse_background(method), rank), out);
}

void cmd_scr(const fs::path& in, const fs::path& mask_path, const fs::path& scene_path, std::optional<double> crop_time,
             const fs::path& mask_out) {
  if (mask_path.empty() == scene_path.empty()) throw Error("give exactly one of --mask or --auto-mask");
  TimeBScan scan = load_time_bscan(in);
  if (crop_time) scan = scan.cropped(crop_samples(scan.time_step(), *crop_time, scan.n_time()));
  const RegionMask mask = mask_path.empty() ? synthetic_region_mask(load_scene(scene_path), scan) : load_mask(mask_path);
  if (!mask_out.empty()) save_mask(mask, mask_out);
  const ScrReport rep = scr(scan, mask);
  std::cout << "SCR_dB=" << fmt_double(rep.scr_db) << " N_I=" << rep.n_roi_pixels << " N_c=" << rep.n_clutter_pixels
            << "\n";
}

void cmd_render(const fs::path& in, const fs::path& out, const std::string& normalize, std::optional<double> crop_time) {
  TimeBScan scan = load_time_bscan(in);
  if (crop_time) scan = scan.cropped(crop_samples(scan.time_step(), *crop_time, scan.n_time()));
  const auto res = render_radargram(scan, out, parse_normalize(normalize));
  spdlog::info("render: {}x{} -> {}", res.width, res.height, out.string());
}

void cmd_pipeline(const fs::path& in, const FitOptions& opts, const std::string& method, double alpha, double wthr,
                  const fs::path& reuse, const fs::path& out_dir) {
  PipelineConfig cfg = opts.config();
  cfg.method = parse_method(method);
  cfg.isdft_alpha = alpha;
  cfg.isdft_w_threshold = wthr;
  cfg.output_dir = out_dir;
  if (!reuse.empty()) {
    if (cfg.method != Method::datff) throw Error("--reuse-window applies to --method datff only");
    cfg.reuse_window = load_window(reuse);
  }
  const auto bscan = load_frequency_bscan(in);
  const PipelineResult res = run_pipeline(bscan, cfg);
  std::cout << "method=" << to_string(cfg.method) << " background=" << to_string(cfg.background)
            << " time_zero_shift=" << res.time_zero_shift << " crop_samples=" << res.crop_samples;
  if (res.window) std::cout << " gamma=" << fmt_double(res.window->gamma) << " alpha=" << fmt_double(res.window->alpha);
  std::cout << "\n";
}

void cmd_m_sweep(const fs::path& in, const FitOptions& opts, const std::vector<std::size_t>& m_values,
                 const fs::path& out) {
  const auto rows = m_sweep(load_frequency_bscan(in), opts.config(), m_values);
  std::string text = "m,gamma,points\n";
  for (const auto& r : rows) text += std::to_string(r.m) + "," + fmt_double(r.gamma) + "," + std::to_string(r.points) + "\n";
  write_text(out, text);
}

void cmd_gamma_stability(const std::vector<fs::path>& inputs, const FitOptions& opts, const fs::path& out) {
  std::vector<FrequencyBScan> scans;
  scans.reserve(inputs.size());
  for (const auto& p : inputs) scans.push_back(load_frequency_bscan(p));
  const auto st = gamma_stability(scans, opts.config());
  std::string text = "scan,gamma\n";
  for (std::size_t i = 0; i < st.gammas.size(); ++i) text += inputs[i].string() + "," + fmt_double(st.gammas[i]) + "\n";
  text += "#mean," + fmt_double(st.mean) + "\n#std," + fmt_double(st.stddev) + "\n";
  write_text(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-adaptive time-frequency filtering for SFCW GPR B-scans"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string log_level = "warn";
  app.add_option("--threads", threads, "Worker thread cap (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  // synth
  auto* synth = app.add_subcommand("synth", "Simulate a synthetic SFCW B-scan");
  fs::path synth_scene, synth_scene_out, synth_out;
  bool synth_reference = false;
  std::optional<std::uint64_t> synth_seed;
  std::optional<double> synth_beta;
  synth->add_option("--scene", synth_scene, "Scene JSON");
  synth->add_flag("--reference", synth_reference, "Use the built-in reference scene");
  synth->add_option("--seed", synth_seed, "Override the scene seed");
  synth->add_option("--beta", synth_beta, "Override the attenuation coefficient");
  synth->add_option("--scene-out", synth_scene_out, "Write the scene actually simulated");
  synth->add_option("--out", synth_out, "Sweep CSV")->required();

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "DC removal, time-zero correction and background removal");
  fs::path pre_in, pre_out;
  std::string pre_bg = "svd";
  std::size_t pre_rank = 1;
  double pre_tz = 0.3;
  bool pre_no_tz = false;
  pre->add_option("--in", pre_in, "Sweep CSV or time CSV")->required();
  pre->add_option("--out", pre_out, "Time CSV")->required();
  pre->add_option("--bg", pre_bg, "svd | ms | none")->check(CLI::IsMember({"svd", "ms", "none"}));
  pre->add_option("--svd-rank", pre_rank, "Singular components removed")->check(CLI::PositiveNumber);
  pre->add_option("--tz-threshold", pre_tz, "Time-zero threshold as a fraction of the trace maximum");
  pre->add_flag("--no-tz", pre_no_tz, "Skip time-zero correction");

  // fit-window
  auto* fitw = app.add_subcommand("fit-window", "Fit the depth-adaptive window from a B-scan");
  FitOptions fit_opts;
  fit_opts.attach(fitw);
  fs::path fit_in, fit_out, fit_hist, fit_points;
  std::optional<std::size_t> fit_nfreq;
  fitw->add_option("--in", fit_in, "Preprocessed time CSV, or a sweep CSV to preprocess first")->required();
  fitw->add_option("--n-freq", fit_nfreq, "Sweep length N for time CSV input (default: n_time)");
  fitw->add_option("--out", fit_out, "Window CSV")->required();
  fitw->add_option("--hist", fit_hist, "Also write the occurrence histogram CSV");
  fitw->add_option("--points", fit_points, "Also write the boundary points CSV");

  // convert
  auto* conv = app.add_subcommand("convert", "Frequency-to-time conversion");
  fs::path conv_in, conv_out, conv_window;
  std::string conv_method = "idft";
  double conv_alpha = 0.01, conv_wthr = 0.5;
  std::size_t conv_ntime = 0;
  conv->add_option("--in", conv_in, "Sweep CSV")->required();
  conv->add_option("--method", conv_method, "idft | isdft | datff")->check(CLI::IsMember({"idft", "isdft", "datff"}));
  conv->add_option("--alpha", conv_alpha, "ISDFT attenuation");
  conv->add_option("--wthr", conv_wthr, "ISDFT magnitude threshold");
  conv->add_option("--window", conv_window, "Window CSV for --method datff");
  conv->add_option("--n-time", conv_ntime, "Output samples per trace (0: N)");
  conv->add_option("--out", conv_out, "Time CSV")->required();

  // bgremove
  auto* bgr = app.add_subcommand("bgremove", "Background removal on a time B-scan");
  fs::path bgr_in, bgr_out;
  std::string bgr_method = "svd";
  std::size_t bgr_rank = 1;
  bgr->add_option("--in", bgr_in, "Time CSV")->required();
  bgr->add_option("--method", bgr_method, "svd | ms | none")->check(CLI::IsMember({"svd", "ms", "none"}));
  bgr->add_option("--rank", bgr_rank, "Singular components removed")->check(CLI::PositiveNumber);
  bgr->add_option("--out", bgr_out, "Time CSV")->required();

  // scr
  auto* scrc = app.add_subcommand("scr", "Signal-to-clutter ratio of a time B-scan");
  fs::path scr_in, scr_mask, scr_scene, scr_mask_out;
  std::optional<double> scr_crop;
  scrc->add_option("--in", scr_in, "Time CSV")->required();
  scrc->add_option("--mask", scr_mask, "Mask JSON");
  scrc->add_option("--auto-mask", scr_scene, "Derive the mask from this synthetic scene JSON");
  scrc->add_option("--crop-time", scr_crop, "Crop before evaluating, seconds");
  scrc->add_option("--mask-out", scr_mask_out, "Write the mask used");

  // render
  auto* rend = app.add_subcommand("render", "Render a time B-scan as an 8-bit PGM");
  fs::path rend_in, rend_out;
  std::string rend_norm = "per-image";
  std::optional<double> rend_crop;
  rend->add_option("--in", rend_in, "Time CSV")->required();
  rend->add_option("--out", rend_out, "PGM file")->required();
  rend->add_option("--normalize", rend_norm, "per-image | per-trace")->check(CLI::IsMember({"per-image", "per-trace"}));
  rend->add_option("--crop-time", rend_crop, "Crop before rendering, seconds");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "End-to-end processing of a sweep B-scan");
  FitOptions pipe_opts;
  pipe_opts.attach(pipe);
  fs::path pipe_in, pipe_reuse, pipe_out;
  std::string pipe_method = "datff";
  double pipe_alpha = 0.01, pipe_wthr_isdft = 0.5;
  pipe->add_option("--in", pipe_in, "Sweep CSV")->required();
  pipe->add_option("--method", pipe_method, "idft | isdft | datff")->check(CLI::IsMember({"idft", "isdft", "datff"}));
  pipe->add_option("--alpha", pipe_alpha, "ISDFT attenuation");
  pipe->add_option("--isdft-wthr", pipe_wthr_isdft, "ISDFT magnitude threshold");
  pipe->add_option("--reuse-window", pipe_reuse, "Apply this window CSV instead of fitting");
  pipe->add_option("--out-dir", pipe_out, "Directory for time.csv, window.csv, hist.csv, radargram.pgm")->required();

  // m-sweep
  auto* msw = app.add_subcommand("m-sweep", "Fitted gamma as a function of the interval count");
  FitOptions msw_opts;
  msw_opts.attach(msw);
  fs::path msw_in, msw_out;
  std::vector<std::size_t> msw_values{2, 4, 6, 8, 10, 15, 20};
  msw->add_option("--in", msw_in, "Sweep CSV")->required();
  msw->add_option("--m-values", msw_values, "Interval counts")->delimiter(',');
  msw->add_option("--out", msw_out, "CSV table (default: stdout)");

  // gamma-stability
  auto* gst = app.add_subcommand("gamma-stability", "Fitted gamma across several B-scans");
  FitOptions gst_opts;
  gst_opts.attach(gst);
  std::vector<fs::path> gst_in;
  fs::path gst_out;
  gst->add_option("--in", gst_in, "Sweep CSVs (two or more)")->required()->expected(2, -1);
  gst->add_option("--out", gst_out, "CSV table (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(kLevels.at(log_level));
  if (threads > 0) set_max_threads(threads);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*synth) cmd_synth(synth_scene, synth_reference, synth_seed, synth_beta, synth_scene_out, synth_out);
    if (*pre) cmd_preprocess(pre_in, pre_out, pre_bg, pre_rank, pre_tz, pre_no_tz);
    if (*fitw) cmd_fit_window(fit_in, fit_opts, fit_nfreq, fit_out, fit_hist, fit_points);
    if (*conv) cmd_convert(conv_in, conv_method, conv_alpha, conv_wthr, conv_window, conv_ntime, conv_out);
    if (*bgr) cmd_bgremove(bgr_in, bgr_method, bgr_rank, bgr_out);
    if (*scrc) cmd_scr(scr_in, scr_mask, scr_scene, scr_crop, scr_mask_out);
    if (*rend) cmd_render(rend_in, rend_out, rend_norm, rend_crop);
    if (*pipe) cmd_pipeline(pipe_in, pipe_opts, pipe_method, pipe_alpha, pipe_wthr_isdft, pipe_reuse, pipe_out);
    if (*msw) cmd_m_sweep(msw_in, msw_opts, msw_values, msw_out);
    if (*gst) cmd_gamma_stability(gst_in, gst_opts, gst_out);
  } catch (const std::exception& e) {
    return fail(name, e);
  }
  return 0;
}
