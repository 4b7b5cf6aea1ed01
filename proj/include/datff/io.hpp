#pragma once

#include <filesystem>
#include <string>

#include "datff/convert.hpp"
#include "datff/synth.hpp"
#include "datff/tf_analysis.hpp"
#include "datff/types.hpp"

namespace datff {

// Text formats write doubles with 17 significant digits, LF line endings.
//
//   sweep CSV   #SFCW,f_start_hz,f_step_hz,n_freq,trace_spacing_m
//               trace_index,re_1,im_1,...,re_N,im_N
//   time CSV    #TIME,time_step_s,n_time,trace_spacing_m,time_zero_s
//               trace_index,re_1,im_1,...
//   window CSV  #WINDOW,gamma,alpha,w_threshold,n_freq,n_time,taper
//               n,K_n
//   hist CSV    #HIST,n_tbins,n_fbins
//               count,count,...   (one row per time bin)

FrequencyBScan load_frequency_bscan(const std::filesystem::path& path);
void save_frequency_bscan(const FrequencyBScan& bscan, const std::filesystem::path& path);

TimeBScan load_time_bscan(const std::filesystem::path& path);
void save_time_bscan(const TimeBScan& bscan, const std::filesystem::path& path);

FilterWindow load_window(const std::filesystem::path& path);
void save_window(const FilterWindow& window, const std::filesystem::path& path);

void save_histogram(const OccurrenceHistogram& hist, const std::filesystem::path& path);

/// {"roi": [[trace_lo,trace_hi,time_lo,time_hi], ...], "clutter": [...]}
RegionMask load_mask(const std::filesystem::path& path);
void save_mask(const RegionMask& mask, const std::filesystem::path& path);

SyntheticScene load_scene(const std::filesystem::path& path);
void save_scene(const SyntheticScene& scene, const std::filesystem::path& path);
SyntheticScene scene_from_json(const std::string& text);
std::string scene_to_json(const SyntheticScene& scene);

/// The header tag of a CSV file ("SFCW", "TIME", ...).
std::string sniff_format(const std::filesystem::path& path);

enum class Normalize { per_image, per_trace };
Normalize parse_normalize(std::string_view s);

struct RenderResult {
  std::size_t width = 0;   // traces
  std::size_t height = 0;  // time samples
  bool degenerate = false; // some dynamic range collapsed to mid-gray
};

/// 8-bit binary PGM (P5): rows are time samples, columns traces, grey level
/// = real part mapped linearly min -> 0, max -> 255.
RenderResult render_radargram(const TimeBScan& bscan, const std::filesystem::path& path,
                              Normalize normalize = Normalize::per_image);

/// Pixel values of render_radargram without touching the filesystem,
/// row-major [time][trace].
std::vector<unsigned char> radargram_pixels(const TimeBScan& bscan, Normalize normalize, bool* degenerate = nullptr);

}  // namespace datff
