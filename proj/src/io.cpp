#include "datff/io.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string_view>
#include <vector>

namespace datff {

namespace {

using json = nlohmann::json;

// --- text helpers -----------------------------------------------------------

void put_double(std::string& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void put_uint(std::string& out, std::size_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(line, "invalid number '" + std::string(s) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value '" + std::string(s) + "'");
  return v;
}

std::size_t parse_uint(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ParseError(line, "invalid integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<std::string_view> header(const std::vector<std::string>& lines, std::string_view tag,
                                     std::size_t n_fields) {
  if (lines.empty()) throw ParseError(1, "empty file");
  auto f = split(lines[0]);
  if (f.empty() || f[0] != "#" + std::string(tag))
    throw ParseError(1, "expected header starting with #" + std::string(tag));
  if (f.size() != n_fields) throw ParseError(1, "header must have " + std::to_string(n_fields) + " fields");
  return f;
}

// Rows of "index,re,im,re,im,...".
std::vector<std::vector<cplx>> parse_complex_rows(const std::vector<std::string>& lines, std::size_t n_values) {
  std::vector<std::vector<cplx>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    auto f = split(lines[li]);
    if (f.size() != 2 * n_values + 1)
      throw ParseError(lineno, "expected " + std::to_string(2 * n_values + 1) + " fields, got " +
                                   std::to_string(f.size()));
    if (parse_uint(f[0], lineno) != rows.size())
      throw ParseError(lineno, "trace index out of sequence");
    std::vector<cplx> row(n_values);
    for (std::size_t k = 0; k < n_values; ++k)
      row[k] = cplx(parse_double(f[1 + 2 * k], lineno), parse_double(f[2 + 2 * k], lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lines.size() + 1, "no trace rows");
  return rows;
}

void put_complex_row(std::string& out, std::size_t index, std::span<const cplx> values) {
  put_uint(out, index);
  for (const auto& z : values) {
    out.push_back(',');
    put_double(out, z.real());
    out.push_back(',');
    put_double(out, z.imag());
  }
  out.push_back('\n');
}

}  // namespace

// --- sweep CSV ----------------------------------------------------------------

FrequencyBScan load_frequency_bscan(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto h = header(lines, "SFCW", 5);
  SweepGrid grid;
  grid.f_start = parse_double(h[1], 1);
  grid.f_step = parse_double(h[2], 1);
  grid.n_freq = parse_uint(h[3], 1);
  const double spacing = parse_double(h[4], 1);
  if (!(grid.f_start > 0.0) || !(grid.f_step > 0.0) || grid.n_freq < 2 || !(spacing > 0.0))
    throw ParseError(1, "invalid sweep header values");
  grid.crop_time = std::min(grid.crop_time, static_cast<double>(grid.n_freq) * grid.time_step());

  auto rows = parse_complex_rows(lines, grid.n_freq);
  std::vector<FrequencySweepTrace> traces;
  traces.reserve(rows.size());
  for (auto& r : rows) traces.emplace_back(grid, std::move(r));
  return FrequencyBScan(grid, spacing, std::move(traces));
}

void save_frequency_bscan(const FrequencyBScan& bscan, const std::filesystem::path& path) {
  std::string out = "#SFCW,";
  put_double(out, bscan.grid().f_start);
  out.push_back(',');
  put_double(out, bscan.grid().f_step);
  out.push_back(',');
  put_uint(out, bscan.grid().n_freq);
  out.push_back(',');
  put_double(out, bscan.trace_spacing());
  out.push_back('\n');
  for (std::size_t i = 0; i < bscan.n_traces(); ++i) put_complex_row(out, i, bscan.trace(i).samples());
  write_file(path, out);
}

// --- time CSV -----------------------------------------------------------------

TimeBScan load_time_bscan(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto h = header(lines, "TIME", 5);
  const double ts = parse_double(h[1], 1);
  const std::size_t n_time = parse_uint(h[2], 1);
  const double spacing = parse_double(h[3], 1);
  const double t0 = parse_double(h[4], 1);
  if (!(ts > 0.0) || n_time < 1 || !(spacing > 0.0)) throw ParseError(1, "invalid time header values");

  auto rows = parse_complex_rows(lines, n_time);
  std::vector<cplx> flat;
  flat.reserve(rows.size() * n_time);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return TimeBScan(ts, spacing, rows.size(), n_time, std::move(flat), t0);
}

void save_time_bscan(const TimeBScan& bscan, const std::filesystem::path& path) {
  std::string out = "#TIME,";
  put_double(out, bscan.time_step());
  out.push_back(',');
  put_uint(out, bscan.n_time());
  out.push_back(',');
  put_double(out, bscan.trace_spacing());
  out.push_back(',');
  put_double(out, bscan.time_zero_offset());
  out.push_back('\n');
  for (std::size_t i = 0; i < bscan.n_traces(); ++i) put_complex_row(out, i, bscan.trace(i));
  write_file(path, out);
}

// --- window CSV ---------------------------------------------------------------

FilterWindow load_window(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto h = header(lines, "WINDOW", 7);
  FilterWindow w;
  w.gamma = parse_double(h[1], 1);
  w.alpha = parse_double(h[2], 1);
  w.w_threshold = parse_double(h[3], 1);
  w.n_freq = parse_uint(h[4], 1);
  w.n_time = parse_uint(h[5], 1);
  try {
    w.taper = parse_taper(h[6]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(1, e.what());
  }
  if (lines.size() != w.n_time + 1)
    throw ParseError(lines.size() + 1, "expected " + std::to_string(w.n_time) + " cutoff rows");
  w.cutoff.resize(w.n_time);
  for (std::size_t n = 1; n <= w.n_time; ++n) {
    auto f = split(lines[n]);
    if (f.size() != 2) throw ParseError(n + 1, "expected 'n,K_n'");
    if (parse_uint(f[0], n + 1) != n) throw ParseError(n + 1, "time index out of sequence");
    w.cutoff[n - 1] = parse_uint(f[1], n + 1);
  }
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(1, e.what());
  }
  return w;
}

void save_window(const FilterWindow& window, const std::filesystem::path& path) {
  std::string out = "#WINDOW,";
  put_double(out, window.gamma);
  out.push_back(',');
  put_double(out, window.alpha);
  out.push_back(',');
  put_double(out, window.w_threshold);
  out.push_back(',');
  put_uint(out, window.n_freq);
  out.push_back(',');
  put_uint(out, window.n_time);
  out.push_back(',');
  out += to_string(window.taper);
  out.push_back('\n');
  for (std::size_t n = 1; n <= window.n_time; ++n) {
    put_uint(out, n);
    out.push_back(',');
    put_uint(out, window.K(n));
    out.push_back('\n');
  }
  write_file(path, out);
}

void save_histogram(const OccurrenceHistogram& hist, const std::filesystem::path& path) {
  std::string out = "#HIST,";
  put_uint(out, hist.n_time_bins);
  out.push_back(',');
  put_uint(out, hist.n_freq_bins);
  out.push_back('\n');
  for (std::size_t t = 0; t < hist.n_time_bins; ++t) {
    for (std::size_t b = 0; b < hist.n_freq_bins; ++b) {
      if (b) out.push_back(',');
      put_uint(out, hist.at(t, b));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

std::string sniff_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::string line;
  std::getline(in, line);
  if (line.empty() || line[0] != '#') throw ParseError(1, "missing '#' header");
  return line.substr(1, line.find(',') == std::string::npos ? std::string::npos : line.find(',') - 1);
}

// --- JSON ---------------------------------------------------------------------

namespace {

std::vector<PixelRect> rects_from_json(const json& arr, const char* key) {
  if (!arr.is_array()) throw Error(std::string("mask: '") + key + "' must be an array");
  std::vector<PixelRect> out;
  for (const auto& r : arr) {
    if (!r.is_array() || r.size() != 4) throw Error(std::string("mask: '") + key + "' entries need 4 integers");
    out.push_back({r[0].get<std::size_t>(), r[1].get<std::size_t>(), r[2].get<std::size_t>(),
                   r[3].get<std::size_t>()});
  }
  return out;
}

json rects_to_json(const std::vector<PixelRect>& rects) {
  json arr = json::array();
  for (const auto& r : rects) arr.push_back({r.trace_lo, r.trace_hi, r.time_lo, r.time_hi});
  return arr;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("'" + path.string() + "': " + e.what());
  }
}

}  // namespace

RegionMask load_mask(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    RegionMask m;
    m.roi = rects_from_json(j.at("roi"), "roi");
    m.clutter = rects_from_json(j.at("clutter"), "clutter");
    return m;
  } catch (const json::exception& e) {
    throw Error("'" + path.string() + "': " + e.what());
  }
}

void save_mask(const RegionMask& mask, const std::filesystem::path& path) {
  json j;
  j["roi"] = rects_to_json(mask.roi);
  j["clutter"] = rects_to_json(mask.clutter);
  write_file(path, j.dump() + "\n");
}

SyntheticScene scene_from_json(const std::string& text) {
  SyntheticScene s;
  try {
    const json j = json::parse(text);
    const auto& g = j.at("grid");
    s.grid.f_start = g.at("f_start").get<double>();
    s.grid.f_step = g.at("f_step").get<double>();
    s.grid.n_freq = g.at("n_freq").get<std::size_t>();
    s.grid.crop_time = g.value("crop_time", s.grid.crop_time);
    s.n_traces = j.at("n_traces").get<std::size_t>();
    s.trace_spacing = j.at("trace_spacing").get<double>();
    s.epsilon_r = j.at("epsilon_r").get<double>();
    s.beta = j.at("beta").get<double>();
    for (const auto& t : j.at("targets"))
      s.targets.push_back({t.at("x_pos").get<double>(), t.at("depth").get<double>(), t.at("reflectivity").get<double>()});
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.direct_coupling_amp = j.at("direct_coupling_amp").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.system_delay = j.value("system_delay", 0.0);
    s.coupling_jitter = j.value("coupling_jitter", 0.0);
    s.system_rolloff = j.value("system_rolloff", 0.0);
  } catch (const json::exception& e) {
    throw Error(std::string("scene JSON: ") + e.what());
  }
  s.validate();
  return s;
}

std::string scene_to_json(const SyntheticScene& s) {
  json j;
  j["grid"] = {{"f_start", s.grid.f_start}, {"f_step", s.grid.f_step}, {"n_freq", s.grid.n_freq},
               {"crop_time", s.grid.crop_time}};
  j["n_traces"] = s.n_traces;
  j["trace_spacing"] = s.trace_spacing;
  j["epsilon_r"] = s.epsilon_r;
  j["beta"] = s.beta;
  json targets = json::array();
  for (const auto& t : s.targets) targets.push_back({{"x_pos", t.x_pos}, {"depth", t.depth}, {"reflectivity", t.reflectivity}});
  j["targets"] = targets;
  j["noise_sigma"] = s.noise_sigma;
  j["direct_coupling_amp"] = s.direct_coupling_amp;
  j["seed"] = s.seed;
  j["system_delay"] = s.system_delay;
  j["coupling_jitter"] = s.coupling_jitter;
  j["system_rolloff"] = s.system_rolloff;
  return j.dump(2) + "\n";
}

SyntheticScene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void save_scene(const SyntheticScene& scene, const std::filesystem::path& path) {
  write_file(path, scene_to_json(scene));
}

// --- PGM ----------------------------------------------------------------------

Normalize parse_normalize(std::string_view s) {
  if (s == "per-image") return Normalize::per_image;
  if (s == "per-trace") return Normalize::per_trace;
  throw std::invalid_argument("unknown normalization '" + std::string(s) + "'");
}

std::vector<unsigned char> radargram_pixels(const TimeBScan& bscan, Normalize normalize, bool* degenerate) {
  const std::size_t W = bscan.n_traces();
  const std::size_t H = bscan.n_time();
  std::vector<unsigned char> px(W * H, 128);
  bool flat = false;

  auto map_range = [&](std::size_t t_lo, std::size_t t_hi) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t t = t_lo; t < t_hi; ++t)
      for (std::size_t j = 0; j < H; ++j) {
        lo = std::min(lo, bscan.at(t, j).real());
        hi = std::max(hi, bscan.at(t, j).real());
      }
    if (!(hi > lo)) {
      flat = true;
      return;
    }
    const double scale = 255.0 / (hi - lo);
    for (std::size_t t = t_lo; t < t_hi; ++t)
      for (std::size_t j = 0; j < H; ++j) {
        const double v = std::round((bscan.at(t, j).real() - lo) * scale);
        px[j * W + t] = static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
      }
  };

  if (normalize == Normalize::per_image) {
    map_range(0, W);
  } else {
    for (std::size_t t = 0; t < W; ++t) map_range(t, t + 1);
  }
  if (degenerate) *degenerate = flat;
  return px;
}

RenderResult render_radargram(const TimeBScan& bscan, const std::filesystem::path& path, Normalize normalize) {
  RenderResult res;
  res.width = bscan.n_traces();
  res.height = bscan.n_time();
  const auto px = radargram_pixels(bscan, normalize, &res.degenerate);
  if (res.degenerate) spdlog::warn("render: degenerate dynamic range, mid-gray written for '{}'", path.string());
  std::string out = "P5\n" + std::to_string(res.width) + " " + std::to_string(res.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  write_file(path, out);
  return res;
}

}  // namespace datff
