#include "datff/preprocess.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace datff {

namespace {

using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const Matrix>;

}  // namespace

std::string_view to_string(BackgroundMethod m) {
  switch (m) {
    case BackgroundMethod::none: return "none";
    case BackgroundMethod::svd: return "svd";
    case BackgroundMethod::ms: return "ms";
  }
  return "?";
}

BackgroundMethod parse_background(std::string_view s) {
  if (s == "none") return BackgroundMethod::none;
  if (s == "svd") return BackgroundMethod::svd;
  if (s == "ms") return BackgroundMethod::ms;
  throw std::invalid_argument("unknown background method '" + std::string(s) + "'");
}

void PreprocessConfig::validate() const {
  if (!(time_zero_threshold > 0.0 && time_zero_threshold < 1.0))
    throw std::invalid_argument("PreprocessConfig: time_zero_threshold must lie in (0, 1)");
  if (svd_rank_removed < 1) throw std::invalid_argument("PreprocessConfig: svd_rank_removed must be >= 1");
}

FrequencySweepTrace dc_remove(const FrequencySweepTrace& trace) {
  const auto s = trace.samples();
  cplx mean{0.0, 0.0};
  for (const auto& z : s) mean += z;
  mean /= static_cast<double>(s.size());
  std::vector<cplx> out(s.begin(), s.end());
  for (auto& z : out) z -= mean;
  return FrequencySweepTrace(trace.grid(), std::move(out));
}

FrequencyBScan dc_remove(const FrequencyBScan& bscan) {
  std::vector<std::vector<cplx>> raw(bscan.n_traces());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(bscan.n_traces()); ++i) {
    auto t = dc_remove(bscan.trace(static_cast<std::size_t>(i)));
    raw[static_cast<std::size_t>(i)].assign(t.samples().begin(), t.samples().end());
  }
  std::vector<FrequencySweepTrace> traces;
  traces.reserve(raw.size());
  for (auto& r : raw) traces.emplace_back(bscan.grid(), std::move(r));
  return FrequencyBScan(bscan.grid(), bscan.trace_spacing(), std::move(traces));
}

std::size_t detect_time_zero(const TimeBScan& bscan, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("detect_time_zero: threshold must lie in (0, 1)");
  std::vector<std::size_t> first;
  first.reserve(bscan.n_traces());
  for (std::size_t i = 0; i < bscan.n_traces(); ++i) {
    const auto tr = bscan.trace(i);
    double peak = 0.0;
    for (const auto& z : tr) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) continue;
    const double level = threshold * peak;
    for (std::size_t j = 0; j < tr.size(); ++j)
      if (std::abs(tr[j]) >= level) {
        first.push_back(j);
        break;
      }
  }
  if (first.empty()) throw Error("time-zero correction: every trace is zero");
  // Lower median for even counts.
  auto mid = first.begin() + static_cast<std::ptrdiff_t>((first.size() - 1) / 2);
  std::nth_element(first.begin(), mid, first.end());
  return *mid;
}

TimeBScan shift_time_zero(const TimeBScan& bscan, std::size_t shift) {
  if (shift == 0) return bscan;
  const std::size_t n = bscan.n_time();
  std::vector<cplx> out(bscan.n_traces() * n, cplx{0.0, 0.0});
  if (shift < n) {
    for (std::size_t i = 0; i < bscan.n_traces(); ++i) {
      const auto src = bscan.trace(i).subspan(shift);
      std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
  }
  return TimeBScan(bscan.time_step(), bscan.trace_spacing(), bscan.n_traces(), n, std::move(out),
                   bscan.time_zero_offset() + static_cast<double>(shift) * bscan.time_step());
}

TimeBScan time_zero_correct(const TimeBScan& bscan, const PreprocessConfig& cfg) {
  cfg.validate();
  return shift_time_zero(bscan, detect_time_zero(bscan, cfg.time_zero_threshold));
}

SvdBackground SvdBackground::fit(const TimeBScan& bscan, std::size_t rank) {
  const std::size_t rows = bscan.n_traces();
  const std::size_t cols = bscan.n_time();
  if (rows < 2) throw std::invalid_argument("background_remove_svd: at least two traces required");
  if (rank < 1 || rank >= std::min(rows, cols))
    throw std::invalid_argument("background_remove_svd: rank " + std::to_string(rank) +
                                " must be in [1, min(n_traces, n_time))");
  ConstMap X(bscan.data().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd(X), Eigen::ComputeThinV);

  SvdBackground bg;
  bg.rank_ = rank;
  bg.n_time_ = cols;
  bg.basis_.resize(cols * rank);
  const auto& V = svd.matrixV();
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t j = 0; j < cols; ++j)
      bg.basis_[r * cols + j] = V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r));
  const auto& sv = svd.singularValues();
  bg.singular_values_.assign(sv.data(), sv.data() + sv.size());
  return bg;
}

TimeBScan SvdBackground::apply(const TimeBScan& bscan) const {
  if (bscan.n_time() != n_time_) throw std::invalid_argument("SvdBackground::apply: n_time mismatch");
  const auto rows = static_cast<Eigen::Index>(bscan.n_traces());
  const auto cols = static_cast<Eigen::Index>(n_time_);
  ConstMap X(bscan.data().data(), rows, cols);
  Eigen::Map<const Eigen::MatrixXcd> V(basis_.data(), cols, static_cast<Eigen::Index>(rank_));
  Matrix R = X - (X * V) * V.adjoint();
  std::vector<cplx> out(R.data(), R.data() + R.size());
  return bscan.with_samples(std::move(out));
}

TimeBScan background_remove_svd(const TimeBScan& bscan, std::size_t rank) {
  return SvdBackground::fit(bscan, rank).apply(bscan);
}

TimeBScan background_remove_ms(const TimeBScan& bscan) {
  const std::size_t rows = bscan.n_traces();
  const std::size_t cols = bscan.n_time();
  if (rows < 2) throw std::invalid_argument("background_remove_ms: at least two traces required");
  std::vector<cplx> mean(cols, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < rows; ++i) {
    const auto tr = bscan.trace(i);
    for (std::size_t j = 0; j < cols; ++j) mean[j] += tr[j];
  }
  for (auto& m : mean) m /= static_cast<double>(rows);
  std::vector<cplx> out(bscan.data().begin(), bscan.data().end());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i)
    for (std::size_t j = 0; j < cols; ++j) out[static_cast<std::size_t>(i) * cols + j] -= mean[j];
  return bscan.with_samples(std::move(out));
}

TimeBScan background_remove(const TimeBScan& bscan, BackgroundMethod method, std::size_t svd_rank) {
  switch (method) {
    case BackgroundMethod::none: return bscan;
    case BackgroundMethod::svd: return background_remove_svd(bscan, svd_rank);
    case BackgroundMethod::ms: return background_remove_ms(bscan);
  }
  return bscan;
}

}  // namespace datff
