#pragma once

// Serial reference converters. Each term of the sum is evaluated literally
// with its own complex exponential; no recurrences, no threads. Kept for
// cross-checking the OpenMP kernels and as the benchmark baseline.

#include <vector>

#include "datff/convert.hpp"

namespace datff::reference {

std::vector<cplx> attenuated_idft(const FrequencySweepTrace& trace, double alpha, std::size_t n_time = 0);
std::vector<cplx> windowed_convert(const FrequencySweepTrace& trace, const FilterWindow& window);
TimeBScan convert_bscan(const FrequencyBScan& bscan, const ConversionMethod& method, std::size_t n_time = 0);

}  // namespace datff::reference
