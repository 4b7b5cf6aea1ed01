#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace datff {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Caps the worker count of every parallel kernel. n <= 0 leaves the default.
inline void set_max_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace datff
