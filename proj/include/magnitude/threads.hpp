#pragma once

#include <cstdlib>
#include <string>

#include <Eigen/Core>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace magnitude {

inline constexpr const char* thread_env_var = "MAGNITUDE_THREADS";

/// Applies MAGNITUDE_THREADS (if set to a positive integer) to OpenMP and
/// Eigen. Returns the thread count in effect.
inline int configure_threads_from_env() {
  if (const char* value = std::getenv(thread_env_var)) {
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (end != value && *end == '\0' && n > 0 && n < 4096) {
#if defined(_OPENMP)
      omp_set_num_threads(static_cast<int>(n));
#endif
      Eigen::setNbThreads(static_cast<int>(n));
    }
  }
  return Eigen::nbThreads();
}

}  // namespace magnitude
