#pragma once

// Include this instead of <omp.h>; builds without OpenMP fall back to serial.

#if defined(_OPENMP)
#include <omp.h>
namespace curecheck {
constexpr bool use_omp = true;
}  // namespace curecheck
#else
namespace curecheck {
constexpr bool use_omp = false;
}  // namespace curecheck
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
#endif

namespace curecheck {

// Every parallel kernel keeps a serial reference path selected by this flag.
// Both paths produce identical results; the serial one exists for testing
// and benchmarking.
enum class Execution { serial, parallel };

}  // namespace curecheck
