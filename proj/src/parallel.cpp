#include "mrl/parallel.hpp"

namespace mrl::par {

Mode default_mode() {
#ifdef _OPENMP
  return Mode::Parallel;
#else
  return Mode::Serial;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mrl::par
