#include "ieim/threads.hpp"

#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ieim {

int worker_count() {
#if defined(_OPENMP)
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* s = std::getenv("IEIM_THREADS")) {
    const int cap = std::atoi(s);
    if (cap > 0 && cap < n) n = cap;
  }
  return n > 0 ? n : 1;
}

}  // namespace ieim
