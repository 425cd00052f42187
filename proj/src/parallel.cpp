#include "qpres/parallel.hpp"

#include <atomic>

namespace qpres::par {

namespace {
std::atomic<bool> g_enabled{true};
}

bool enabled() {
#ifdef _OPENMP
  return g_enabled.load(std::memory_order_relaxed);
#else
  return false;
#endif
}

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }

int max_threads() {
#ifdef _OPENMP
  return enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

}  // namespace qpres::par
