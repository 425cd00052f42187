#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpres::par {

// Global switch for the OpenMP paths.  The serial fallback runs the same code
// in the same order, and every parallel reduction below stores per-index
// results and folds them serially, so enabling threads never changes a bit
// of the output.
bool enabled();
void set_enabled(bool on);
int max_threads();

template <class F>
void for_each(std::size_t n, F&& body) {
#ifdef _OPENMP
  if (enabled() && n > 1) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// eval(i) -> T; items are combined with += in index order.
template <class T, class Eval>
T indexed_sum(std::size_t n, T init, Eval&& eval) {
  std::vector<T> slots(n);
  for_each(n, [&](std::size_t i) { slots[i] = eval(i); });
  T acc = std::move(init);
  for (std::size_t i = 0; i < n; ++i) acc += slots[i];
  return acc;
}

template <class Eval>
double indexed_min(std::size_t n, double init, Eval&& eval) {
  std::vector<double> slots(n, init);
  for_each(n, [&](std::size_t i) { slots[i] = eval(i); });
  double m = init;
  for (double v : slots) m = v < m ? v : m;
  return m;
}

}  // namespace qpres::par
