#pragma once

// OpenMP compatibility layer. Other translation units include this header
// instead of <omp.h> so the library still builds without OpenMP.

#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace depthgaze::parallel {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Sets the OpenMP team size for the lifetime of the guard. n <= 0 leaves it alone.
class ThreadGuard {
 public:
  explicit ThreadGuard(int n) : previous_(max_threads()), active_(n > 0) {
    if (active_) set_threads(n);
  }
  ~ThreadGuard() {
    if (active_) set_threads(previous_);
  }
  ThreadGuard(const ThreadGuard&) = delete;
  ThreadGuard& operator=(const ThreadGuard&) = delete;

 private:
  int previous_;
  bool active_;
};

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how the caller produced them.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace depthgaze::parallel
