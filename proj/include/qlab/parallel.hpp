#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qlab {

// Sum of f(i) for i in [0, n), split over hardware threads in contiguous
// chunks. The chunking is deterministic, so results do not depend on timing.
template <class F>
double parallel_sum(std::size_t n, F f) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n / 8));
  if (workers == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
  }
  std::vector<double> partial(workers, 0.0);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[w] = s;
      });
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

// Runs f(i) for i in [0, n) on hardware threads; f must write to disjoint outputs.
template <class F>
void parallel_for(std::size_t n, F f) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = n * w / workers; i < n * (w + 1) / workers; ++i) f(i);
    });
}

}  // namespace qlab
