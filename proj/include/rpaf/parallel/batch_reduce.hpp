#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include <omp.h>

namespace rpaf::parallel {

/// Number of fixed slices a batch is cut into. The slicing never depends on
/// the thread count, so the parallel reduction is bit-reproducible.
inline constexpr std::size_t kDefaultChunks = 16;

/// Reference reduction: `out` is zeroed, then fn(i, out) adds sample i's
/// gradient for i = 0..n-1 in order. Returns the sum of fn's return values.
template <class Fn>
double reduce_gradients_serial(std::size_t n, std::span<double> out, Fn&& fn) {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += fn(i, out);
  return total;
}

/// Same contract as reduce_gradients_serial, computed over `chunks` fixed
/// slices in parallel. Each slice accumulates into its own buffer and the
/// buffers are summed in slice order, so the result is identical for any
/// number of OpenMP threads (though it may differ from the serial reference
/// in the last bits).
template <class Fn>
double reduce_gradients_parallel(std::size_t n, std::span<double> out, Fn&& fn,
                                 std::size_t chunks = kDefaultChunks) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(out.size(), 0.0));
  std::vector<double> partial_total(chunks, 0.0);
  std::exception_ptr failure;
  std::mutex failure_mutex;

#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    try {
      const std::size_t begin = n * c / chunks;
      const std::size_t end = n * (c + 1) / chunks;
      std::span<double> buffer(partial[c]);
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) sum += fn(i, buffer);
      partial_total[c] = sum;
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += partial[c][k];
    total += partial_total[c];
  }
  return total;
}

/// Runs body(i) for i in [0, n) across OpenMP threads. The first exception
/// thrown by any iteration is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline int max_threads() { return omp_get_max_threads(); }

}  // namespace rpaf::parallel
