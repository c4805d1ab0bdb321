#pragma once

#include <exception>
#include <vector>

namespace lslasso {

/// 0 means "all available hardware threads".
int resolve_threads(int requested);

/// Reference implementation: evaluates fn(0..n-1) in order on the calling thread.
template <typename T, typename Fn>
std::vector<T> map_indices_serial(int n, Fn&& fn) {
  std::vector<T> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(fn(i));
  return out;
}

/// OpenMP version of map_indices_serial. Results land in index order, so the
/// output is identical to the serial one whenever fn(i) depends only on i.
/// The exception of the lowest failing index is rethrown.
template <typename T, typename Fn>
std::vector<T> map_indices_parallel(int n, int threads, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

template <typename T, typename Fn>
std::vector<T> map_indices(int n, int threads, Fn&& fn) {
  const int t = resolve_threads(threads);
  if (t <= 1 || n <= 1) return map_indices_serial<T>(n, fn);
  return map_indices_parallel<T>(n, t, fn);
}

}  // namespace lslasso
