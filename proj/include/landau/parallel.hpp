#pragma once

#include <exception>
#include <mutex>

namespace landau {

// Kernels take an execution policy. The serial path is the reference
// implementation: same per-point arithmetic, plain loop, no threads.
enum class Exec { serial, parallel };

// Thread count resolution: explicit value > LANDAU_THREADS > runtime default.
int resolve_threads(int requested);
void set_threads(int n);
int max_threads();

template <class F>
void parallel_for(long n, Exec ex, F&& body) {
  if (ex == Exec::serial || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace landau
