#include "btq/parallel.hpp"

#include <atomic>
#include <exception>

namespace btq {

namespace {
std::atomic<bool> g_serial{false};
}

bool parallel_serial_mode() { return g_serial.load(std::memory_order_relaxed); }
void set_parallel_serial_mode(bool serial) { g_serial.store(serial, std::memory_order_relaxed); }

namespace detail {

// An exception must not escape an OpenMP region, so the first one thrown by
// any work item is captured here and rethrown to the caller; later items are
// skipped once a failure is recorded.
void parallel_for_impl(int64_t n, void* ctx, void (*body)(void*, int64_t)) {
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto guarded = [&](int64_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      body(ctx, i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (parallel_serial_mode()) {
    for (int64_t i = 0; i < n; ++i) guarded(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) guarded(i);
#else
    for (int64_t i = 0; i < n; ++i) guarded(i);
#endif
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace btq
