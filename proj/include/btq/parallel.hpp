#pragma once

// Elementwise parallelism wrapper. Kernels call parallel_for and get OpenMP
// scheduling when it is compiled in and serial mode is off; the serial path is
// kept as the reference implementation for tests and benchmarks. Work items
// must be independent, so both paths produce identical results.

#include <cstdint>

namespace btq {

// Process-wide switch; set true to force the serial reference path.
bool parallel_serial_mode();
void set_parallel_serial_mode(bool serial);

namespace detail {
void parallel_for_impl(int64_t n, void* ctx, void (*body)(void*, int64_t));
}

template <class Fn>
void parallel_for(int64_t n, Fn&& fn) {
  auto thunk = [](void* ctx, int64_t i) { (*static_cast<Fn*>(ctx))(i); };
  detail::parallel_for_impl(n, &fn, thunk);
}

}  // namespace btq
