#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace itp::par {

// Execution mode for the numeric kernels.  Results are bit-for-bit equal in
// both modes: work is split into fixed-size blocks whose internal loops run
// sequentially, and block results are combined in block order.  OpenMP only
// decides which thread fills which block.
enum class Mode { Serial, OpenMP };

inline Mode& mode() {
#ifdef _OPENMP
  static Mode m = Mode::OpenMP;
#else
  static Mode m = Mode::Serial;
#endif
  return m;
}

constexpr std::int64_t kBlock = 4096;

// body(i) for i in [0, n); independent iterations only.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
  if (mode() == Mode::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

namespace detail {
template <class T, class F>
T blocked_reduce(std::int64_t n, F&& term, T init,
                 T (*combine)(const T&, const T&)) {
  if (n <= 0) return init;
  const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<T> partial(static_cast<std::size_t>(nblocks), init);
  auto fill = [&](std::int64_t b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    T acc = init;
    for (std::int64_t i = lo; i < hi; ++i) acc = combine(acc, term(i));
    partial[static_cast<std::size_t>(b)] = acc;
  };
#ifdef _OPENMP
  if (mode() == Mode::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nblocks; ++b) fill(b);
  } else {
    for (std::int64_t b = 0; b < nblocks; ++b) fill(b);
  }
#else
  for (std::int64_t b = 0; b < nblocks; ++b) fill(b);
#endif
  T acc = init;
  for (std::int64_t b = 0; b < nblocks; ++b)
    acc = combine(acc, partial[static_cast<std::size_t>(b)]);
  return acc;
}
}  // namespace detail

template <class F>
std::complex<double> blocked_sum(std::int64_t n, F&& term) {
  using C = std::complex<double>;
  return detail::blocked_reduce<C>(
      n, std::forward<F>(term), C{0.0, 0.0},
      +[](const C& a, const C& b) { return a + b; });
}

template <class F>
double blocked_max(std::int64_t n, F&& value) {
  return detail::blocked_reduce<double>(
      n, std::forward<F>(value), -1.0,
      +[](const double& a, const double& b) { return a > b ? a : b; });
}

// parallel_for whose body may throw: the first exception is captured and
// rethrown on the calling thread after the loop drains.
template <class F>
void guarded_for(std::int64_t n, F&& body) {
  std::exception_ptr err = nullptr;
  std::mutex m;
  parallel_for(n, [&](std::int64_t i) {
    try {
      body(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(m);
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);
}

}  // namespace itp::par
