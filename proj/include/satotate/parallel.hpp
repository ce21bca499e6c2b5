#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace satotate {

/// Effective worker count: SATOTATE_THREADS overrides the request; 0 means
/// hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (const char* env = std::getenv("SATOTATE_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) requested = static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

/// Runs fn(begin, end) over `threads` contiguous blocks of [0, n). The first
/// exception (lowest block) is rethrown after all workers join.
template <class Fn>
void parallel_blocks(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t blocks = std::min<std::size_t>(threads, n);
  std::vector<std::exception_ptr> errors(blocks);
  std::vector<std::thread> pool;
  pool.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
    pool.emplace_back([&, b, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sums term(i) for i in [0, n) in fixed chunks of `chunk` terms, chunk
/// partials combined by a pairwise tree. The result is independent of the
/// thread count.
template <class Term>
double deterministic_sum(std::size_t n, Term&& term, unsigned threads = 1, std::size_t chunk = 4096) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_blocks(nchunks, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      double s = 0.0;
      const std::size_t end = std::min(n, (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) s += term(i);
      partial[c] = s;
    }
  });
  while (partial.size() > 1) {
    std::vector<double> next((partial.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = partial[2 * i] + (2 * i + 1 < partial.size() ? partial[2 * i + 1] : 0.0);
    partial.swap(next);
  }
  return partial[0];
}

}  // namespace satotate
