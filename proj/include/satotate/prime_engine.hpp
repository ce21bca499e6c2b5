#pragma once

// Odd-only segmented sieve of Eratosthenes.
//
// Every "sum over p <= x" in the library is driven by PrimeStream, either
// directly or through for_each_prime / primes_in.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include "satotate/error.hpp"

namespace satotate {

using prime_t = std::uint64_t;

/// Bytes of odd-only bitmap per segment (one byte per odd integer).
inline constexpr std::size_t kDefaultSegmentBytes = std::size_t{1} << 20;

/// Documented desk-scale ceiling; not enforced.
inline constexpr prime_t kDeskScaleCeiling = 100'000'000;

struct PrimeRange {
  prime_t lo = 2;
  prime_t hi = 2;
  std::size_t segment_size = kDefaultSegmentBytes;

  void validate() const {
    if (lo < 2) throw Error(ErrorKind::InvalidArgument, "PrimeRange: lo must be >= 2");
    if (hi < lo) throw Error(ErrorKind::InvalidArgument, "PrimeRange: hi < lo");
    if (segment_size == 0) throw Error(ErrorKind::InvalidArgument, "PrimeRange: segment_size must be > 0");
  }
};

namespace detail {

inline prime_t isqrt(prime_t n) {
  auto r = static_cast<prime_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// Odd primes <= limit by a plain (unsegmented) sieve; used for base primes.
inline std::vector<std::uint32_t> small_odd_primes(std::uint64_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 3) return out;
  const std::size_t n = static_cast<std::size_t>((limit - 1) / 2);  // odd numbers 3..limit
  std::vector<std::uint8_t> composite(n + 1, 0);                   // index i <-> 2i+1
  for (std::size_t i = 1; i <= n; ++i) {
    if (composite[i]) continue;
    const std::uint64_t q = 2 * i + 1;
    out.push_back(static_cast<std::uint32_t>(q));
    for (std::uint64_t j = (q * q - 1) / 2; j <= n; j += q) composite[j] = 1;
  }
  return out;
}

}  // namespace detail

/// Single-consumer stream of the primes in [lo, hi], ascending.
///
/// hi may be left at its default to obtain an effectively unbounded stream
/// (used by the least-prime search).
class PrimeStream {
 public:
  explicit PrimeStream(prime_t lo = 2,
                       prime_t hi = std::numeric_limits<prime_t>::max() / 4,
                       std::size_t segment_bytes = kDefaultSegmentBytes)
      : hi_(hi), segment_bytes_(segment_bytes) {
    PrimeRange{lo, hi, segment_bytes_}.validate();
    emit_two_ = lo <= 2;
    next_odd_ = std::max<prime_t>(3, lo | 1);
  }

  explicit PrimeStream(const PrimeRange& r) : PrimeStream(r.lo, r.hi, r.segment_size) {}

  std::optional<prime_t> next() {
    if (emit_two_) {
      emit_two_ = false;
      if (hi_ >= 2) return prime_t{2};
    }
    while (true) {
      while (cursor_ < segment_.size()) {
        const std::size_t i = cursor_++;
        if (!segment_[i]) return segment_lo_ + 2 * static_cast<prime_t>(i);
      }
      if (done_ || !sieve_next_segment()) {
        done_ = true;
        return std::nullopt;
      }
    }
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = prime_t;
    using difference_type = std::ptrdiff_t;
    using pointer = const prime_t*;
    using reference = const prime_t&;

    iterator() = default;
    explicit iterator(PrimeStream* s) : stream_(s) { advance(); }

    reference operator*() const { return *value_; }
    iterator& operator++() {
      advance();
      return *this;
    }
    void operator++(int) { advance(); }
    friend bool operator==(const iterator& a, std::default_sentinel_t) { return !a.value_; }

   private:
    void advance() { value_ = stream_->next(); }
    PrimeStream* stream_ = nullptr;
    std::optional<prime_t> value_;
  };

  iterator begin() { return iterator(this); }
  std::default_sentinel_t end() { return {}; }

 private:
  bool sieve_next_segment() {
    if (next_odd_ > hi_) return false;
    segment_lo_ = next_odd_;
    const prime_t span = hi_ - segment_lo_;
    const std::size_t count = static_cast<std::size_t>(
        std::min<prime_t>(segment_bytes_, span / 2 + 1));
    const prime_t segment_hi = segment_lo_ + 2 * static_cast<prime_t>(count - 1);
    next_odd_ = segment_hi + 2;

    ensure_base_primes(detail::isqrt(segment_hi));
    segment_.assign(count, 0);
    cursor_ = 0;
    for (const std::uint32_t q32 : base_) {
      const prime_t q = q32;
      if (q * q > segment_hi) break;
      prime_t start = q * q;
      if (start < segment_lo_) {
        start = (segment_lo_ + q - 1) / q * q;
        if ((start & 1) == 0) start += q;
      }
      for (prime_t j = (start - segment_lo_) / 2; j < count; j += q) segment_[j] = 1;
    }
    return true;
  }

  void ensure_base_primes(prime_t needed) {
    if (needed <= base_limit_) return;
    base_limit_ = std::max<prime_t>(needed, 2 * base_limit_);
    base_ = detail::small_odd_primes(base_limit_);
  }

  prime_t hi_;
  std::size_t segment_bytes_;
  bool emit_two_ = false;
  bool done_ = false;
  prime_t next_odd_ = 3;
  prime_t segment_lo_ = 3;
  std::vector<std::uint8_t> segment_;
  std::size_t cursor_ = 0;
  std::vector<std::uint32_t> base_;
  prime_t base_limit_ = 0;
};

/// Calls fn(p) for each prime in the range. If fn returns bool, returning
/// false stops the enumeration.
template <class Fn>
void for_each_prime(const PrimeRange& range, Fn&& fn) {
  PrimeStream stream(range);
  while (auto p = stream.next()) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn&, prime_t>, bool>) {
      if (!fn(*p)) return;
    } else {
      fn(*p);
    }
  }
}

inline std::vector<prime_t> primes_in(const PrimeRange& range) {
  std::vector<prime_t> out;
  for_each_prime(range, [&](prime_t p) { out.push_back(p); });
  return out;
}

/// pi(x) = #{p <= x}.
inline std::uint64_t prime_count(prime_t x, std::size_t segment_bytes = kDefaultSegmentBytes) {
  if (x < 2) return 0;
  std::uint64_t n = 0;
  for_each_prime(PrimeRange{2, x, segment_bytes}, [&](prime_t) { ++n; });
  return n;
}

}  // namespace satotate
