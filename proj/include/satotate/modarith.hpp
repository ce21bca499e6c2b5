#pragma once

// Arithmetic modulo an odd prime p < 2^62 using 128-bit widening products.

#include <cstdint>

namespace satotate::mod {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 add(u64 a, u64 b, u64 p) {
  const u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 neg(u64 a, u64 p) { return a == 0 ? 0 : p - a; }

/// Reduces a signed integer into [0, p).
inline u64 reduce(std::int64_t a, u64 p) {
  const std::int64_t r = a % static_cast<std::int64_t>(p);
  return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

inline u64 pow(u64 base, u64 e, u64 p) {
  u64 result = 1 % p;
  base %= p;
  while (e) {
    if (e & 1) result = mul(result, base, p);
    base = mul(base, base, p);
    e >>= 1;
  }
  return result;
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
inline u64 inv(u64 a, u64 p) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(a % p);
  while (new_r != 0) {
    const std::int64_t q = r / new_r;
    const std::int64_t tt = t - q * new_t;
    t = new_t;
    new_t = tt;
    const std::int64_t rr = r - q * new_r;
    r = new_r;
    new_r = rr;
  }
  return t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(p)) : static_cast<u64>(t);
}

/// Legendre symbol (a/p) in {-1, 0, 1} by Euler's criterion.
inline int legendre(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  return pow(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// Square root of a quadratic residue (Tonelli-Shanks). Precondition:
/// legendre(a, p) != -1.
inline u64 sqrt(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p % 4 == 3) return pow(a, (p + 1) / 4, p);
  u64 q = p - 1;
  unsigned s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (legendre(z, p) != -1) ++z;
  u64 m = s;
  u64 c = pow(z, q, p);
  u64 t = pow(a, q, p);
  u64 r = pow(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mul(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mul(b, b, p);
    m = i;
    c = mul(b, b, p);
    t = mul(t, c, p);
    r = mul(r, b, p);
  }
  return r;
}

}  // namespace satotate::mod
