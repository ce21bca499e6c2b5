#pragma once

// Point counting on elliptic curves over prime fields.
//
// Three routes to a_p = p + 1 - #E(F_p):
//   * count_points_enumerate: brute force over F_p^2 on the long model (any p)
//   * ec_count_points_naive:  Legendre-symbol sum on the short model (p > 3)
//   * ec_ap_bsgs:             Shanks-Mestre baby-step/giant-step order search
// ec_ap() dispatches between them by size of p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "satotate/error.hpp"
#include "satotate/modarith.hpp"

namespace satotate {

using i128 = __int128;

struct CurveSpec {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  std::uint64_t conductor = 1;
  std::string label;

  friend bool operator==(const CurveSpec&, const CurveSpec&) = default;
};

/// Standard b- and c-invariants and the discriminant of the long model.
struct CurveInvariants {
  i128 b2, b4, b6, b8, c4, c6, disc;
};

inline CurveInvariants invariants(const CurveSpec& e) {
  const i128 a1 = e.a1, a2 = e.a2, a3 = e.a3, a4 = e.a4, a6 = e.a6;
  CurveInvariants v{};
  v.b2 = a1 * a1 + 4 * a2;
  v.b4 = 2 * a4 + a1 * a3;
  v.b6 = a3 * a3 + 4 * a6;
  v.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  v.c4 = v.b2 * v.b2 - 24 * v.b4;
  v.c6 = -v.b2 * v.b2 * v.b2 + 36 * v.b2 * v.b4 - 216 * v.b6;
  v.disc = -v.b2 * v.b2 * v.b8 - 8 * v.b4 * v.b4 * v.b4 - 27 * v.b6 * v.b6 + 9 * v.b2 * v.b4 * v.b6;
  return v;
}

inline void validate(const CurveSpec& e) {
  if (e.conductor == 0) throw Error(ErrorKind::InvalidArgument, "conductor must be positive");
  if (invariants(e).disc == 0) throw Error(ErrorKind::InvalidArgument, "singular Weierstrass model (discriminant 0)");
}

namespace detail {

inline std::uint64_t reduce128(i128 a, std::uint64_t p) {
  i128 r = a % static_cast<i128>(p);
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

inline void require_good(const CurveSpec& e, std::uint64_t p) {
  if (e.conductor % p == 0)
    throw Error(ErrorKind::BadReduction, "p=" + std::to_string(p) + " divides the conductor");
}

}  // namespace detail

/// y^2 = x^3 + A x + B over F_p, p > 3.
struct ShortModel {
  std::uint64_t p, A, B;
};

/// Reduction of the long model to y^2 = x^3 - 27 c4 x - 54 c6 (isomorphic for p > 3).
inline ShortModel short_model(const CurveSpec& e, std::uint64_t p) {
  if (p <= 3) throw Error(ErrorKind::SmallCharacteristic, "short model needs p > 3");
  const auto v = invariants(e);
  const auto c4 = detail::reduce128(v.c4, p);
  const auto c6 = detail::reduce128(v.c6, p);
  ShortModel m{p, mod::neg(mod::mul(27 % p, c4, p), p), mod::neg(mod::mul(54 % p, c6, p), p)};
  if (detail::reduce128(v.disc, p) == 0)
    throw Error(ErrorKind::BadReduction,
                "model is singular mod p=" + std::to_string(p) + " although p does not divide the conductor");
  return m;
}

/// #E(F_p) by enumerating every (x, y) in F_p^2 on the long model, plus the
/// point at infinity. O(p^2); intended for p <= 3 and as a test oracle.
inline std::uint64_t count_points_enumerate(const CurveSpec& e, std::uint64_t p) {
  detail::require_good(e, p);
  if (p > 20000) throw Error(ErrorKind::InvalidArgument, "enumeration limited to p <= 20000");
  if (detail::reduce128(invariants(e).disc, p) == 0)
    throw Error(ErrorKind::BadReduction, "model is singular mod p=" + std::to_string(p));
  const std::uint64_t a1 = mod::reduce(e.a1, p), a2 = mod::reduce(e.a2, p), a3 = mod::reduce(e.a3, p),
                      a4 = mod::reduce(e.a4, p), a6 = mod::reduce(e.a6, p);
  std::uint64_t count = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t rhs = (((x * x % p) * x) % p + a2 * (x * x % p) + a4 * x + a6) % p;
    for (std::uint64_t y = 0; y < p; ++y) {
      const std::uint64_t lhs = (y * y + a1 * x % p * y + a3 * y) % p;
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

inline constexpr std::uint64_t kNaiveCostGuard = 100'000;

/// #E(F_p) = p + 1 + sum_x chi_p(x^3 + A x + B) on the reduced short model.
inline std::uint64_t ec_count_points_naive(const CurveSpec& e, std::uint64_t p,
                                           std::uint64_t cost_guard = kNaiveCostGuard) {
  detail::require_good(e, p);
  if (p <= 3) throw Error(ErrorKind::SmallCharacteristic, "naive count needs p > 3");
  if (p >= cost_guard)
    throw Error(ErrorKind::InvalidArgument, "p=" + std::to_string(p) + " exceeds naive cost guard");
  const ShortModel m = short_model(e, p);
  // chi table: +1 for nonzero squares, -1 otherwise (0 handled separately)
  std::vector<std::int8_t> chi(p, -1);
  chi[0] = 0;
  for (std::uint64_t y = 1; y <= p / 2; ++y) chi[y * y % p] = 1;
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < p; ++x) {
    const std::uint64_t v = ((x * x % p + m.A) % p * x + m.B) % p;
    sum += chi[v];
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p + 1) + sum);
}

// ---------------------------------------------------------------------------
// Baby-step/giant-step group-order search

namespace detail {

struct Point {
  std::uint64_t x = 0, y = 0;
  bool inf = true;
};

class CurveGroup {
 public:
  CurveGroup(std::uint64_t p, std::uint64_t A, std::uint64_t B) : p_(p), A_(A), B_(B) {}

  std::uint64_t p() const { return p_; }

  std::uint64_t rhs(std::uint64_t x) const {
    return mod::add(mod::mul(mod::add(mod::mul(x, x, p_), A_, p_), x, p_), B_, p_);
  }

  Point negate(const Point& P) const { return P.inf ? P : Point{P.x, mod::neg(P.y, p_), false}; }

  Point add(const Point& P, const Point& Q) const {
    if (P.inf) return Q;
    if (Q.inf) return P;
    std::uint64_t lambda;
    if (P.x == Q.x) {
      if (mod::add(P.y, Q.y, p_) == 0) return Point{};
      const std::uint64_t num = mod::add(mod::mul(3, mod::mul(P.x, P.x, p_), p_), A_, p_);
      lambda = mod::mul(num, mod::inv(mod::add(P.y, P.y, p_), p_), p_);
    } else {
      lambda = mod::mul(mod::sub(Q.y, P.y, p_), mod::inv(mod::sub(Q.x, P.x, p_), p_), p_);
    }
    const std::uint64_t x3 = mod::sub(mod::sub(mod::mul(lambda, lambda, p_), P.x, p_), Q.x, p_);
    const std::uint64_t y3 = mod::sub(mod::mul(lambda, mod::sub(P.x, x3, p_), p_), P.y, p_);
    return Point{x3, y3, false};
  }

  Point multiply(std::uint64_t k, Point P) const {
    Point R;
    while (k) {
      if (k & 1) R = add(R, P);
      P = add(P, P);
      k >>= 1;
    }
    return R;
  }

  template <class Rng>
  Point random_point(Rng& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(0, p_ - 1);
    while (true) {
      const std::uint64_t x = dist(rng);
      const std::uint64_t r = rhs(x);
      if (r == 0) return Point{x, 0, false};
      if (mod::legendre(r, p_) == 1) {
        std::uint64_t y = mod::sqrt(r, p_);
        if (dist(rng) & 1) y = mod::neg(y, p_);
        return Point{x, y, false};
      }
    }
  }

  /// Some m in [lo, hi] with mP = O, or nullopt.
  std::optional<std::uint64_t> find_annihilator(const Point& P, std::uint64_t lo, std::uint64_t hi) const {
    const std::uint64_t width = hi - lo + 1;
    auto s = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(width))));
    s = std::max<std::uint64_t>(s, 1);

    // baby steps jP, j = 1..s, keyed by x-coordinate
    std::vector<std::pair<std::uint64_t, std::uint64_t>> baby;  // (x, j)
    baby.reserve(s);
    Point jP = P;
    for (std::uint64_t j = 1; j <= s; ++j) {
      if (jP.inf) {
        // order of P is j <= s; the smallest multiple >= lo works
        const std::uint64_t m = (lo + j - 1) / j * j;
        if (m <= hi) return m;
        return std::nullopt;
      }
      baby.emplace_back(jP.x, j);
      jP = add(jP, P);
    }
    std::sort(baby.begin(), baby.end());

    // giant steps: centres c = lo + s + i(2s+1) cover c-s..c+s
    const Point step = multiply(2 * s + 1, P);
    std::uint64_t c = lo + s;
    Point T = multiply(c, P);
    for (std::uint64_t i = 0; c - s <= hi; ++i, c += 2 * s + 1, T = add(T, step)) {
      if (T.inf) {
        if (c <= hi) return c;
        continue;
      }
      auto it = std::lower_bound(baby.begin(), baby.end(), std::make_pair(T.x, std::uint64_t{0}));
      for (; it != baby.end() && it->first == T.x; ++it) {
        const std::uint64_t j = it->second;
        // T = +-jP; recover the sign from a y comparison
        const Point Q = multiply(j, P);
        const std::uint64_t m = (Q.y == T.y) ? c - j : c + j;
        if (m >= lo && m <= hi) return m;
      }
    }
    return std::nullopt;
  }

  /// Exact order of P given a multiple m of it.
  std::uint64_t order_from_multiple(const Point& P, std::uint64_t m) const {
    std::uint64_t n = m;
    std::uint64_t rest = m;
    for (std::uint64_t q = 2; q * q <= rest; q += (q == 2 ? 1 : 2)) {
      if (rest % q) continue;
      while (rest % q == 0) rest /= q;
      while (n % q == 0 && multiply(n / q, P).inf) n /= q;
    }
    if (rest > 1) {
      while (n % rest == 0 && multiply(n / rest, P).inf) n /= rest;
    }
    return n;
  }

  /// Whether R lies in the cyclic group generated by P (of order n).
  bool in_cyclic(const Point& R, const Point& P, std::uint64_t n) const {
    if (R.inf) return true;
    const auto m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<std::pair<std::uint64_t, std::uint64_t>> baby;  // (x, y) of jP, j = 1..m-1
    Point jP = P;
    for (std::uint64_t j = 1; j < m; ++j, jP = add(jP, P)) baby.emplace_back(jP.x, jP.y);
    std::sort(baby.begin(), baby.end());
    const Point giant = negate(multiply(m, P));
    Point cur = R;
    for (std::uint64_t i = 0; i <= m; ++i, cur = add(cur, giant)) {
      if (cur.inf) return true;
      if (std::binary_search(baby.begin(), baby.end(), std::make_pair(cur.x, cur.y))) return true;
    }
    return false;
  }

  /// |<P, Q>| for points of known orders nP, nQ.
  std::uint64_t span_order(const Point& P, std::uint64_t nP, const Point& Q, std::uint64_t nQ) const {
    for (std::uint64_t k = 1; k <= nQ; ++k) {
      if (nQ % k == 0 && in_cyclic(multiply(k, Q), P, nP)) return nP * k;
    }
    return nP * nQ;
  }

 private:
  std::uint64_t p_, A_, B_;
};

inline std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace detail

struct BsgsOptions {
  /// Random points tried (on the curve and its quadratic twist) before giving up.
  int max_points = 64;
  std::uint64_t seed = 0x5a70'7a7e'0000'0001ULL;
};

/// Naive/BSGS crossover used by ec_ap().
inline constexpr std::uint64_t kBsgsCrossover = 229;

/// a_p by Shanks-Mestre order search in the Hasse interval.
///
/// Points are drawn on E and on its quadratic twist E' (#E + #E' = 2p + 2).
/// With lambda = lcm of point orders on E and lambda' on E', the search ends
/// once exactly one N in the Hasse interval has lambda | N and
/// lambda' | 2p + 2 - N. For p > 229 this is guaranteed to happen. Below
/// that, a non-cyclic group can leave several candidates; the search then
/// also measures |<P, Q>| by discrete-log membership tests, which divides
/// the group order and generically equals it.
inline std::int64_t ec_ap_bsgs(const CurveSpec& e, std::uint64_t p, const BsgsOptions& opt = {}) {
  if (p <= 3) throw Error(ErrorKind::SmallCharacteristic, "BSGS needs p > 3");
  detail::require_good(e, p);
  const ShortModel m = short_model(e, p);

  std::uint64_t d = 2;
  while (mod::legendre(d, p) != -1) ++d;
  const std::uint64_t d2 = mod::mul(d, d, p);
  const detail::CurveGroup E(p, m.A, m.B);
  const detail::CurveGroup T(p, mod::mul(m.A, d2, p), mod::mul(m.B, mod::mul(d2, d, p), p));

  // Hasse interval [p + 1 - 2 sqrt p, p + 1 + 2 sqrt p]
  const double two_root = 2.0 * std::sqrt(static_cast<double>(p));
  std::uint64_t lo = p + 1 - static_cast<std::uint64_t>(std::floor(two_root));
  std::uint64_t hi = p + 1 + static_cast<std::uint64_t>(std::floor(two_root));
  while ((p + 1 - lo + 1) * (p + 1 - lo + 1) <= 4 * p) --lo;  // guard floating floor
  while ((hi + 1 - p - 1) * (hi + 1 - p - 1) <= 4 * p) ++hi;

  std::mt19937_64 rng(opt.seed ^ (p * 0x9e3779b97f4a7c15ULL));

  // Known divisors of #E and #E'. For each group, `order` is the lcm of the
  // point orders seen and of the orders of two-point subgroups <P_max, Q>.
  struct Side {
    const detail::CurveGroup* group;
    std::uint64_t lo, hi;
    std::uint64_t divisor = 1;
    detail::Point best;
    std::uint64_t best_order = 0;
  };
  Side sides[2] = {{&E, lo, hi, 1, {}, 0}, {&T, 2 * p + 2 - hi, 2 * p + 2 - lo, 1, {}, 0}};

  auto candidates = [&] {
    std::vector<std::uint64_t> out;
    const std::uint64_t step = sides[0].divisor;
    for (std::uint64_t N = (lo + step - 1) / step * step; N <= hi; N += step) {
      if ((2 * p + 2 - N) % sides[1].divisor == 0) out.push_back(N);
    }
    return out;
  };

  auto absorb = [&](Side& side, bool use_spans) {
    const detail::CurveGroup& G = *side.group;
    const detail::Point P = G.random_point(rng);
    const auto mult = G.find_annihilator(P, side.lo, side.hi);
    if (!mult)
      throw Error(ErrorKind::AmbiguousOrder,
                  "no multiple of a point order in the Hasse interval at p=" + std::to_string(p));
    const std::uint64_t n = G.order_from_multiple(P, *mult);
    side.divisor = detail::lcm_u64(side.divisor, n);
    if (use_spans && side.best_order != 0)
      side.divisor = detail::lcm_u64(side.divisor, G.span_order(side.best, side.best_order, P, n));
    if (n > side.best_order) {
      side.best = P;
      side.best_order = n;
    }
  };

  // Mestre: alternate between E and E' on point orders alone. Only when that
  // stalls (small p, non-cyclic groups) fold in two-generator subgroup orders.
  constexpr int kOrdersOnly = 8;
  for (int attempt = 0; attempt < opt.max_points; ++attempt) {
    Side& side = (attempt < 2 || attempt % 2 == 0) ? sides[0] : sides[1];
    absorb(side, attempt >= kOrdersOnly);
    const auto c = candidates();
    if (c.empty())
      throw Error(ErrorKind::AmbiguousOrder, "inconsistent point orders at p=" + std::to_string(p));
    if (c.size() == 1) return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(c.front());
  }
  throw Error(ErrorKind::AmbiguousOrder,
              "order search did not isolate #E(F_p) at p=" + std::to_string(p));
}

/// a_p for a good prime, choosing enumeration (p <= 3), the Legendre sum
/// (p <= kBsgsCrossover) or BSGS.
inline std::int64_t ec_ap(const CurveSpec& e, std::uint64_t p, const BsgsOptions& opt = {}) {
  if (p <= 3) return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(count_points_enumerate(e, p));
  if (p <= kBsgsCrossover)
    return static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(ec_count_points_naive(e, p));
  return ec_ap_bsgs(e, p, opt);
}

}  // namespace satotate
