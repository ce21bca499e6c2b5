#pragma once

// Empirical Sato-Tate statistics and the discrepancy-bound machinery:
// interval counts, exact one-dimensional discrepancy, the Erdos-Turan bound,
// Chebyshev-sum bound shapes in one and two dimensions, least primes in an
// interval, the theoretical bound curves and log-log decay fits.
//
// All intervals are closed: theta_p == alpha or beta counts as inside.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satotate/angles.hpp"
#include "satotate/elliptic.hpp"
#include "satotate/error.hpp"
#include "satotate/parallel.hpp"
#include "satotate/prime_engine.hpp"
#include "satotate/st_measure.hpp"

namespace satotate {

// ---------------------------------------------------------------------------
// Counts

inline std::uint64_t count_in_interval(const AngleSeries& s, const Interval& I, std::uint64_t x) {
  I.validate();
  const auto pts = s.upto(x);
  return static_cast<std::uint64_t>(
      std::count_if(pts.begin(), pts.end(), [&](const AnglePoint& a) { return I.contains(a.theta); }));
}

/// Angles of two forms at the primes good for both, p <= x.
struct PairedAngle {
  prime_t p;
  double theta1, theta2;
};

inline std::vector<PairedAngle> paired_angles(const AngleSeries& s1, const AngleSeries& s2, std::uint64_t x) {
  const auto a = s1.upto(x);
  const auto b = s2.upto(x);
  std::vector<PairedAngle> out;
  out.reserve(std::min(a.size(), b.size()));
  std::size_t j = 0;
  for (const auto& pa : a) {
    while (j < b.size() && b[j].p < pa.p) ++j;
    if (j < b.size() && b[j].p == pa.p) out.push_back({pa.p, pa.theta, b[j].theta});
  }
  return out;
}

inline std::uint64_t joint_count(const AngleSeries& s1, const AngleSeries& s2, const Interval& I1,
                                 const Interval& I2, std::uint64_t x) {
  I1.validate();
  I2.validate();
  const auto pairs = paired_angles(s1, s2, x);
  return static_cast<std::uint64_t>(std::count_if(pairs.begin(), pairs.end(), [&](const PairedAngle& q) {
    return I1.contains(q.theta1) && I2.contains(q.theta2);
  }));
}

// ---------------------------------------------------------------------------
// One-dimensional discrepancy

/// u_p = F_ST(theta_p) for the points p <= x; maps mu_ST to Lebesgue measure.
inline std::vector<double> uniformized(const AngleSeries& s, std::uint64_t x) {
  const auto pts = s.upto(x);
  std::vector<double> u(pts.size());
  std::transform(pts.begin(), pts.end(), u.begin(), [](const AnglePoint& a) { return st_cdf(a.theta); });
  return u;
}

/// sup over closed intervals J in [0,1] of |#{u in J}/n - |J||, exactly.
///
/// With u sorted and g_k = k/n - u_(k) (g_0 = 0, g_{n+1} = 1/n after adding
/// sentinels u_(0) = 0, u_(n+1) = 1):
///   closed [u_(i), u_(j)], i <= j:     (j-i+1)/n - (u_j - u_i) = g_j - g_i + 1/n
///   open  (u_(i), u_(j)), i < j:       (u_j - u_i) - (j-i-1)/n = g_i - g_j + 1/n
/// Ties are covered because the extremal pair among equal values attains the
/// true count. One pass with running extrema.
inline double interval_discrepancy(std::vector<double> u) {
  const std::size_t n = u.size();
  if (n == 0) return 0.0;
  std::sort(u.begin(), u.end());
  const double inv_n = 1.0 / static_cast<double>(n);
  auto g = [&](std::size_t k) {
    if (k == 0) return 0.0;
    if (k == n + 1) return inv_n;
    return static_cast<double>(k) * inv_n - u[k - 1];
  };
  double over = 0.0, under = 0.0;
  double min_g = g(1);   // min over i in [1, j]
  double max_g = g(0);   // max over i in [0, j)
  for (std::size_t j = 1; j <= n + 1; ++j) {
    const double gj = g(j);
    if (j <= n) {
      min_g = std::min(min_g, gj);
      over = std::max(over, gj - min_g + inv_n);
    }
    under = std::max(under, max_g - gj + inv_n);
    max_g = std::max(max_g, gj);
  }
  return std::clamp(std::max(over, under), 0.0, 1.0);
}

inline double exact_discrepancy_1d(const AngleSeries& s, std::uint64_t x) {
  return interval_discrepancy(uniformized(s, x));
}

/// 1/(M+1) + (3/n) sum_{m=1}^M (1/m) |sum_j e^{2 pi i m u_j}|.
inline double erdos_turan_bound(std::span<const double> u, int M, unsigned threads = 1) {
  if (M < 1) throw Error(ErrorKind::InvalidArgument, "Erdos-Turan bound needs M >= 1");
  if (u.empty()) throw Error(ErrorKind::InvalidArgument, "Erdos-Turan bound needs at least one point");
  double tail = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double w = 2.0 * kPi * m;
    const double re = deterministic_sum(u.size(), [&](std::size_t i) { return std::cos(w * u[i]); }, threads);
    const double im = deterministic_sum(u.size(), [&](std::size_t i) { return std::sin(w * u[i]); }, threads);
    tail += std::hypot(re, im) / m;
  }
  return 1.0 / (M + 1) + 3.0 / static_cast<double>(u.size()) * tail;
}

inline double erdos_turan_bound(const AngleSeries& s, std::uint64_t x, int M, unsigned threads = 1) {
  const auto u = uniformized(s, x);
  return erdos_turan_bound(u, M, threads);
}

// ---------------------------------------------------------------------------
// Chebyshev sums and the bound shapes built on them

/// S_m = sum_{p <= x good} U_m(cos theta_p) for m = 0..M. Chunked so the
/// result does not depend on the thread count.
inline std::vector<double> cheb_sums(std::span<const AnglePoint> pts, int M, unsigned threads = 1) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t nchunks = (pts.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial(nchunks, std::vector<double>(M + 1, 0.0));
  parallel_blocks(nchunks, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> u;
    for (std::size_t c = lo; c < hi; ++c) {
      const std::size_t end = std::min(pts.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        cheb_u_all(M, pts[i].theta, u);
        for (int m = 0; m <= M; ++m) partial[c][m] += u[m];
      }
    }
  });
  std::vector<double> total(M + 1, 0.0);
  for (const auto& part : partial)
    for (int m = 0; m <= M; ++m) total[m] += part[m];
  return total;
}

/// c * (pi(x)/M + sum_{m=1}^M (1/m) |S_m|), an absolute-count bound candidate
/// for |pi_{f,I}(x) - mu_ST(I) pi(x)|.
inline double cheb_sum_bound(std::span<const double> sums, std::uint64_t pi_x, int M, double c) {
  if (M < 3) throw Error(ErrorKind::InvalidArgument, "Chebyshev-sum bound needs M >= 3");
  if (!(c > 0)) throw Error(ErrorKind::InvalidArgument, "bound constant must be positive");
  if (sums.size() < static_cast<std::size_t>(M) + 1)
    throw Error(ErrorKind::InvalidArgument, "need Chebyshev sums for m = 0..M");
  double tail = 0.0;
  for (int m = 1; m <= M; ++m) tail += std::abs(sums[m]) / m;
  return c * (static_cast<double>(pi_x) / M + tail);
}

inline double cheb_sum_bound(const AngleSeries& s, std::uint64_t x, int M, double c, unsigned threads = 1) {
  if (M < 3) throw Error(ErrorKind::InvalidArgument, "Chebyshev-sum bound needs M >= 3");
  const auto sums = cheb_sums(s.upto(x), M, threads);
  return cheb_sum_bound(sums, prime_count(x), M, c);
}

/// T_{m1,m2} = sum over common good primes of U_{m1}(cos theta1) U_{m2}(cos theta2).
inline std::vector<std::vector<double>> cheb_sums_2d(std::span<const PairedAngle> pairs, int M) {
  std::vector<std::vector<double>> T(M + 1, std::vector<double>(M + 1, 0.0));
  std::vector<double> u1, u2;
  for (const auto& q : pairs) {
    cheb_u_all(M, q.theta1, u1);
    cheb_u_all(M, q.theta2, u2);
    for (int a = 0; a <= M; ++a)
      for (int b = 0; b <= M; ++b) T[a][b] += u1[a] * u2[b];
  }
  return T;
}

/// c * (pi(x)/M + sum_{(m1,m2) != (0,0), m_i <= M} |T_{m1,m2}| / ((m1+1)(m2+1))).
inline double cheb_sum_bound_2d(const std::vector<std::vector<double>>& T, std::uint64_t pi_x, int M, double c) {
  if (M < 3) throw Error(ErrorKind::InvalidArgument, "Chebyshev-sum bound needs M >= 3");
  if (!(c > 0)) throw Error(ErrorKind::InvalidArgument, "bound constant must be positive");
  double tail = 0.0;
  for (int a = 0; a <= M; ++a)
    for (int b = 0; b <= M; ++b)
      if (a != 0 || b != 0) tail += std::abs(T[a][b]) / ((a + 1.0) * (b + 1.0));
  return c * (static_cast<double>(pi_x) / M + tail);
}

inline double cheb_sum_bound_2d(const AngleSeries& s1, const AngleSeries& s2, std::uint64_t x, int M, double c) {
  if (M < 3) throw Error(ErrorKind::InvalidArgument, "Chebyshev-sum bound needs M >= 3");
  const auto pairs = paired_angles(s1, s2, x);
  return cheb_sum_bound_2d(cheb_sums_2d(pairs, M), prime_count(x), M, c);
}

// ---------------------------------------------------------------------------
// Two-dimensional box discrepancy on a grid

inline constexpr int kDefaultGrid = 64;

/// Grid-restricted box discrepancy of points in [0,1]^2 against Lebesgue
/// measure: sup over boxes (a1,b1] x (a2,b2] with corners on the G x G grid
/// (points at 0 fall in the first cell). The true all-box sup differs from
/// this by at most 2 * (2/G).
inline double grid_box_discrepancy(std::span<const std::pair<double, double>> pts, int G) {
  if (G < 2) throw Error(ErrorKind::InvalidArgument, "grid resolution must be >= 2");
  const std::size_t n = pts.size();
  if (n == 0) return 0.0;
  auto cell = [G](double u) {
    const int c = static_cast<int>(std::ceil(u * G)) - 1;
    return std::clamp(c, 0, G - 1);
  };
  // C[i][j] = #{cell1 < i, cell2 < j}
  std::vector<std::vector<std::uint64_t>> C(G + 1, std::vector<std::uint64_t>(G + 1, 0));
  for (const auto& [u1, u2] : pts) ++C[cell(u1) + 1][cell(u2) + 1];
  for (int i = 1; i <= G; ++i)
    for (int j = 1; j <= G; ++j) C[i][j] += C[i - 1][j] + C[i][j - 1] - C[i - 1][j - 1];
  const double inv_n = 1.0 / static_cast<double>(n), inv_g = 1.0 / G;
  double best = 0.0;
  for (int a1 = 0; a1 < G; ++a1)
    for (int b1 = a1 + 1; b1 <= G; ++b1)
      for (int a2 = 0; a2 < G; ++a2)
        for (int b2 = a2 + 1; b2 <= G; ++b2) {
          const auto cnt = C[b1][b2] - C[a1][b2] - C[b1][a2] + C[a1][a2];
          const double d = std::abs(static_cast<double>(cnt) * inv_n - (b1 - a1) * inv_g * (b2 - a2) * inv_g);
          best = std::max(best, d);
        }
  return best;
}

inline double joint_box_discrepancy(const AngleSeries& s1, const AngleSeries& s2, std::uint64_t x,
                                    int G = kDefaultGrid) {
  const auto pairs = paired_angles(s1, s2, x);
  std::vector<std::pair<double, double>> u;
  u.reserve(pairs.size());
  for (const auto& q : pairs) u.emplace_back(st_cdf(q.theta1), st_cdf(q.theta2));
  return grid_box_discrepancy(u, G);
}

// ---------------------------------------------------------------------------
// Least prime in an interval

inline constexpr std::uint64_t kDefaultSearchCeiling = 10'000'000;

struct LeastPrimeResult {
  prime_t p = 0;
  double grh_bound = 0.0;  // ceil(c mu^-4 log(kq/mu)^2)
};

/// ceil(c * mu^{-4} * log(kq/mu)^2), the GRH-conditional least-prime shape.
inline double least_prime_grh_bound(double mu, int k, std::uint64_t q, double c) {
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "interval must have positive Sato-Tate mass");
  const double L = std::log(static_cast<double>(k) * static_cast<double>(q) / mu);
  return std::ceil(c * std::pow(mu, -4.0) * L * L);
}

/// Streams primes and point-counts on demand; no series is built.
inline LeastPrimeResult least_prime_in_interval(const CurveSpec& curve, const Interval& I, double c = 1.0,
                                                std::uint64_t ceiling = kDefaultSearchCeiling) {
  I.validate();
  validate(curve);
  const double mu = mu_st(I);
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "interval must have positive Sato-Tate mass");
  LeastPrimeResult r;
  r.grh_bound = least_prime_grh_bound(mu, 2, curve.conductor, c);
  PrimeStream stream(2, ceiling);
  while (auto p = stream.next()) {
    if (curve.conductor % *p == 0) continue;
    const double theta = angle_from_ap(static_cast<double>(ec_ap(curve, *p)), *p, 2);
    if (I.contains(theta)) {
      r.p = *p;
      return r;
    }
  }
  throw Error(ErrorKind::SearchExceeded, "no good prime with theta_p in the interval below " + std::to_string(ceiling));
}

/// Same search over a prebuilt series (bounded by its coverage).
inline LeastPrimeResult least_prime_in_interval(const AngleSeries& s, const Interval& I, double c = 1.0) {
  I.validate();
  const double mu = mu_st(I);
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "interval must have positive Sato-Tate mass");
  LeastPrimeResult r;
  r.grh_bound = least_prime_grh_bound(mu, s.meta.weight_k, s.meta.level_q, c);
  for (const auto& a : s.points) {
    if (I.contains(a.theta)) {
      r.p = a.p;
      return r;
    }
  }
  throw Error(ErrorKind::SearchExceeded,
              "no good prime with theta_p in the interval up to x_max=" + std::to_string(s.x_max));
}

// ---------------------------------------------------------------------------
// Theoretical bound shapes and decay fits

enum class BoundVariant { UnconditionalSt1, GrhThm13 };

inline std::string_view to_string(BoundVariant v) {
  return v == BoundVariant::UnconditionalSt1 ? "unconditional-st1" : "grh-thm13";
}

inline BoundVariant parse_bound_variant(std::string_view s) {
  if (s == "unconditional-st1") return BoundVariant::UnconditionalSt1;
  if (s == "grh-thm13") return BoundVariant::GrhThm13;
  throw Error(ErrorKind::InvalidArgument, "unknown bound variant '" + std::string(s) + "'");
}

/// unconditional-st1: c pi(x) log(kq log x) / sqrt(log x)
/// grh-thm13:         c x^{3/4} log(kqx) / log x
inline double theoretical_bound_curve(double x, int k, std::uint64_t q, BoundVariant variant, double c) {
  if (!(x >= 3)) throw Error(ErrorKind::InvalidArgument, "bound curves need x >= 3");
  if (!(c > 0)) throw Error(ErrorKind::InvalidArgument, "bound constant must be positive");
  const double kq = static_cast<double>(k) * static_cast<double>(q);
  const double lx = std::log(x);
  switch (variant) {
    case BoundVariant::UnconditionalSt1: {
      const double pi_x = static_cast<double>(prime_count(static_cast<prime_t>(std::floor(x))));
      return c * pi_x * std::log(kq * lx) / std::sqrt(lx);
    }
    case BoundVariant::GrhThm13:
      return c * std::pow(x, 0.75) * std::log(kq * x) / lx;
  }
  return 0.0;
}

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log x, log error).
inline DecayFit fit_decay_exponent(std::span<const double> xs, std::span<const double> errors) {
  if (xs.size() != errors.size()) throw Error(ErrorKind::InvalidArgument, "xs and errors differ in length");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw Error(ErrorKind::InvalidArgument, "xs must be strictly increasing");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0 && errors[i] > 0 && std::isfinite(errors[i])) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(errors[i]));
    }
  }
  if (lx.size() < 3)
    throw Error(ErrorKind::DegenerateFit, "need at least 3 samples with positive error, have " +
                                              std::to_string(lx.size()));
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---------------------------------------------------------------------------
// Reports

struct DiscrepancyReport {
  std::uint64_t x = 0;
  std::uint64_t pi_x = 0;
  std::uint64_t count = 0;
  double expected = 0.0;
  double error_abs = 0.0;
  double exact_sup_discrepancy = 0.0;
  double et_bound = 0.0;
  double cheb_bound = 0.0;
  bool cheb_dominates = false;
  double st1_curve = 0.0;
  double grh_curve = 0.0;
};

struct ReportOptions {
  int M = 50;
  double c_et1 = 4.0;
  double c_curve = 1.0;
  unsigned threads = 1;
};

inline DiscrepancyReport make_discrepancy_report(const AngleSeries& s, const Interval& I, std::uint64_t x,
                                                 const ReportOptions& opt = {}) {
  I.validate();
  DiscrepancyReport r;
  r.x = x;
  r.pi_x = prime_count(x);
  r.count = count_in_interval(s, I, x);
  r.expected = mu_st(I) * static_cast<double>(r.pi_x);
  r.error_abs = std::abs(static_cast<double>(r.count) - r.expected);
  const auto u = uniformized(s, x);
  r.exact_sup_discrepancy = interval_discrepancy(u);
  r.et_bound = u.empty() ? 0.0 : erdos_turan_bound(u, opt.M, opt.threads);
  const int M = std::max(opt.M, 3);
  const auto sums = cheb_sums(s.upto(x), M, opt.threads);
  r.cheb_bound = cheb_sum_bound(sums, r.pi_x, M, opt.c_et1);
  r.cheb_dominates = r.cheb_bound >= r.error_abs;
  if (x >= 3) {
    r.st1_curve = theoretical_bound_curve(static_cast<double>(x), s.meta.weight_k, s.meta.level_q,
                                          BoundVariant::UnconditionalSt1, opt.c_curve);
    r.grh_curve = theoretical_bound_curve(static_cast<double>(x), s.meta.weight_k, s.meta.level_q,
                                          BoundVariant::GrhThm13, opt.c_curve);
  }
  return r;
}

struct JointReport {
  std::uint64_t x = 0;
  std::uint64_t pi_x = 0;
  std::uint64_t joint_count = 0;
  double expected = 0.0;
  double error_abs = 0.0;
  double box_discrepancy_grid = 0.0;
  double cheb2_bound = 0.0;
};

struct JointOptions {
  int M = 10;
  double c_et2 = 4.0;
  int grid = kDefaultGrid;
};

inline JointReport make_joint_report(const AngleSeries& s1, const AngleSeries& s2, const Interval& I1,
                                     const Interval& I2, std::uint64_t x, const JointOptions& opt = {}) {
  JointReport r;
  r.x = x;
  r.pi_x = prime_count(x);
  r.joint_count = joint_count(s1, s2, I1, I2, x);
  r.expected = mu_st(I1) * mu_st(I2) * static_cast<double>(r.pi_x);
  r.error_abs = std::abs(static_cast<double>(r.joint_count) - r.expected);
  r.box_discrepancy_grid = joint_box_discrepancy(s1, s2, x, opt.grid);
  r.cheb2_bound = cheb_sum_bound_2d(s1, s2, x, opt.M, opt.c_et2);
  return r;
}

}  // namespace satotate
