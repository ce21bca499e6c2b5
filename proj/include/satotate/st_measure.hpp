#pragma once

// The Sato-Tate measure d mu = (2/pi) sin^2(theta) d theta on [0, pi], its
// CDF and inverse, Chebyshev polynomials of the second kind in the angle
// variable, and Gauss-Legendre quadrature.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "satotate/error.hpp"

namespace satotate {

inline constexpr double kPi = std::numbers::pi;

/// Closed interval [alpha, beta] inside [0, pi].
struct Interval {
  double alpha = 0.0;
  double beta = kPi;

  static Interval make(double alpha, double beta) {
    Interval I{alpha, beta};
    I.validate();
    return I;
  }

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= beta && beta <= kPi))
      throw Error(ErrorKind::InvalidArgument,
                  "interval must satisfy 0 <= alpha <= beta <= pi, got [" + std::to_string(alpha) + ", " +
                      std::to_string(beta) + "]");
  }

  bool contains(double theta) const { return theta >= alpha && theta <= beta; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline double mu_st(const Interval& I) {
  return ((I.beta - I.alpha) - (std::sin(2.0 * I.beta) - std::sin(2.0 * I.alpha)) / 2.0) / kPi;
}

// ---------------------------------------------------------------------------
// Chebyshev U_m(cos theta)

inline constexpr int kMaxChebIndex = 512;
inline constexpr double kEndpointCollar = 1e-6;

/// U_m(x) by the three-term recurrence U_{k+1} = 2x U_k - U_{k-1}.
inline double cheb_u_recurrence(int m, double x) {
  if (m == 0) return 1.0;
  double prev = 1.0, cur = 2.0 * x;
  for (int k = 1; k < m; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// U_m(cos theta) = sin((m+1) theta) / sin(theta). Within kEndpointCollar of
/// 0 or pi the sine ratio is replaced by the recurrence, with the exact limit
/// values (m+1) and (-1)^m (m+1) at the endpoints themselves.
inline double cheb_u(int m, double theta) {
  if (m < 0 || m > kMaxChebIndex)
    throw Error(ErrorKind::InvalidArgument, "Chebyshev index out of range: " + std::to_string(m));
  if (m == 0) return 1.0;
  if (theta <= 0.0) return m + 1.0;
  if (theta >= kPi) return (m % 2 == 0 ? 1.0 : -1.0) * (m + 1.0);
  if (theta < kEndpointCollar || kPi - theta < kEndpointCollar) return cheb_u_recurrence(m, std::cos(theta));
  return std::sin((m + 1) * theta) / std::sin(theta);
}

/// U_0 .. U_M at one angle by the recurrence; used by the bulk Chebyshev sums.
inline void cheb_u_all(int M, double theta, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(M) + 1);
  const double x = std::cos(theta);
  out[0] = 1.0;
  if (M >= 1) out[1] = 2.0 * x;
  for (int k = 2; k <= M; ++k) out[k] = 2.0 * x * out[k - 1] - out[k - 2];
}

// ---------------------------------------------------------------------------
// CDF and quantile

inline double st_cdf(double theta) {
  theta = std::clamp(theta, 0.0, kPi);
  return (theta - std::sin(2.0 * theta) / 2.0) / kPi;
}

inline double st_density(double theta) { return 2.0 / kPi * std::sin(theta) * std::sin(theta); }

/// Inverse of st_cdf by Newton's method safeguarded with a bisection bracket.
inline double st_quantile(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile argument outside [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return kPi;
  double lo = 0.0, hi = kPi;
  double t = kPi * u;
  for (int it = 0; it < 200; ++it) {
    const double f = st_cdf(t) - u;
    if (f > 0) hi = t; else lo = t;
    const double d = st_density(t);
    double next = d > 0 ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t) || hi - lo < 1e-15) return next;
    t = next;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point rule; nodes by Newton iteration on P_n from Chebyshev initial guesses.
inline GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

template <class F>
auto integrate(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  decltype(f(a)) sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

/// <U_m, U_n> in L^2([0, pi], mu_ST), Gauss-Legendre with 4(m+n)+16 nodes.
inline double cheb_inner_product(int m, int n) {
  if (m < 0 || n < 0 || m > 64 || n > 64)
    throw Error(ErrorKind::InvalidArgument, "cheb_inner_product supports 0 <= m, n <= 64");
  const auto rule = gauss_legendre(4 * (m + n) + 16);
  return integrate(rule, [&](double t) { return cheb_u(m, t) * cheb_u(n, t) * st_density(t); }, 0.0, kPi);
}

}  // namespace satotate
