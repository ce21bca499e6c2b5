#pragma once

// Weighted prime sums over Sato-Tate angles.
//
//   theta_{f,m}(x)          = sum_{p <= x, p good} U_m(cos theta_p) log p
//   theta_{f1,f2,m1,m2}(x)  = sum over primes good for both forms of
//                             U_{m1}(cos theta_p^(1)) U_{m2}(cos theta_p^(2)) log p
//   Lambda_{Sym^m f}(p^l)   = U_m(cos l theta_p) log p           (p good)
//   psi(x, phi)             = sum_{p^l} phi(log p^l / log x) Lambda_{Sym^m f}(p^l)
//
// plus the smoothing weight phi and its Laplace transform Phi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "satotate/angles.hpp"
#include "satotate/equidist.hpp"
#include "satotate/error.hpp"
#include "satotate/parallel.hpp"
#include "satotate/st_measure.hpp"

namespace satotate {

// ---------------------------------------------------------------------------
// theta sums and partial summation

inline double theta_fm(const AngleSeries& s, int m, std::uint64_t x, unsigned threads = 1) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "m must be >= 0");
  const auto pts = s.upto(x);
  return deterministic_sum(
      pts.size(), [&](std::size_t i) { return cheb_u(m, pts[i].theta) * std::log(static_cast<double>(pts[i].p)); },
      threads);
}

inline double theta_joint(const AngleSeries& s1, const AngleSeries& s2, int m1, int m2, std::uint64_t x) {
  if (m1 < 0 || m2 < 0) throw Error(ErrorKind::InvalidArgument, "m1, m2 must be >= 0");
  const auto pairs = paired_angles(s1, s2, x);
  return deterministic_sum(pairs.size(), [&](std::size_t i) {
    return cheb_u(m1, pairs[i].theta1) * cheb_u(m2, pairs[i].theta2) * std::log(static_cast<double>(pairs[i].p));
  });
}

/// Both sides of the partial-summation identity
///
///   sum_{p <= x} a_p = theta(x)/log x + int_2^x theta(t) / (t log^2 t) dt,
///   theta(t) = sum_{p <= t} a_p log p,
///
/// with the integral of the step function evaluated exactly as
/// sum_p a_p log p (1/log p - 1/log x).
struct PartialSummation {
  double lhs = 0.0;       // plain sum
  double theta = 0.0;     // weighted sum at x
  double integral = 0.0;  // exact step-function integral
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs|
};

namespace detail {

template <class Coef>
PartialSummation partial_summation(std::size_t n, Coef&& coef_and_prime, std::uint64_t x) {
  PartialSummation r;
  if (n == 0) return r;
  const double log_x = std::log(static_cast<double>(x));
  const double inv_log_x = 1.0 / log_x;
  r.lhs = deterministic_sum(n, [&](std::size_t i) { return coef_and_prime(i).first; });
  r.theta = deterministic_sum(n, [&](std::size_t i) {
    const auto [a, p] = coef_and_prime(i);
    return a * std::log(static_cast<double>(p));
  });
  r.integral = deterministic_sum(n, [&](std::size_t i) {
    const auto [a, p] = coef_and_prime(i);
    const double lp = std::log(static_cast<double>(p));
    return a * lp * (1.0 / lp - inv_log_x);
  });
  r.rhs = r.theta * inv_log_x + r.integral;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace detail

inline PartialSummation partial_summation(const AngleSeries& s, int m, std::uint64_t x) {
  if (x < 3) throw Error(ErrorKind::InvalidArgument, "partial summation needs x >= 3");
  const auto pts = s.upto(x);
  return detail::partial_summation(
      pts.size(), [&](std::size_t i) { return std::pair{cheb_u(m, pts[i].theta), pts[i].p}; }, x);
}

inline double partial_summation_residual(const AngleSeries& s, int m, std::uint64_t x) {
  return partial_summation(s, m, x).residual;
}

inline PartialSummation partial_summation_joint(const AngleSeries& s1, const AngleSeries& s2, int m1, int m2,
                                                std::uint64_t x) {
  if (x < 3) throw Error(ErrorKind::InvalidArgument, "partial summation needs x >= 3");
  const auto pairs = paired_angles(s1, s2, x);
  return detail::partial_summation(
      pairs.size(),
      [&](std::size_t i) {
        return std::pair{cheb_u(m1, pairs[i].theta1) * cheb_u(m2, pairs[i].theta2), pairs[i].p};
      },
      x);
}

// ---------------------------------------------------------------------------
// Symmetric-power von Mangoldt coefficients

/// Angle l*theta folded back into [0, pi] (cos is even and 2pi-periodic).
inline double fold_angle(double phi) {
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0) phi += 2.0 * kPi;
  return phi > kPi ? 2.0 * kPi - phi : phi;
}

/// U_m(cos(l theta)) log p for a given angle.
inline double lambda_sym_angle(int m, double theta, prime_t p, int power) {
  if (power < 1) throw Error(ErrorKind::InvalidArgument, "prime power exponent must be >= 1");
  return cheb_u(m, fold_angle(power * theta)) * std::log(static_cast<double>(p));
}

/// Lambda_{Sym^m f}(p^l) for a good prime p covered by the series.
inline double lambda_sym(const AngleSeries& s, int m, prime_t p, int power) {
  const auto theta = s.angle_at(p);
  if (!theta) throw Error(ErrorKind::BadPrime, "p=" + std::to_string(p) + " is not a good prime of the series");
  return lambda_sym_angle(m, *theta, p, power);
}

// ---------------------------------------------------------------------------
// Smoothing weight

/// Parameters of the weight phi(t; x, ell, eps) with A = eps / (2 ell log x).
///
/// phi is a boxcar of length 1/2 + 2 ell A convolved with ell uniform
/// densities of width 2A: it equals 1 on [1/2, 1], vanishes outside
/// [1/2 - eps/log x, 1 + eps/log x], and is a degree-ell piecewise polynomial
/// on the two edges.
struct SmoothingWeight {
  double x = 3.0;
  int ell = 4;
  double eps = 0.1;
  double A = 0.0;

  static SmoothingWeight make(double x, int ell, double eps) {
    if (!(x >= 3.0)) throw Error(ErrorKind::InvalidArgument, "weight needs x >= 3");
    if (ell < 1) throw Error(ErrorKind::InvalidArgument, "weight needs ell >= 1");
    if (!(eps > 0.0 && eps < 0.25)) throw Error(ErrorKind::InvalidArgument, "weight needs eps in (0, 1/4)");
    return SmoothingWeight{x, ell, eps, eps / (2.0 * ell * std::log(x))};
  }

  /// The choices made in the proof of the smoothed prime number theorem:
  /// ell = 4 C m and eps = 8 ell x^{-1/(8 ell)}. At desk-scale x these give
  /// eps >= 1/4, which make() rejects.
  static SmoothingWeight paper_proof(double x, int m, double C = 1.0) {
    const int ell = std::max(1, static_cast<int>(std::ceil(4.0 * C * m)));
    const double eps = 8.0 * ell * std::pow(x, -1.0 / (8.0 * ell));
    return make(x, ell, eps);
  }

  double log_x() const { return std::log(x); }
  double support_lo() const { return 0.5 - eps / log_x(); }
  double support_hi() const { return 1.0 + eps / log_x(); }
};

namespace detail {

/// CDF of the Irwin-Hall distribution (sum of n uniforms on [0,1]).
inline double irwin_hall_cdf(int n, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= n) return 1.0;
  if (y > 0.5 * n) return 1.0 - irwin_hall_cdf(n, n - y);
  double sum = 0.0, binom = 1.0, fact = 1.0;
  for (int k = 1; k <= n; ++k) fact *= k;
  const int top = static_cast<int>(std::floor(y));
  for (int k = 0; k <= top; ++k) {
    sum += ((k % 2) ? -1.0 : 1.0) * binom * std::pow(y - k, n);
    binom = binom * (n - k) / (k + 1);
  }
  return std::clamp(sum / fact, 0.0, 1.0);
}

/// (e^w - 1)/w, with its Taylor series near 0.
inline std::complex<double> expm1_ratio(std::complex<double> w) {
  if (std::abs(w) < 1e-4) return 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0;
  const double a = w.real(), b = w.imag();
  const double s = std::sin(0.5 * b);
  const std::complex<double> em1(std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b));
  return em1 / w;
}

}  // namespace detail

inline double weight_phi(const SmoothingWeight& w, double t) {
  const double width = 2.0 * w.A;            // one uniform factor
  const double spread = 2.0 * w.ell * w.A;   // eps / log x
  // phi(t) = P(1/2 - t <= V <= 1 + spread - t), V = width * IrwinHall(ell)
  const double upper = detail::irwin_hall_cdf(w.ell, (1.0 + spread - t) / width);
  const double lower = detail::irwin_hall_cdf(w.ell, (0.5 - t) / width);
  return std::clamp(upper - lower, 0.0, 1.0);
}

/// Phi(z) = int phi(t) e^{-zt} dt
///        = e^{-(1+2 ell A) z} (1 - e^{(1/2 + 2 ell A) z})/(-z) ((1 - e^{2Az})/(-2Az))^ell.
inline std::complex<double> weight_laplace(const SmoothingWeight& w, std::complex<double> z) {
  const double spread = 2.0 * w.ell * w.A;
  const double box = 0.5 + spread;
  const std::complex<double> shift = std::exp(-(1.0 + spread) * z);
  const std::complex<double> boxcar = box * detail::expm1_ratio(box * z);
  const std::complex<double> kernel = std::pow(detail::expm1_ratio(2.0 * w.A * z), w.ell);
  return shift * boxcar * kernel;
}

/// Breakpoints of phi: the polynomial pieces of both edges and the plateau.
inline std::vector<double> weight_breakpoints(const SmoothingWeight& w) {
  std::vector<double> b;
  const double width = 2.0 * w.A;
  for (int j = 0; j <= w.ell; ++j) b.push_back(w.support_lo() + j * width);
  for (int j = 0; j <= w.ell; ++j) b.push_back(1.0 + j * width);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

/// int phi(t) e^{-zt} dt by Gauss-Legendre on each polynomial piece of phi.
inline std::complex<double> weight_laplace_quadrature(const SmoothingWeight& w, std::complex<double> z,
                                                      int nodes = 40) {
  const auto rule = gauss_legendre(nodes);
  const auto b = weight_breakpoints(w);
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    total += integrate(rule, [&](double t) { return weight_phi(w, t) * std::exp(-z * t); }, b[i], b[i + 1]);
  }
  return total;
}

/// max over z of |quadrature of phi e^{-zt} - Phi(z)|.
inline double weight_selfcheck(const SmoothingWeight& w, std::span<const std::complex<double>> zs) {
  if (zs.empty()) throw Error(ErrorKind::InvalidArgument, "weight_selfcheck needs at least one z");
  double worst = 0.0;
  for (const auto z : zs) worst = std::max(worst, std::abs(weight_laplace_quadrature(w, z) - weight_laplace(w, z)));
  return worst;
}

// ---------------------------------------------------------------------------
// Smoothed sums

/// Coverage needed by smoothed_psi: floor(x e^eps).
inline std::uint64_t smoothed_coverage(const SmoothingWeight& w) {
  return static_cast<std::uint64_t>(std::floor(w.x * std::exp(w.eps)));
}

/// sum over good p and l >= 1 with p^l <= x^{1 + eps/log x} of
/// phi(l log p / log x) U_m(cos l theta_p) log p.
inline double smoothed_psi(const AngleSeries& s, int m, const SmoothingWeight& w, unsigned threads = 1) {
  if (m < 0) throw Error(ErrorKind::InvalidArgument, "m must be >= 0");
  const std::uint64_t top = smoothed_coverage(w);
  if (top > s.x_max)
    throw Error(ErrorKind::RangeExceeded, "smoothed sum needs coverage to " + std::to_string(top) +
                                              ", series has x_max=" + std::to_string(s.x_max));
  const auto pts = s.upto(top);
  const double log_x = w.log_x();
  const double log_top = std::log(w.x) + w.eps;
  const double t_lo = w.support_lo();
  return deterministic_sum(
      pts.size(),
      [&](std::size_t i) {
        const double lp = std::log(static_cast<double>(pts[i].p));
        double acc = 0.0;
        for (int power = 1; power * lp <= log_top * (1.0 + 1e-15); ++power) {
          const double t = power * lp / log_x;
          if (t < t_lo) continue;
          const double phi = weight_phi(w, t);
          if (phi == 0.0) continue;
          acc += phi * cheb_u(m, fold_angle(power * pts[i].theta)) * lp;
        }
        return acc;
      },
      threads);
}

/// The same sum with phi replaced by the indicator of [1/2, 1]:
/// sum over good p^l in [sqrt x, x] of Lambda_{Sym^m f}(p^l).
inline double plateau_psi(const AngleSeries& s, int m, double x) {
  const auto pts = s.upto(static_cast<std::uint64_t>(std::floor(x)));
  const double log_x = std::log(x);
  double acc = 0.0;
  for (const auto& a : pts) {
    const double lp = std::log(static_cast<double>(a.p));
    for (int power = 1; power * lp <= log_x; ++power) {
      if (2.0 * power * lp >= log_x) acc += cheb_u(m, fold_angle(power * a.theta)) * lp;
    }
  }
  return acc;
}

}  // namespace satotate
