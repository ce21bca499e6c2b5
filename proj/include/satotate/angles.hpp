#pragma once

// Sato-Tate angle series: theta_p in [0, pi] with a_f(p) = 2 cos(theta_p) for
// every good prime p <= x_max, built from an elliptic curve by point counting
// or ingested from a text file of Hecke eigenvalues.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "satotate/elliptic.hpp"
#include "satotate/error.hpp"
#include "satotate/parallel.hpp"
#include "satotate/prime_engine.hpp"
#include "satotate/st_measure.hpp"

namespace satotate {

enum class SeriesSource { Curve, File, Zeta, Cache };

struct FormMeta {
  std::string label;
  int weight_k = 2;
  std::uint64_t level_q = 1;
  SeriesSource source = SeriesSource::Curve;
  bool cm_asserted_false = true;

  void validate() const {
    if (weight_k < 2 || weight_k % 2 != 0)
      throw Error(ErrorKind::InvalidArgument, "weight must be even and >= 2, got " + std::to_string(weight_k));
    if (level_q < 1) throw Error(ErrorKind::InvalidArgument, "level must be >= 1");
  }
};

struct AnglePoint {
  prime_t p = 0;
  double theta = 0.0;

  friend bool operator==(const AnglePoint&, const AnglePoint&) = default;
};

struct AngleSeries {
  FormMeta meta;
  std::uint64_t x_max = 0;
  std::vector<AnglePoint> points;

  bool is_good(prime_t p) const { return meta.level_q % p != 0; }

  /// Points with p <= x. Throws RangeExceeded past the covered range.
  std::span<const AnglePoint> upto(std::uint64_t x) const {
    if (x > x_max)
      throw Error(ErrorKind::RangeExceeded,
                  "x=" + std::to_string(x) + " exceeds series coverage x_max=" + std::to_string(x_max));
    const auto it = std::upper_bound(points.begin(), points.end(), x,
                                     [](std::uint64_t v, const AnglePoint& a) { return v < a.p; });
    return {points.data(), static_cast<std::size_t>(it - points.begin())};
  }

  /// theta_p for a covered good prime, if present.
  std::optional<double> angle_at(prime_t p) const {
    const auto it = std::lower_bound(points.begin(), points.end(), p,
                                     [](const AnglePoint& a, prime_t v) { return a.p < v; });
    if (it == points.end() || it->p != p) return std::nullopt;
    return it->theta;
  }
};

/// Equality of the numeric content: level, weight, x_max and every (p, theta)
/// record bit for bit. Labels and provenance are not compared.
inline bool same_records(const AngleSeries& a, const AngleSeries& b) {
  return a.meta.level_q == b.meta.level_q && a.meta.weight_k == b.meta.weight_k && a.x_max == b.x_max &&
         a.points.size() == b.points.size() &&
         std::equal(a.points.begin(), a.points.end(), b.points.begin(), [](const AnglePoint& u, const AnglePoint& v) {
           return u.p == v.p && std::bit_cast<std::uint64_t>(u.theta) == std::bit_cast<std::uint64_t>(v.theta);
         });
}

// ---------------------------------------------------------------------------

inline constexpr double kDeligneSlack = 1e-12;

/// theta = arccos(a / 2) for a normalized eigenvalue a = a_f(p).
inline double angle_from_normalized(double a, prime_t p) {
  if (!(std::abs(a) <= 2.0 * (1.0 + kDeligneSlack)))
    throw Error(ErrorKind::DeligneViolation,
                "normalized a_p=" + std::to_string(a) + " at p=" + std::to_string(p) + " exceeds 2 in absolute value");
  return std::acos(std::clamp(a / 2.0, -1.0, 1.0));
}

/// theta_p from a raw Hecke eigenvalue, normalizing by p^{(k-1)/2}.
inline double angle_from_ap(double ap, prime_t p, int weight_k) {
  const double scale = std::pow(static_cast<double>(p), (weight_k - 1) / 2.0);
  if (!(std::abs(ap) <= 2.0 * scale * (1.0 + kDeligneSlack)))
    throw Error(ErrorKind::DeligneViolation, "|a_p|=" + std::to_string(std::abs(ap)) + " exceeds 2 p^{(k-1)/2} at p=" +
                                                 std::to_string(p) + ", k=" + std::to_string(weight_k));
  return std::acos(std::clamp(ap / (2.0 * scale), -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Coefficient files

inline constexpr std::string_view kCoeffMagic = "# satotate-coeffs v1";

struct CoefficientFile {
  FormMeta meta;
  bool normalized = false;
  std::vector<std::pair<prime_t, double>> entries;  // ascending p
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline bool is_prime_trial(prime_t n) {
  if (n < 2) return false;
  for (prime_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

/// Parses the text coefficient format:
///
///   # satotate-coeffs v1
///   label=<str>
///   weight=<int>
///   level=<int>
///   normalized=<true|false>
///   <p> <a_p>
///   ...
///
/// Header keys may also appear as comments ("# weight=2"). Other lines that
/// start with '#' and blank lines are ignored.
inline CoefficientFile parse_coefficients(std::istream& in) {
  CoefficientFile out;
  out.meta.source = SeriesSource::File;
  std::string line;
  std::size_t lineno = 0;
  bool magic = false, have_weight = false, have_level = false, have_norm = false;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::FormatError, "coefficient file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (!magic) {
      if (t.empty()) continue;
      if (t != kCoeffMagic) fail("expected header '" + std::string(kCoeffMagic) + "'");
      magic = true;
      continue;
    }
    if (t.empty()) continue;
    if (t[0] == '#') {
      t = detail::trim(std::string_view(t).substr(1));
      if (t.find('=') == std::string::npos) continue;
    }
    if (const auto eq = t.find('='); eq != std::string::npos) {
      const std::string key = detail::trim(std::string_view(t).substr(0, eq));
      const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
      try {
        if (key == "label") {
          out.meta.label = value;
        } else if (key == "weight") {
          out.meta.weight_k = std::stoi(value);
          have_weight = true;
        } else if (key == "level") {
          out.meta.level_q = std::stoull(value);
          have_level = true;
        } else if (key == "normalized") {
          if (value == "true") out.normalized = true;
          else if (value == "false") out.normalized = false;
          else fail("normalized must be true or false");
          have_norm = true;
        } else {
          fail("unknown header key '" + key + "'");
        }
      } catch (const std::logic_error&) {
        fail("bad value for '" + key + "'");
      }
      continue;
    }
    if (!have_weight || !have_level || !have_norm) fail("data before weight/level/normalized header");
    std::istringstream fields(t);
    prime_t p = 0;
    std::string value;
    std::string extra;
    if (!(fields >> p >> value) || (fields >> extra)) fail("expected '<p> <a_p>'");
    if (!detail::is_prime_trial(p)) fail(std::to_string(p) + " is not prime");
    if (!out.entries.empty() && p <= out.entries.back().first) fail("primes must be strictly ascending");
    double a = 0.0;
    try {
      std::size_t used = 0;
      if (out.normalized) {
        a = std::stod(value, &used);
      } else {
        a = static_cast<double>(std::stoll(value, &used));
      }
      if (used != value.size()) fail("malformed a_p '" + value + "'");
    } catch (const std::logic_error&) {
      fail("malformed a_p '" + value + "'");
    }
    out.entries.emplace_back(p, a);
  }
  if (!magic) throw Error(ErrorKind::FormatError, "empty coefficient file");
  if (!have_weight || !have_level || !have_norm)
    throw Error(ErrorKind::FormatError, "coefficient file lacks weight/level/normalized header");
  out.meta.validate();
  return out;
}

inline CoefficientFile read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open coefficient file " + path);
  return parse_coefficients(in);
}

inline void write_coefficients(std::ostream& out, const FormMeta& meta, bool normalized,
                               std::span<const std::pair<prime_t, double>> entries) {
  out << kCoeffMagic << "\n"
      << "label=" << meta.label << "\n"
      << "weight=" << meta.weight_k << "\n"
      << "level=" << meta.level_q << "\n"
      << "normalized=" << (normalized ? "true" : "false") << "\n";
  char buf[64];
  for (const auto& [p, a] : entries) {
    if (normalized) std::snprintf(buf, sizeof buf, "%.17g", a);
    else std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(a));
    out << p << ' ' << buf << "\n";
  }
}

// ---------------------------------------------------------------------------
// Series construction

struct BuildOptions {
  unsigned threads = 1;
  BsgsOptions bsgs{};
};

inline std::vector<prime_t> good_primes_upto(std::uint64_t x_max, std::uint64_t level) {
  std::vector<prime_t> out;
  if (x_max < 2) return out;
  for_each_prime(PrimeRange{2, x_max}, [&](prime_t p) {
    if (level % p != 0) out.push_back(p);
  });
  return out;
}

inline AngleSeries build_angle_series(const CurveSpec& curve, std::uint64_t x_max, const BuildOptions& opt = {}) {
  if (x_max < 2) throw Error(ErrorKind::InvalidArgument, "x_max must be >= 2");
  validate(curve);
  AngleSeries s;
  s.meta = FormMeta{curve.label, 2, curve.conductor, SeriesSource::Curve, true};
  s.x_max = x_max;
  const auto primes = good_primes_upto(x_max, curve.conductor);
  s.points.resize(primes.size());
  parallel_blocks(primes.size(), opt.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const prime_t p = primes[i];
      const auto ap = ec_ap(curve, p, opt.bsgs);
      s.points[i] = AnglePoint{p, angle_from_ap(static_cast<double>(ap), p, 2)};
    }
  });
  return s;
}

inline AngleSeries build_angle_series(const CoefficientFile& file, std::uint64_t x_max) {
  if (x_max < 2) throw Error(ErrorKind::InvalidArgument, "x_max must be >= 2");
  file.meta.validate();
  AngleSeries s;
  s.meta = file.meta;
  s.meta.source = SeriesSource::File;
  s.x_max = x_max;
  const auto primes = good_primes_upto(x_max, file.meta.level_q);
  s.points.reserve(primes.size());
  std::size_t j = 0;
  for (const prime_t p : primes) {
    while (j < file.entries.size() && file.entries[j].first < p) ++j;
    if (j == file.entries.size() || file.entries[j].first != p)
      throw Error(ErrorKind::MissingPrime, "coefficient file lacks good prime p=" + std::to_string(p));
    const double a = file.entries[j].second;
    const double theta = file.normalized ? angle_from_normalized(a, p) : angle_from_ap(a, p, file.meta.weight_k);
    s.points.push_back(AnglePoint{p, theta});
  }
  return s;
}

/// Level-1 series for the Riemann zeta function (Sym^0 of any form): every
/// prime is good and only U_0 = 1 is meaningful, so angles are fixed at pi/2.
inline AngleSeries build_zeta_series(std::uint64_t x_max) {
  if (x_max < 2) throw Error(ErrorKind::InvalidArgument, "x_max must be >= 2");
  AngleSeries s;
  s.meta = FormMeta{"zeta", 2, 1, SeriesSource::Zeta, true};
  s.x_max = x_max;
  const double half_pi = std::acos(0.0);
  for_each_prime(PrimeRange{2, x_max}, [&](prime_t p) { s.points.push_back(AnglePoint{p, half_pi}); });
  return s;
}

// ---------------------------------------------------------------------------

enum class CmVerdict { PlausiblyNonCm, SuspectCm };

inline std::string_view to_string(CmVerdict v) {
  return v == CmVerdict::SuspectCm ? "suspect-CM" : "plausibly-non-CM";
}

struct CmReport {
  double zero_fraction = 0.0;
  CmVerdict verdict = CmVerdict::PlausiblyNonCm;
};

inline constexpr double kCmThreshold = 0.3;

/// Fraction of primes with a_p = 0 (theta_p exactly pi/2). Advisory only.
inline CmReport cm_heuristic(const AngleSeries& s) {
  if (s.points.empty()) throw Error(ErrorKind::InvalidArgument, "cm_heuristic needs a nonempty series");
  const double half_pi = std::acos(0.0);
  const auto zeros = std::count_if(s.points.begin(), s.points.end(),
                                   [&](const AnglePoint& a) { return a.theta == half_pi; });
  CmReport r;
  r.zero_fraction = static_cast<double>(zeros) / static_cast<double>(s.points.size());
  r.verdict = r.zero_fraction > kCmThreshold ? CmVerdict::SuspectCm : CmVerdict::PlausiblyNonCm;
  return r;
}

}  // namespace satotate
