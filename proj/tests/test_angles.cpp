#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "curves.hpp"
#include "oracles.hpp"
#include "satotate/angles.hpp"
#include "satotate/cache.hpp"
#include "tmpdir.hpp"

using namespace satotate;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

AngleSeries toy_series() {
  AngleSeries s;
  s.meta = FormMeta{"toy", 2, 11, SeriesSource::Curve, true};
  s.x_max = 10;
  s.points = {{2, 2.356}, {3, 1.9}, {5, 1.2}, {7, 0.0}};
  return s;
}

/// Coefficient file text for a curve, with a_p from the enumeration oracle.
std::string oracle_coeff_text(const CurveSpec& e, std::uint64_t x) {
  std::ostringstream out;
  out << "# satotate-coeffs v1\nlabel=" << e.label << "\nweight=2\nlevel=" << e.conductor << "\nnormalized=false\n";
  for (const auto p : oracle::primes_upto(x)) {
    if (e.conductor % p == 0) continue;
    out << p << ' ' << oracle::ap(e.a1, e.a2, e.a3, e.a4, e.a6, static_cast<std::int64_t>(p)) << "\n";
  }
  return out.str();
}

}  // namespace

TEST(Angles, FromAp) {
  EXPECT_DOUBLE_EQ(angle_from_ap(0, 7, 2), kPi / 2);
  EXPECT_NEAR(angle_from_ap(-2, 2, 2), 3 * kPi / 4, 1e-15);
  EXPECT_NEAR(angle_from_ap(-2, 2, 2), 2.35619, 5e-6);
  EXPECT_EQ(angle_from_ap(2 * std::sqrt(5.0), 5, 2), 0.0);
  EXPECT_EQ(angle_from_ap(-2 * std::pow(3.0, 5.5), 3, 12), kPi);
  // weight 12: tau(2) = -24, |tau(2)| <= 2 * 2^{11/2}
  EXPECT_NEAR(angle_from_ap(-24, 2, 12), std::acos(-24 / (2 * std::pow(2.0, 5.5))), 1e-15);
  EXPECT_EQ(kind_of([] { angle_from_ap(5, 5, 2); }), ErrorKind::DeligneViolation);
  EXPECT_EQ(kind_of([] { angle_from_normalized(2.001, 5); }), ErrorKind::DeligneViolation);
  EXPECT_EQ(angle_from_normalized(2.0 * (1 + 1e-13), 5), 0.0);
}

TEST(Angles, SmallSeries11a1) {
  const auto s = build_angle_series(curves::k11a1, 10);
  ASSERT_EQ(s.points.size(), 4u);
  const std::int64_t want[] = {-2, -1, 1, -2};
  const std::uint64_t ps[] = {2, 3, 5, 7};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.points[i].p, ps[i]);
    EXPECT_EQ(want[i], oracle::ap(0, -1, 1, -10, -20, ps[i]));
    EXPECT_NEAR(s.points[i].theta, std::acos(want[i] / (2 * std::sqrt(static_cast<double>(ps[i])))), 1e-15);
  }
  EXPECT_EQ(s.meta.level_q, 11u);
  EXPECT_EQ(s.meta.weight_k, 2);
}

TEST(Angles, EvenConductorAtTwoIsEmpty) {
  const auto s = build_angle_series(curves::k32a, 2);
  EXPECT_TRUE(s.points.empty());
  const auto t = build_angle_series(curves::k11a1, 2);
  ASSERT_EQ(t.points.size(), 1u);
  EXPECT_EQ(t.points[0].p, 2u);
}

TEST(Angles, SeriesInvariants) {
  const auto s = build_angle_series(curves::k37a1, 50'000);
  EXPECT_EQ(s.points.size(), oracle::primes_upto(50'000).size() - 1);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    ASSERT_NE(s.points[i].p, 37u);
    ASSERT_GE(s.points[i].theta, 0.0);
    ASSERT_LE(s.points[i].theta, kPi);
    if (i) {
      ASSERT_LT(s.points[i - 1].p, s.points[i].p);
    }
  }
  EXPECT_EQ(s.upto(100).size(), 24u);
  EXPECT_EQ(kind_of([&] { s.upto(50'001); }), ErrorKind::RangeExceeded);
  EXPECT_TRUE(s.angle_at(41).has_value());
  EXPECT_FALSE(s.angle_at(37).has_value());
}

TEST(Angles, DeterministicAcrossThreads) {
  const auto one = build_angle_series(curves::k389a1, 200'000, BuildOptions{1, {}});
  for (unsigned t : {2u, 4u, 8u}) {
    const auto many = build_angle_series(curves::k389a1, 200'000, BuildOptions{t, {}});
    EXPECT_TRUE(same_records(one, many)) << t;
  }
}

TEST(Angles, FileSourceMatchesCurveSource) {
  const std::uint64_t x = 1500;
  std::istringstream in(oracle_coeff_text(curves::k11a1, x));
  const auto file = parse_coefficients(in);
  EXPECT_EQ(file.meta.level_q, 11u);
  EXPECT_FALSE(file.normalized);
  const auto from_file = build_angle_series(file, x);
  const auto from_curve = build_angle_series(curves::k11a1, x);
  EXPECT_TRUE(same_records(from_file, from_curve));
}

TEST(Angles, NormalizedFileRoundTrip) {
  const auto s = build_angle_series(curves::k37a1, 3000);
  std::vector<std::pair<prime_t, double>> entries;
  for (const auto& a : s.points) entries.emplace_back(a.p, 2 * std::cos(a.theta));
  std::ostringstream out;
  write_coefficients(out, s.meta, true, entries);
  std::istringstream in(out.str());
  const auto back = build_angle_series(parse_coefficients(in), 3000);
  ASSERT_EQ(back.points.size(), s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) EXPECT_NEAR(back.points[i].theta, s.points[i].theta, 1e-7);
}

TEST(Angles, FileErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_coefficients(in);
  };
  const std::string head = "# satotate-coeffs v1\nlabel=t\nweight=2\nlevel=11\nnormalized=false\n";
  EXPECT_EQ(kind_of([&] { parse("hello\n"); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse(""); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse(head + "4 1\n"); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse(head + "3 1\n2 1\n"); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse(head + "2 1.5\n"); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse("# satotate-coeffs v1\nweight=2\nlevel=1\n2 1\n"); }), ErrorKind::FormatError);
  EXPECT_EQ(kind_of([&] { parse("# satotate-coeffs v1\nweight=3\nlevel=1\nnormalized=true\n"); }),
            ErrorKind::InvalidArgument);
  // 5 is missing
  EXPECT_EQ(kind_of([&] { build_angle_series(parse(head + "2 -2\n3 -1\n7 -2\n"), 10); }), ErrorKind::MissingPrime);
  EXPECT_EQ(kind_of([&] { build_angle_series(parse(head + "2 -2\n3 -1\n5 9\n7 -2\n"), 10); }),
            ErrorKind::DeligneViolation);
  // the bad prime may be absent, and comment lines are skipped
  EXPECT_NO_THROW(build_angle_series(parse(head + "# from a table\n2 -2\n3 -1\n5 1\n7 -2\n13 4\n"), 13));
  EXPECT_EQ(kind_of([] { read_coefficients("/nonexistent/x.txt"); }), ErrorKind::Io);
}

TEST(Cache, RoundTrip) {
  TempDir dir;
  const auto s = toy_series();
  save_cache(s, dir.file("toy.stan"));
  const auto back = load_cache(dir.file("toy.stan"));
  EXPECT_TRUE(same_records(s, back));
  EXPECT_EQ(back.meta.label, "toy");
  EXPECT_FALSE(std::filesystem::exists(dir.file("toy.stan.tmp")));

  const auto big = build_angle_series(curves::k11a1, 100'000);
  save_cache(big, dir.file("11a1.stan"));
  EXPECT_TRUE(same_records(big, load_cache(dir.file("11a1.stan"))));
  EXPECT_EQ(std::filesystem::file_size(dir.file("11a1.stan")), 40 + 16 * big.points.size());
}

TEST(Cache, ByteLayout) {
  const auto buf = encode_cache(toy_series());
  ASSERT_EQ(buf.size(), 40u + 4 * 16);
  EXPECT_EQ(std::string(buf.begin(), buf.begin() + 4), "STAN");
  EXPECT_EQ(buf[4], 1);  // version, little-endian
  EXPECT_EQ(buf[8], 11);  // level
  EXPECT_EQ(buf[16], 2);  // weight
  EXPECT_EQ(buf[24], 10);  // x_max
  EXPECT_EQ(buf[32], 4);  // count
  EXPECT_EQ(buf[40], 2);  // first prime
}

TEST(Cache, Corruption) {
  auto buf = encode_cache(toy_series());
  auto truncated = buf;
  truncated.resize(buf.size() - 3);
  EXPECT_EQ(kind_of([&] { decode_cache(truncated); }), ErrorKind::FormatError);
  truncated.resize(20);
  EXPECT_EQ(kind_of([&] { decode_cache(truncated); }), ErrorKind::FormatError);

  auto versioned = buf;
  versioned[4] = 2;
  const auto msg = error_text([&] { decode_cache(versioned); });
  EXPECT_NE(msg.find("found 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("expected 1"), std::string::npos) << msg;

  auto magic = buf;
  magic[0] = 'X';
  EXPECT_EQ(kind_of([&] { decode_cache(magic); }), ErrorKind::FormatError);

  auto order = toy_series();
  std::swap(order.points[0], order.points[1]);
  EXPECT_EQ(kind_of([&] { decode_cache(encode_cache(order)); }), ErrorKind::FormatError);

  EXPECT_EQ(kind_of([] { load_cache("/nonexistent/none.stan"); }), ErrorKind::Io);
}

TEST(CmHeuristic, Examples) {
  const auto non_cm = cm_heuristic(build_angle_series(curves::k11a1, 100'000));
  EXPECT_LT(non_cm.zero_fraction, 0.1);
  EXPECT_EQ(non_cm.verdict, CmVerdict::PlausiblyNonCm);

  const auto cm = cm_heuristic(build_angle_series(curves::k32a, 100'000));
  EXPECT_NEAR(cm.zero_fraction, 0.5, 0.01);
  EXPECT_EQ(cm.verdict, CmVerdict::SuspectCm);

  AngleSeries one;
  one.x_max = 5;
  one.points = {{5, angle_from_ap(0, 5, 2)}};
  const auto single = cm_heuristic(one);
  EXPECT_EQ(single.zero_fraction, 1.0);
  EXPECT_EQ(single.verdict, CmVerdict::SuspectCm);
  EXPECT_THROW(cm_heuristic(AngleSeries{}), Error);
}

TEST(Zeta, AllPrimesAtRightAngle) {
  const auto z = build_zeta_series(1000);
  EXPECT_EQ(z.points.size(), 168u);
  EXPECT_EQ(z.meta.level_q, 1u);
}
