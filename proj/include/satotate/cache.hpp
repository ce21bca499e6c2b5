#pragma once

// Binary angle cache ("STAN" files), little-endian:
//
//   magic   4 bytes  "STAN"
//   version u32      1
//   level   u64
//   weight  u32
//   reserved u32     0
//   x_max   u64
//   count   u64
//   count x { p: u64, theta: f64 }

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "satotate/angles.hpp"
#include "satotate/error.hpp"

namespace satotate {

inline constexpr std::array<char, 4> kCacheMagic{'S', 'T', 'A', 'N'};
inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderBytes = 4 + 4 + 8 + 4 + 4 + 8 + 8;
inline constexpr std::size_t kCacheRecordBytes = 16;

namespace detail {

template <class T>
void put_le(std::vector<char>& buf, T v) {
  const auto u = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<T>(u);
}

}  // namespace detail

inline std::vector<char> encode_cache(const AngleSeries& s) {
  std::vector<char> buf(kCacheMagic.begin(), kCacheMagic.end());
  buf.reserve(kCacheHeaderBytes + kCacheRecordBytes * s.points.size());
  detail::put_le<std::uint32_t>(buf, kCacheVersion);
  detail::put_le<std::uint64_t>(buf, s.meta.level_q);
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(s.meta.weight_k));
  detail::put_le<std::uint32_t>(buf, 0);
  detail::put_le<std::uint64_t>(buf, s.x_max);
  detail::put_le<std::uint64_t>(buf, s.points.size());
  for (const auto& a : s.points) {
    detail::put_le<std::uint64_t>(buf, a.p);
    detail::put_le<double>(buf, a.theta);
  }
  return buf;
}

inline AngleSeries decode_cache(const std::vector<char>& buf) {
  if (buf.size() < kCacheHeaderBytes)
    throw Error(ErrorKind::FormatError, "truncated cache header (" + std::to_string(buf.size()) + " bytes)");
  if (!std::equal(kCacheMagic.begin(), kCacheMagic.end(), buf.begin()))
    throw Error(ErrorKind::FormatError, "bad magic, expected STAN");
  const char* p = buf.data() + 4;
  const auto version = detail::get_le<std::uint32_t>(p);
  if (version != kCacheVersion)
    throw Error(ErrorKind::FormatError, "unsupported cache version: found " + std::to_string(version) +
                                            ", expected " + std::to_string(kCacheVersion));
  AngleSeries s;
  s.meta.source = SeriesSource::Cache;
  s.meta.level_q = detail::get_le<std::uint64_t>(p + 4);
  s.meta.weight_k = static_cast<int>(detail::get_le<std::uint32_t>(p + 12));
  s.x_max = detail::get_le<std::uint64_t>(p + 20);
  const auto count = detail::get_le<std::uint64_t>(p + 28);
  const std::size_t body = buf.size() - kCacheHeaderBytes;
  if (count > body / kCacheRecordBytes || body != count * kCacheRecordBytes)
    throw Error(ErrorKind::FormatError, "cache declares " + std::to_string(count) + " records but holds " +
                                            std::to_string(body) + " payload bytes");
  s.points.resize(count);
  const char* r = buf.data() + kCacheHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, r += kCacheRecordBytes) {
    s.points[i] = AnglePoint{detail::get_le<std::uint64_t>(r), detail::get_le<double>(r + 8)};
    if (i > 0 && s.points[i].p <= s.points[i - 1].p)
      throw Error(ErrorKind::FormatError, "cache primes not strictly increasing at record " + std::to_string(i));
    if (!(s.points[i].theta >= 0.0 && s.points[i].theta <= kPi))
      throw Error(ErrorKind::FormatError, "angle outside [0, pi] at record " + std::to_string(i));
  }
  return s;
}

/// Writes to a sibling temporary and renames it into place.
inline void save_cache(const AngleSeries& s, const std::filesystem::path& path) {
  const auto buf = encode_cache(s);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline AngleSeries load_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open cache " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto s = decode_cache(buf);
  s.meta.label = path.stem().string();
  return s;
}

}  // namespace satotate
