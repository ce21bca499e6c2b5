#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "satotate/cli.hpp"
#include "tmpdir.hpp"

using namespace satotate;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    unsetenv("SATOTATE_THREADS");
    dir_ = new TempDir;
    const auto r = run({"angles", "--curve", "0,-1,1,-10,-20", "--conductor", "11", "--xmax", "1000000", "--out",
                        cache()});
    ASSERT_EQ(r.code, 0) << r.err;
    build_message_ = r.out;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string cache() { return dir_->file("11a1.stan"); }
  static TempDir* dir_;
  static std::string build_message_;
};

TempDir* Cli::dir_ = nullptr;
std::string Cli::build_message_;

}  // namespace

TEST_F(Cli, AnglesWritesFullCache) {
  EXPECT_NE(build_message_.find("wrote 78497 points"), std::string::npos) << build_message_;
  const auto s = load_cache(cache());
  EXPECT_EQ(s.points.size(), 78497u);
  EXPECT_EQ(s.meta.level_q, 11u);
  EXPECT_EQ(s.x_max, 1'000'000u);
}

TEST_F(Cli, AnglesErrors) {
  const auto missing = run({"angles", "--curve", "0,-1,1,-10,-20", "--xmax", "100", "--out", dir_->file("a.stan")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("conductor"), std::string::npos);
  EXPECT_EQ(run({"angles", "--xmax", "100", "--out", dir_->file("a.stan")}).code, 2);
  EXPECT_EQ(run({"angles", "--zeta", "--curve", "0,0,1,-1,0", "--conductor", "37", "--xmax", "100", "--out",
                 dir_->file("a.stan")})
                .code,
            2);
  EXPECT_EQ(run({"angles", "--curve", "0,0,0,0,0", "--conductor", "1", "--xmax", "100", "--out",
                 dir_->file("a.stan")})
                .code,
            2);
  EXPECT_EQ(run({"angles", "--zeta", "--xmax", "100", "--out", "/nonexistent-dir/z.stan"}).code, 3);
  EXPECT_EQ(run({"angles", "--coeffs", "/nonexistent-dir/c.txt", "--xmax", "100", "--out", dir_->file("c.stan")}).code,
            3);
}

TEST_F(Cli, AnglesAtTwo) {
  const auto r = run({"angles", "--curve", "0,-1,1,-10,-20", "--conductor", "11", "--xmax", "2", "--out",
                      dir_->file("two.stan")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = load_cache(dir_->file("two.stan"));
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_EQ(s.points[0].p, 2u);
}

TEST_F(Cli, AnglesFromCoefficientFile) {
  const std::string path = dir_->file("11a1.txt");
  {
    std::ofstream out(path);
    out << "# satotate-coeffs v1\nlabel=11a1\nweight=2\nlevel=11\nnormalized=false\n";
    for (const auto p : oracle::primes_upto(300))
      if (p != 11) out << p << ' ' << oracle::ap(0, -1, 1, -10, -20, p) << "\n";
  }
  ASSERT_EQ(run({"angles", "--coeffs", path, "--xmax", "300", "--out", dir_->file("f.stan")}).code, 0);
  ASSERT_EQ(run({"angles", "--curve", "0,-1,1,-10,-20", "--conductor", "11", "--xmax", "300", "--out",
                 dir_->file("c.stan")})
                .code,
            0);
  EXPECT_EQ(slurp(dir_->file("f.stan")), slurp(dir_->file("c.stan")));
  EXPECT_EQ(run({"angles", "--coeffs", path, "--xmax", "400", "--out", dir_->file("g.stan")}).code, 2);
}

TEST_F(Cli, VerifyRowMatchesRecount) {
  const auto r = run({"verify", "--cache", cache(), "--interval", "half", "--x", "10000"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string version, header, row;
  std::getline(in, version);
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(version, kVerifyCsvVersion);
  const auto cols = split(header), vals = split(row);
  ASSERT_EQ(cols.size(), vals.size());
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < cols.size(); ++i) m[cols[i]] = vals[i];
  const auto s = load_cache(cache());
  std::uint64_t count = 0;
  for (const auto& a : s.points)
    if (a.p <= 10000 && a.theta <= kPi / 2) ++count;
  EXPECT_EQ(std::stoull(m["count"]), count);
  EXPECT_EQ(std::stoull(m["pi_x"]), 1229u);
  EXPECT_DOUBLE_EQ(std::stod(m["expected"]), 1229 * 0.5);
  EXPECT_DOUBLE_EQ(std::stod(m["error_abs"]), std::abs(count - 614.5));
  EXPECT_TRUE(m.count("cheb_dominates") && m.count("st1_curve") && m.count("grh_curve"));
}

TEST_F(Cli, VerifyFullIntervalCountsBadPrimes) {
  const auto r = run({"verify", "--cache", cache(), "--interval", "0:3.141592653589793", "--x", "100,1000",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["error_abs"].get<double>(), 1.0);
  EXPECT_EQ(j[1]["count"].get<std::uint64_t>(), 167u);
}

TEST_F(Cli, VerifyErrors) {
  EXPECT_EQ(run({"verify", "--cache", cache(), "--interval", "2:1", "--x", "100"}).code, 2);
  EXPECT_EQ(run({"verify", "--cache", cache(), "--interval", "abc", "--x", "100"}).code, 2);
  EXPECT_EQ(run({"verify", "--cache", cache(), "--x", "1000,100"}).code, 2);
  EXPECT_EQ(run({"verify", "--cache", cache(), "--x", "2000000"}).code, 2);
  EXPECT_EQ(run({"verify", "--cache", cache(), "--x", "100", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"verify", "--cache", dir_->file("missing.stan"), "--x", "100"}).code, 3);
  EXPECT_EQ(run({"verify", "--cache", cache(), "--x", "100", "--out", "/nonexistent-dir/o.csv"}).code, 3);
  EXPECT_EQ(run({"verify", "--x", "100"}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, VerifyCsvAndJsonAgree) {
  const auto csv = run({"verify", "--cache", cache(), "--interval", "middle", "--x", "1000,100000"});
  const auto json = run({"verify", "--cache", cache(), "--interval", "middle", "--x", "1000,100000", "--format",
                         "json"});
  ASSERT_EQ(csv.code, 0);
  ASSERT_EQ(json.code, 0);
  const auto j = nlohmann::ordered_json::parse(json.out);
  std::istringstream in(csv.out);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const auto cols = split(line);
  for (std::size_t r = 0; r < 2; ++r) {
    std::getline(in, line);
    const auto vals = split(line);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& v = j[r][cols[c]];
      if (v.is_boolean()) EXPECT_EQ(vals[c], v.get<bool>() ? "true" : "false");
      else if (v.is_number_unsigned()) EXPECT_EQ(std::stoull(vals[c]), v.get<std::uint64_t>());
      else EXPECT_EQ(std::stod(vals[c]), v.get<double>()) << cols[c];
    }
  }
}

TEST_F(Cli, VerifyBytesIndependentOfThreads) {
  std::string first;
  for (const char* t : {"1", "4", "8"}) {
    const auto out = dir_->file(std::string("v") + t + ".csv");
    ASSERT_EQ(run({"verify", "--cache", cache(), "--x", "10000,100000,1000000", "--threads", t, "--out", out}).code,
              0);
    if (first.empty()) first = slurp(out);
    else EXPECT_EQ(slurp(out), first) << "threads=" << t;
  }
  setenv("SATOTATE_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(8), 3u);
  const auto env = run({"verify", "--cache", cache(), "--x", "10000,100000,1000000", "--threads", "1"});
  unsetenv("SATOTATE_THREADS");
  EXPECT_EQ(env.out, first);
}

TEST_F(Cli, LeastPrime) {
  const auto r = run({"least-prime", "--cache", cache(), "--interval", "0:1.5707963268"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "5\n");
  const auto streamed = run({"least-prime", "--curve", "0,-1,1,-10,-20", "--conductor", "11", "--interval", "half",
                             "--format", "json"});
  ASSERT_EQ(streamed.code, 0) << streamed.err;
  EXPECT_EQ(nlohmann::json::parse(streamed.out)["p"].get<int>(), 5);
  EXPECT_EQ(run({"least-prime", "--cache", cache(), "--interval", "1:1"}).code, 2);
  EXPECT_EQ(run({"least-prime", "--curve", "0,-1,1,-10,-20", "--conductor", "11", "--interval", "0:0.001",
                 "--ceiling", "1000"})
                .code,
            2);
}

TEST_F(Cli, ChebSums) {
  const auto r = run({"cheb-sums", "--cache", cache(), "--m", "0", "--x", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "m,x,sum_plain,sum_weighted,partial_summation_residual");
  const auto vals = split(row);
  double logs = 0;
  for (const auto p : oracle::primes_upto(100))
    if (p != 11) logs += std::log(static_cast<double>(p));
  EXPECT_EQ(vals[2], "24");
  EXPECT_NEAR(std::stod(vals[3]), logs, 1e-10);
  EXPECT_LE(std::stod(vals[4]), 1e-9);
}

TEST_F(Cli, SmoothZeta) {
  ASSERT_EQ(run({"angles", "--zeta", "--xmax", "1200000", "--out", dir_->file("z.stan")}).code, 0);
  const auto r = run({"smooth", "--cache", dir_->file("z.stan"), "--m", "0", "--x", "1000000", "--ell", "4", "--eps",
                      "0.1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double psi = nlohmann::json::parse(r.out)[0]["psi"].get<double>();
  EXPECT_LE(std::abs(psi - 1e6), 0.3e6);
  EXPECT_EQ(run({"smooth", "--cache", cache(), "--m", "1", "--x", "1000000"}).code, 2);
  EXPECT_EQ(run({"smooth", "--cache", dir_->file("z.stan"), "--x", "1000000", "--preset", "paper-proof"}).code, 2);
}

TEST_F(Cli, JointAndFit) {
  const auto j = run({"joint", "--cache", cache(), "--cache2", cache(), "--x", "100000"});
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_EQ(j.out.rfind(kJointCsvVersion, 0), 0u);
  const auto f = run({"fit", "--cache", cache(), "--interval", "middle", "--x", "1e4,1e5,1e6"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("slope="), std::string::npos);
  EXPECT_EQ(run({"fit", "--cache", cache(), "--x", "1e4,1e5"}).code, 2);
}
