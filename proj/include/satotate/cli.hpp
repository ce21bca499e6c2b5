#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage or domain error,
// 3 I/O error. SATOTATE_THREADS overrides --threads.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "satotate/satotate.hpp"

namespace satotate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

inline int exit_code(const Error& e) { return e.kind() == ErrorKind::Io ? kExitIo : kExitUsage; }

// ---------------------------------------------------------------------------
// Argument parsing helpers

/// "alpha:beta" in radians, or the presets "half" = [0, pi/2], "middle" =
/// [pi/4, 3pi/4], "full" = [0, pi].
inline Interval parse_interval(const std::string& text) {
  if (text == "half") return Interval{0.0, kPi / 2};
  if (text == "middle") return Interval{kPi / 4, 3 * kPi / 4};
  if (text == "full") return Interval{0.0, kPi};
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::InvalidArgument, "interval must be 'alpha:beta' or a preset, got '" + text + "'");
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "bad interval endpoint '" + s + "'");
    }
  };
  const double a = number(text.substr(0, colon));
  double b = number(text.substr(colon + 1));
  // endpoints typed as decimal approximations of pi
  if (b > kPi && b < kPi + 1e-9) b = kPi;
  return Interval::make(a, b);
}

inline std::uint64_t parse_count(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !(v >= 0) || v != std::floor(v) || v > 1e18) throw std::invalid_argument(text);
    return static_cast<std::uint64_t>(v);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "expected a nonnegative integer, got '" + text + "'");
  }
}

/// Comma-separated or repeated values, e.g. "1e4,1e5,1e6".
inline std::vector<std::uint64_t> parse_x_list(const std::vector<std::string>& raw) {
  std::vector<std::uint64_t> xs;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) xs.push_back(parse_count(tok));
  }
  if (xs.empty()) throw Error(ErrorKind::InvalidArgument, "at least one x value is required");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw Error(ErrorKind::InvalidArgument, "x values must be strictly ascending");
  return xs;
}

inline std::vector<int> parse_int_list(const std::vector<std::string>& raw) {
  std::vector<int> out;
  for (const auto v : parse_x_list(raw)) out.push_back(static_cast<int>(v));
  return out;
}

inline CurveSpec parse_curve(const std::string& text, std::uint64_t conductor, const std::string& label) {
  std::vector<std::int64_t> a;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      a.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidArgument, "bad Weierstrass coefficient '" + tok + "'");
    }
  }
  if (a.size() != 5) throw Error(ErrorKind::InvalidArgument, "--curve needs five coefficients a1,a2,a3,a4,a6");
  CurveSpec c{a[0], a[1], a[2], a[3], a[4], conductor, label};
  validate(c);
  return c;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw Error(ErrorKind::Io, "cannot open output " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorKind::Io, "write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

inline void require_format(const std::string& fmt) {
  if (fmt != "csv" && fmt != "json") throw Error(ErrorKind::InvalidArgument, "format must be csv or json");
}

// ---------------------------------------------------------------------------

struct RunConfig {
  std::string curve;
  std::uint64_t conductor = 0;
  std::string coeffs;
  bool zeta = false;
  std::string label;
  std::string xmax = "0";
  std::string cache, cache2;
  std::vector<std::string> x;
  std::string interval = "half", interval2 = "half";
  int M = 0;
  double c_et1 = 4.0, c_et2 = 4.0, c_curve = 1.0, c_grh = 1.0;
  int grid = kDefaultGrid;
  std::vector<std::string> m;
  int ell = 4;
  double eps = 0.1;
  std::string preset = "default";
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
  std::string ceiling = "1e7";
};

inline int cmd_angles(const RunConfig& cfg, std::ostream& out) {
  const int sources = (!cfg.curve.empty()) + (!cfg.coeffs.empty()) + (cfg.zeta ? 1 : 0);
  if (sources != 1) throw Error(ErrorKind::InvalidArgument, "give exactly one of --curve, --coeffs, --zeta");
  if (cfg.out.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");
  const std::uint64_t x_max = parse_count(cfg.xmax);
  const auto t0 = std::chrono::steady_clock::now();
  AngleSeries s;
  if (!cfg.curve.empty()) {
    if (cfg.conductor == 0) throw Error(ErrorKind::InvalidArgument, "--curve requires --conductor");
    BuildOptions opt;
    opt.threads = resolve_threads(cfg.threads);
    s = build_angle_series(parse_curve(cfg.curve, cfg.conductor, cfg.label), x_max, opt);
  } else if (!cfg.coeffs.empty()) {
    s = build_angle_series(read_coefficients(cfg.coeffs), x_max);
  } else {
    s = build_zeta_series(x_max);
  }
  save_cache(s, cfg.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "wrote " << s.points.size() << " points (x_max=" << s.x_max << ", level=" << s.meta.level_q
      << ") to " << cfg.out << " in " << std::fixed << std::setprecision(3) << secs << " s\n" << std::defaultfloat;
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg.format);
  const Interval I = parse_interval(cfg.interval);
  const auto xs = parse_x_list(cfg.x);
  const auto s = load_cache(cfg.cache);
  ReportOptions opt;
  opt.M = cfg.M > 0 ? cfg.M : 50;
  opt.c_et1 = cfg.c_et1;
  opt.c_curve = cfg.c_curve;
  opt.threads = resolve_threads(cfg.threads);
  std::vector<DiscrepancyReport> rows;
  for (const auto x : xs) rows.push_back(make_discrepancy_report(s, I, x, opt));
  Output o(cfg.out, out);
  if (cfg.format == "csv") write_csv(*o, rows);
  else write_json(*o, rows);
  o.finish();
  return kExitOk;
}

inline int cmd_joint(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg.format);
  const Interval I1 = parse_interval(cfg.interval), I2 = parse_interval(cfg.interval2);
  const auto xs = parse_x_list(cfg.x);
  const auto s1 = load_cache(cfg.cache);
  const auto s2 = load_cache(cfg.cache2);
  JointOptions opt;
  opt.M = cfg.M > 0 ? cfg.M : 10;
  opt.c_et2 = cfg.c_et2;
  opt.grid = cfg.grid;
  std::vector<JointReport> rows;
  for (const auto x : xs) rows.push_back(make_joint_report(s1, s2, I1, I2, x, opt));
  Output o(cfg.out, out);
  if (cfg.format == "csv") write_csv(*o, rows);
  else write_json(*o, rows);
  o.finish();
  return kExitOk;
}

inline int cmd_least_prime(const RunConfig& cfg, std::ostream& out) {
  const Interval I = parse_interval(cfg.interval);
  LeastPrimeResult r;
  if (!cfg.cache.empty() == !cfg.curve.empty())
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --cache or --curve");
  if (!cfg.cache.empty()) {
    r = least_prime_in_interval(load_cache(cfg.cache), I, cfg.c_grh);
  } else {
    if (cfg.conductor == 0) throw Error(ErrorKind::InvalidArgument, "--curve requires --conductor");
    r = least_prime_in_interval(parse_curve(cfg.curve, cfg.conductor, cfg.label), I, cfg.c_grh,
                                parse_count(cfg.ceiling));
  }
  if (cfg.format == "json") {
    nlohmann::ordered_json j{{"p", r.p}, {"mu", mu_st(I)}, {"grh_bound", r.grh_bound}};
    out << j.dump(2) << "\n";
  } else {
    out << r.p << "\n";
  }
  return kExitOk;
}

inline int cmd_cheb_sums(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg.format);
  const auto s = load_cache(cfg.cache);
  const auto ms = parse_int_list(cfg.m.empty() ? std::vector<std::string>{"0"} : cfg.m);
  const auto xs = parse_x_list(cfg.x);
  const unsigned threads = resolve_threads(cfg.threads);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  Output o(cfg.out, out);
  if (cfg.format == "csv") *o << "m,x,sum_plain,sum_weighted,partial_summation_residual\n";
  for (const int m : ms) {
    for (const auto x : xs) {
      const auto pts = s.upto(x);
      const double plain =
          deterministic_sum(pts.size(), [&](std::size_t i) { return cheb_u(m, pts[i].theta); }, threads);
      const double weighted = theta_fm(s, m, x, threads);
      const double residual = x >= 3 ? partial_summation_residual(s, m, x) : 0.0;
      if (cfg.format == "csv") {
        *o << m << ',' << x << ',' << format_double(plain) << ',' << format_double(weighted) << ','
           << format_double(residual) << "\n";
      } else {
        rows.push_back({{"m", m}, {"x", x}, {"sum_plain", plain}, {"sum_weighted", weighted},
                        {"partial_summation_residual", residual}});
      }
    }
  }
  if (cfg.format == "json") *o << rows.dump(2) << "\n";
  o.finish();
  return kExitOk;
}

inline int cmd_smooth(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg.format);
  const auto s = load_cache(cfg.cache);
  const auto ms = parse_int_list(cfg.m.empty() ? std::vector<std::string>{"0"} : cfg.m);
  const auto xs = parse_x_list(cfg.x);
  const unsigned threads = resolve_threads(cfg.threads);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  Output o(cfg.out, out);
  if (cfg.format == "csv") *o << "m,x,ell,eps,psi,psi_over_x\n";
  for (const int m : ms) {
    for (const auto x : xs) {
      SmoothingWeight w;
      if (cfg.preset == "default") w = SmoothingWeight::make(static_cast<double>(x), cfg.ell, cfg.eps);
      else if (cfg.preset == "paper-proof") w = SmoothingWeight::paper_proof(static_cast<double>(x), std::max(m, 1));
      else throw Error(ErrorKind::InvalidArgument, "preset must be default or paper-proof");
      const double psi = smoothed_psi(s, m, w, threads);
      if (cfg.format == "csv") {
        *o << m << ',' << x << ',' << w.ell << ',' << format_double(w.eps) << ',' << format_double(psi) << ','
           << format_double(psi / static_cast<double>(x)) << "\n";
      } else {
        rows.push_back({{"m", m}, {"x", x}, {"ell", w.ell}, {"eps", w.eps}, {"psi", psi},
                        {"psi_over_x", psi / static_cast<double>(x)}});
      }
    }
  }
  if (cfg.format == "json") *o << rows.dump(2) << "\n";
  o.finish();
  return kExitOk;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  require_format(cfg.format);
  const Interval I = parse_interval(cfg.interval);
  const auto xs = parse_x_list(cfg.x);
  const auto s = load_cache(cfg.cache);
  const double mu = mu_st(I);
  std::vector<double> xd, err;
  for (const auto x : xs) {
    const auto pi_x = prime_count(x);
    xd.push_back(static_cast<double>(x));
    err.push_back(pi_x == 0 ? 0.0
                            : std::abs(static_cast<double>(count_in_interval(s, I, x)) / static_cast<double>(pi_x) - mu));
  }
  const auto fit = fit_decay_exponent(xd, err);
  Output o(cfg.out, out);
  if (cfg.format == "csv") {
    *o << "x,normalized_error\n";
    for (std::size_t i = 0; i < xs.size(); ++i) *o << xs[i] << ',' << format_double(err[i]) << "\n";
    *o << "# slope=" << format_double(fit.slope) << " intercept=" << format_double(fit.intercept) << "\n";
  } else {
    nlohmann::ordered_json j{{"x", xs}, {"normalized_error", err}, {"slope", fit.slope},
                             {"intercept", fit.intercept}};
    *o << j.dump(2) << "\n";
  }
  o.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

/// Parses argv-style arguments (without the program name) and runs one command.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sato-Tate angle statistics for non-CM newforms", "satotate"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_threads = [&](CLI::App* c) { c->add_option("--threads", cfg.threads, "worker threads (0 = all cores)"); };
  auto add_output = [&](CLI::App* c, const char* default_format) {
    cfg.format = default_format;
    c->add_option("--out", cfg.out, "output path (default stdout)");
    c->add_option("--format", cfg.format, "csv or json");
  };

  auto* angles = app.add_subcommand("angles", "build an angle series and write a STAN cache");
  angles->add_option("--curve", cfg.curve, "Weierstrass coefficients a1,a2,a3,a4,a6");
  angles->add_option("--conductor", cfg.conductor, "conductor of the curve");
  angles->add_option("--coeffs", cfg.coeffs, "coefficient file");
  angles->add_flag("--zeta", cfg.zeta, "level-1 series for the Riemann zeta function");
  angles->add_option("--label", cfg.label, "label stored with the series");
  angles->add_option("--xmax", cfg.xmax, "largest prime covered")->required();
  angles->add_option("--out", cfg.out, "cache path")->required();
  add_threads(angles);

  auto* verify = app.add_subcommand("verify", "discrepancy report per x");
  verify->add_option("--cache", cfg.cache)->required();
  verify->add_option("--interval", cfg.interval, "alpha:beta, half, middle or full");
  verify->add_option("--x", cfg.x, "x values, comma separated")->required();
  verify->add_option("--M", cfg.M, "truncation for the Erdos-Turan and Chebyshev bounds (default 50)");
  verify->add_option("--c-et1", cfg.c_et1, "constant for the Chebyshev-sum bound");
  verify->add_option("--c-curve", cfg.c_curve, "constant for the theoretical bound curves");
  add_output(verify, "csv");
  add_threads(verify);

  auto* joint = app.add_subcommand("joint", "joint counts for two forms");
  joint->add_option("--cache", cfg.cache)->required();
  joint->add_option("--cache2", cfg.cache2)->required();
  joint->add_option("--interval", cfg.interval);
  joint->add_option("--interval2", cfg.interval2);
  joint->add_option("--x", cfg.x)->required();
  joint->add_option("--M", cfg.M, "truncation for the two-dimensional bound (default 10)");
  joint->add_option("--c-et2", cfg.c_et2);
  joint->add_option("--grid", cfg.grid, "box-discrepancy grid resolution");
  add_output(joint, "csv");

  auto* least = app.add_subcommand("least-prime", "least good prime with theta_p in an interval");
  least->add_option("--cache", cfg.cache);
  least->add_option("--curve", cfg.curve);
  least->add_option("--conductor", cfg.conductor);
  least->add_option("--interval", cfg.interval)->required();
  least->add_option("--c", cfg.c_grh, "constant of the GRH-shape ceiling");
  least->add_option("--ceiling", cfg.ceiling, "search limit when streaming from a curve");
  least->add_option("--format", cfg.format, "text or json");

  auto* cheb = app.add_subcommand("cheb-sums", "Chebyshev prime sums and partial-summation check");
  cheb->add_option("--cache", cfg.cache)->required();
  cheb->add_option("--m", cfg.m, "Chebyshev indices");
  cheb->add_option("--x", cfg.x)->required();
  add_output(cheb, "csv");
  add_threads(cheb);

  auto* smooth = app.add_subcommand("smooth", "smoothed prime-power sums");
  smooth->add_option("--cache", cfg.cache)->required();
  smooth->add_option("--m", cfg.m);
  smooth->add_option("--x", cfg.x)->required();
  smooth->add_option("--ell", cfg.ell);
  smooth->add_option("--eps", cfg.eps);
  smooth->add_option("--preset", cfg.preset, "default or paper-proof");
  add_output(smooth, "csv");
  add_threads(smooth);

  auto* fit = app.add_subcommand("fit", "log-log decay fit of the normalized interval error");
  fit->add_option("--cache", cfg.cache)->required();
  fit->add_option("--interval", cfg.interval);
  fit->add_option("--x", cfg.x)->required();
  add_output(fit, "csv");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (least->parsed() && cfg.format == "csv") cfg.format = "text";

  try {
    if (angles->parsed()) return cmd_angles(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (joint->parsed()) return cmd_joint(cfg, out);
    if (least->parsed()) return cmd_least_prime(cfg, out);
    if (cheb->parsed()) return cmd_cheb_sums(cfg, out);
    if (smooth->parsed()) return cmd_smooth(cfg, out);
    if (fit->parsed()) return cmd_fit(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  return kExitUsage;
}

}  // namespace satotate::cli
