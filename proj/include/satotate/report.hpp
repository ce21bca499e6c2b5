#pragma once

// CSV and JSON encodings of the report types. CSV files start with a
// versioned comment line so downstream plotting can pin the column layout.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "satotate/equidist.hpp"

namespace satotate {

inline constexpr const char* kVerifyCsvVersion = "# satotate-verify-csv v1";
inline constexpr const char* kJointCsvVersion = "# satotate-joint-csv v1";

/// Shortest text that reads back to the same double ("%.17g").
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

template <class T>
std::string csv_field(const T& v) {
  if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
  else if constexpr (std::is_floating_point_v<T>) return format_double(v);
  else return std::to_string(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const DiscrepancyReport& r) {
  return {{"x", r.x},
          {"pi_x", r.pi_x},
          {"count", r.count},
          {"expected", r.expected},
          {"error_abs", r.error_abs},
          {"exact_sup_discrepancy", r.exact_sup_discrepancy},
          {"et_bound", r.et_bound},
          {"cheb_bound", r.cheb_bound},
          {"cheb_dominates", r.cheb_dominates},
          {"st1_curve", r.st1_curve},
          {"grh_curve", r.grh_curve}};
}

inline nlohmann::ordered_json to_json(const JointReport& r) {
  return {{"x", r.x},
          {"pi_x", r.pi_x},
          {"joint_count", r.joint_count},
          {"expected", r.expected},
          {"error_abs", r.error_abs},
          {"box_discrepancy_grid", r.box_discrepancy_grid},
          {"cheb2_bound", r.cheb2_bound}};
}

inline void write_csv(std::ostream& out, const std::vector<DiscrepancyReport>& rows) {
  out << kVerifyCsvVersion << "\n"
      << "x,pi_x,count,expected,error_abs,exact_sup_discrepancy,et_bound,cheb_bound,cheb_dominates,st1_curve,"
         "grh_curve\n";
  for (const auto& r : rows) {
    using detail::csv_field;
    out << csv_field(r.x) << ',' << csv_field(r.pi_x) << ',' << csv_field(r.count) << ',' << csv_field(r.expected)
        << ',' << csv_field(r.error_abs) << ',' << csv_field(r.exact_sup_discrepancy) << ','
        << csv_field(r.et_bound) << ',' << csv_field(r.cheb_bound) << ',' << csv_field(r.cheb_dominates) << ','
        << csv_field(r.st1_curve) << ',' << csv_field(r.grh_curve) << "\n";
  }
}

inline void write_csv(std::ostream& out, const std::vector<JointReport>& rows) {
  out << kJointCsvVersion << "\n"
      << "x,pi_x,joint_count,expected,error_abs,box_discrepancy_grid,cheb2_bound\n";
  for (const auto& r : rows) {
    using detail::csv_field;
    out << csv_field(r.x) << ',' << csv_field(r.pi_x) << ',' << csv_field(r.joint_count) << ','
        << csv_field(r.expected) << ',' << csv_field(r.error_abs) << ',' << csv_field(r.box_discrepancy_grid)
        << ',' << csv_field(r.cheb2_bound) << "\n";
  }
}

template <class Report>
void write_json(std::ostream& out, const std::vector<Report>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  out << arr.dump(2) << "\n";
}

}  // namespace satotate
