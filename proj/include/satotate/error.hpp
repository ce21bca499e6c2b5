#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace satotate {

enum class ErrorKind {
  BadReduction,
  SmallCharacteristic,
  AmbiguousOrder,
  DeligneViolation,
  MissingPrime,
  FormatError,
  RangeExceeded,
  SearchExceeded,
  DegenerateFit,
  BadPrime,
  InvalidArgument,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadReduction: return "BadReduction";
    case ErrorKind::SmallCharacteristic: return "SmallCharacteristic";
    case ErrorKind::AmbiguousOrder: return "AmbiguousOrder";
    case ErrorKind::DeligneViolation: return "DeligneViolation";
    case ErrorKind::MissingPrime: return "MissingPrime";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::RangeExceeded: return "RangeExceeded";
    case ErrorKind::SearchExceeded: return "SearchExceeded";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::BadPrime: return "BadPrime";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so
/// callers (notably the CLI) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace satotate
