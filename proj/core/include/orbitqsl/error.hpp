#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orbitqsl {

enum class ErrorKind {
  NotHermitian,
  NotUnitary,
  NotPSD,
  TraceNotOne,
  DimensionMismatch,
  BlochOutOfBall,
  EmptySchedule,
  InvalidArgument,
  ZeroMeanEnergy,
  DegenerateSpectrum,
  IncompleteKraus,
  DegenerateDenominator,
  InsufficientSettings,
  DegenerateFit,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every validation failure in the library is reported through this type.
/// `kind()` names the violated axiom or precondition.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace orbitqsl
