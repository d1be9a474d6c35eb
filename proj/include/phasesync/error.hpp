#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phasesync {

enum class ErrorCode {
  InvalidArgument,
  InvalidBand,
  ShapeError,
  SignalTooShort,
  AllSamplesMasked,
  FactorTooLarge,
  EmptyEffectiveWindow,
  WindowTooLong,
  EmptyBand,
  Divergence,
  CalibrationFailure,
  OutputMismatch,
  FormatError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-status mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Non-fatal diagnostics (undersized filter order, aliasing risk on downsample).
// The default handler prints to stderr; tests install their own to capture them.
using WarningHandler = std::function<void(std::string_view)>;

WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace phasesync
