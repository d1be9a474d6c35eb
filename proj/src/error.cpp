#include "phasesync/error.hpp"

#include <iostream>
#include <mutex>

namespace phasesync {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidBand: return "InvalidBand";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::AllSamplesMasked: return "AllSamplesMasked";
    case ErrorCode::FactorTooLarge: return "FactorTooLarge";
    case ErrorCode::EmptyEffectiveWindow: return "EmptyEffectiveWindow";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::CalibrationFailure: return "CalibrationFailure";
    case ErrorCode::OutputMismatch: return "OutputMismatch";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

namespace {

std::mutex g_warning_mutex;

WarningHandler& handler_slot() {
  static WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warning_mutex);
  std::swap(handler_slot(), handler);
  return handler;
}

void warn(std::string_view message) {
  std::lock_guard lock(g_warning_mutex);
  if (handler_slot()) handler_slot()(message);
}

}  // namespace phasesync
