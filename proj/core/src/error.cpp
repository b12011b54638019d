#include "photostat/error.hpp"

#include <iostream>
#include <mutex>
#include <sstream>
#include <utility>

namespace photostat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kClampRate: return "clamp-rate";
    case ErrorKind::kDeltaOffGrid: return "delta-not-on-grid";
    case ErrorKind::kTraceTooShort: return "trace-too-short";
    case ErrorKind::kRateTooHigh: return "rate-too-high";
    case ErrorKind::kUnsorted: return "unsorted-input";
    case ErrorKind::kDurationMismatch: return "duration-mismatch";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kInsufficientStatistics: return "insufficient-statistics";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {
std::string rate_message(std::size_t index, double p) {
  std::ostringstream os;
  os << "click probability " << p << " >= 0.1 at sample " << index;
  return os.str();
}
}  // namespace

RateTooHighError::RateTooHighError(std::size_t sample_index, double probability)
    : Error(ErrorKind::kRateTooHigh, rate_message(sample_index, probability)),
      sample_index_(sample_index),
      probability_(probability) {}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInsufficientStatistics:
    case ErrorKind::kNonConvergence:
      return 3;
    case ErrorKind::kFormat:
    case ErrorKind::kIo:
      return 4;
    default:
      return 2;
  }
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

namespace {
std::mutex g_warning_mutex;
WarningHandler g_warning_handler;
}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warning_mutex);
  g_warning_handler = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard lock(g_warning_mutex);
  if (g_warning_handler) {
    g_warning_handler(message);
  } else {
    std::cerr << "photostat: warning: " << message << '\n';
  }
}

}  // namespace photostat
