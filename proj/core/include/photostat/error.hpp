#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace photostat {

enum class ErrorKind {
  kValidation,
  kClampRate,
  kDeltaOffGrid,
  kTraceTooShort,
  kRateTooHigh,
  kUnsorted,
  kDurationMismatch,
  kShapeMismatch,
  kInsufficientStatistics,
  kNonConvergence,
  kFormat,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind maps onto the process exit
/// codes used by the command-line tool (see exit_code()).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the detector when a sample's click probability reaches 0.1.
class RateTooHighError : public Error {
 public:
  RateTooHighError(std::size_t sample_index, double probability);

  std::size_t sample_index() const noexcept { return sample_index_; }
  double probability() const noexcept { return probability_; }

 private:
  std::size_t sample_index_;
  double probability_;
};

/// 2 for validation-type errors, 3 for statistics, 4 for I/O and format.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::kValidation, message);
}

/// Non-fatal diagnostics (e.g. sparse tag streams). Defaults to stderr.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace photostat
