#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <optional>

#include "photostat/error.hpp"

namespace photostat::testing {

// Empty when f returns normally or throws something other than photostat::Error.
inline std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace photostat::testing

#define EXPECT_ERROR_KIND(statement, expected_kind) \
  EXPECT_EQ(::photostat::testing::error_kind([&] { (void)(statement); }), (expected_kind))
