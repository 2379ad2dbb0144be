// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace inpipe {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfRange,
  Parse,
  Io,
  Decode,
  State,
};

/// Exception carried through the C++ core; the C API maps `code()` onto
/// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace inpipe
