/* Copyright 2026 The mood3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MOOD3D_ERROR_H_
#define MOOD3D_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mood3d {

enum class ErrorCode {
  kNonPositiveDepth,
  kDegenerateInput,
  kDegenerateBox,
  kOverflow,
  kInvalidArgument,
  kMixedFrames,
  kNoGroundTruth,
  kEmptyGroundTruth,
  kOutOfRange,
  kEmptyMask,
  kLengthMismatch,
  kParseError,
  kSchemaVersion,
  kInvariantViolation,
  kInvalidSpec,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Input-file failures keep the 1-based line number they were raised on.
// Line 0 means the error is not tied to a particular line.
class InputError : public Error {
 public:
  InputError(ErrorCode code, int line, const std::string& message)
      : Error(code, line > 0 ? "line " + std::to_string(line) + ": " + message
                             : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace mood3d

#endif  // MOOD3D_ERROR_H_
