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

#include "mood3d/error.h"

namespace mood3d {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth:
      return "NonPositiveDepth";
    case ErrorCode::kDegenerateInput:
      return "DegenerateInput";
    case ErrorCode::kDegenerateBox:
      return "DegenerateBox";
    case ErrorCode::kOverflow:
      return "Overflow";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kMixedFrames:
      return "MixedFrames";
    case ErrorCode::kNoGroundTruth:
      return "NoGroundTruth";
    case ErrorCode::kEmptyGroundTruth:
      return "EmptyGroundTruth";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kEmptyMask:
      return "EmptyMask";
    case ErrorCode::kLengthMismatch:
      return "LengthMismatch";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kSchemaVersion:
      return "SchemaVersionError";
    case ErrorCode::kInvariantViolation:
      return "InvariantViolation";
    case ErrorCode::kInvalidSpec:
      return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace mood3d
