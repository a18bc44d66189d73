// Copyright 2026 The tbcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tbc {

enum class ErrorCode {
    ZeroState,
    NonContractive,
    OutOfRange,
    LengthMismatch,
    IncompatibleShift,
    LayoutMismatch,
    GridMismatch,
    UnknownLevel,
    TruncationInadequate,
    WindowOverflow,
    InconsistentSettings,
    UnsupportedLevels,
    MissingBasis,
    InsufficientScan,
    InvalidArgument,
};

constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ZeroState: return "ZeroState";
        case ErrorCode::NonContractive: return "NonContractive";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::IncompatibleShift: return "IncompatibleShift";
        case ErrorCode::LayoutMismatch: return "LayoutMismatch";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::UnknownLevel: return "UnknownLevel";
        case ErrorCode::TruncationInadequate: return "TruncationInadequate";
        case ErrorCode::WindowOverflow: return "WindowOverflow";
        case ErrorCode::InconsistentSettings: return "InconsistentSettings";
        case ErrorCode::UnsupportedLevels: return "UnsupportedLevels";
        case ErrorCode::MissingBasis: return "MissingBasis";
        case ErrorCode::InsufficientScan: return "InsufficientScan";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Contract violation raised by any simulation module. The code identifies
/// the failure class; what() carries the module context.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

}  // namespace tbc
