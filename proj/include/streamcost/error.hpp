/*
    Copyright (C) 2026 The streamcost Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace streamcost {

enum class ErrorCode {
    InvalidArgument,
    InvalidQuery,
    MissingAssignment,
    UnknownHardware,
    CycleDetected,
    EmptyStream,
    EmptyWindow,
    EmptyDataset,
    UnknownCategory,
    MissingStats,
    DimensionMismatch,
    NegativeInput,
    NonPositive,
    NoFeasiblePlacement,
    SchemaMismatch,
    Diverged,
    Format,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidQuery: return "InvalidQuery";
        case ErrorCode::MissingAssignment: return "MissingAssignment";
        case ErrorCode::UnknownHardware: return "UnknownHardware";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::EmptyStream: return "EmptyStream";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::MissingStats: return "MissingStats";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NegativeInput: return "NegativeInput";
        case ErrorCode::NonPositive: return "NonPositive";
        case ErrorCode::NoFeasiblePlacement: return "NoFeasiblePlacement";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::Format: return "Format";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace streamcost
