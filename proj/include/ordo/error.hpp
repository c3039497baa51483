// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ordo {

enum class ErrorCode {
  EmptyCorpus,
  InvalidScore,
  InvalidRatio,
  EmptySelection,
  InvalidInterval,
  UncoveredInterval,
  InvalidLayerCount,
  InvalidWindow,
  InvalidCrossConfig,
  DirectionMismatch,
  DimensionError,
  InvalidFraction,
  InvalidDelta,
  InvalidScale,
  InsufficientData,
  SingularFit,
  ConvergenceFailure,
  DomainError,
  ParseError,
  DuplicateId,
  ValidationError,
  FormatError,
  StaleIndex,
  IoError,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidScore: return "InvalidScore";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::UncoveredInterval: return "UncoveredInterval";
    case ErrorCode::InvalidLayerCount: return "InvalidLayerCount";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::InvalidCrossConfig: return "InvalidCrossConfig";
    case ErrorCode::DirectionMismatch: return "DirectionMismatch";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::InvalidScale: return "InvalidScale";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::StaleIndex: return "StaleIndex";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

/// Exception carrying a machine-checkable error code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ordo
