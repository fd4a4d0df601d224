// Copyright 2026 The cdakit Authors
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

#ifndef CDA_ERROR_HPP
#define CDA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cda {

enum class ErrorCode {
  // I/O
  Io,
  // input validation
  Encoding,
  Parse,
  DuplicateKey,
  SpanOutOfBounds,
  UnbalancedCoref,
  MalformedLine,
  InvalidToken,
  InvalidLexicon,
  ModeMismatch,
  MissingClusters,
  UnknownPlaceholder,
  EmptySet,
  EmptyCorpus,
  BadOrder,
  VersionMismatch,
  Usage,
  // scorer failures
  MissingScore,
  UnsupportedKind,
  SpawnError,
  ProtocolError,
  Timeout,
  ChildError,
  ScorerFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Encoding: return "EncodingError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::SpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::UnbalancedCoref: return "UnbalancedCoref";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::InvalidToken: return "InvalidToken";
    case ErrorCode::InvalidLexicon: return "InvalidLexicon";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::MissingClusters: return "MissingClusters";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::Usage: return "UsageError";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::SpawnError: return "SpawnError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ChildError: return "ChildError";
    case ErrorCode::ScorerFailure: return "ScorerFailure";
  }
  return "Error";
}

/// Base exception for everything the toolkit throws. The code is stable and
/// drives CLI exit statuses; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by scorers. `detail()` narrows the failure (MissingScore, Timeout,
/// ...); `code()` is always ScorerFailure so callers can catch one family.
class ScorerError : public Error {
 public:
  ScorerError(ErrorCode detail, const std::string& message)
      : Error(ErrorCode::ScorerFailure,
              std::string(to_string(detail)) + ": " + message),
        detail_(detail) {}

  ErrorCode detail() const noexcept { return detail_; }

 private:
  ErrorCode detail_;
};

inline bool is_scorer_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingScore:
    case ErrorCode::UnsupportedKind:
    case ErrorCode::SpawnError:
    case ErrorCode::ProtocolError:
    case ErrorCode::Timeout:
    case ErrorCode::ChildError:
    case ErrorCode::ScorerFailure:
      return true;
    default:
      return false;
  }
}

}  // namespace cda

#endif  // CDA_ERROR_HPP
