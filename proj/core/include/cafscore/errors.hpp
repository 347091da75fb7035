// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cafscore {

/// Precondition violated by a caller (bad vector, alpha out of range, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// FLEUR digit extraction found nothing to extract.
class ExtractionError : public std::runtime_error {
 public:
  enum class Code { no_decimal_point, empty_trace };

  ExtractionError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// Dataset or record file could not be loaded. Message names the line.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Aggregation failed, e.g. scores missing for some items.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Correlation is undefined for the input (zero variance, all ties).
class UndefinedCorrelation : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File backend has no record for the requested subject.
class RecordAbsent : public BackendError {
 public:
  using BackendError::BackendError;
};

/// HTTP failure that persisted through all retries.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A backend returned a record that breaks its type invariants.
class ValidationError : public BackendError {
 public:
  using BackendError::BackendError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cafscore
