#pragma once

#include <stdexcept>
#include <string>

namespace driftgate {

/// Base class for all library errors. Maps to CLI exit code 2 unless a
/// subclass says otherwise.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column/schema mismatch: missing column, wrong kind, incompatible schemas.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A cell failed to parse (carries row/column context in the message).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input had no data rows.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Labels contain a single class where both are required.
class DegenerateLabelError : public Error {
 public:
  using Error::Error;
};

/// A chronological or quantile selection produced no rows.
class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

/// A cross-validation fold could not be trained or evaluated.
class FoldError : public Error {
 public:
  FoldError(int fold_index, const std::string& what)
      : Error("fold " + std::to_string(fold_index) + ": " + what),
        fold_index_(fold_index) {}
  int fold_index() const { return fold_index_; }

 private:
  int fold_index_;
};

/// Invalid synthetic-generation parameters.
class ShiftSpecError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure. Maps to CLI exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace driftgate
