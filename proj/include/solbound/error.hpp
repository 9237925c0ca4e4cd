#pragma once

#include <stdexcept>
#include <string>

namespace solbound {

// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  kParse,              // malformed input document
  kMissingField,       // required field absent
  kInvalidValue,       // field present but outside its domain
  kUnsupportedType,    // MIXED dtype reaching byte accounting
  kInconsistentBinding,
  kCycle,
  kDivisionByZero,
  kUnknownPrecision,
  kDegenerate,         // zero-work workload, degenerate reference, ...
  kMisconfiguration,
  kEmpty,
  kRuleLoad,
  kValidation,         // structural defects found while instantiating a graph
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace solbound
