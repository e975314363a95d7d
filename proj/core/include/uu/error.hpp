#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uu {

enum class ErrorKind {
  domain,
  unsupported_loss,
  degenerate_priors,
  single_class,
  shape,
  config,
  empty_sample,
  precondition,
  unsupported_model,
  data_exhausted,
  parse,
  aborted_run,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. `kind()` lets
/// callers (and the CLI exit-code mapping) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);

  /// 1-based line number in the offending file.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class AbortedRun : public Error {
 public:
  AbortedRun(int epoch, const std::string& what);

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace uu
