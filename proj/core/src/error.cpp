#include "uu/error.hpp"

namespace uu {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported_loss: return "unsupported-loss";
    case ErrorKind::degenerate_priors: return "degenerate-priors";
    case ErrorKind::single_class: return "single-class";
    case ErrorKind::shape: return "shape";
    case ErrorKind::config: return "config";
    case ErrorKind::empty_sample: return "empty-sample";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::unsupported_model: return "unsupported-model";
    case ErrorKind::data_exhausted: return "data-exhausted";
    case ErrorKind::parse: return "parse";
    case ErrorKind::aborted_run: return "aborted-run";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

AbortedRun::AbortedRun(int epoch, const std::string& what)
    : Error(ErrorKind::aborted_run, "epoch " + std::to_string(epoch) + ": " + what),
      epoch_(epoch) {}

}  // namespace uu
