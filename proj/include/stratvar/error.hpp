#ifndef STRATVAR_ERROR_HPP
#define STRATVAR_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratvar {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  TooFewStrata,
  StratumTooSmall,
  AllocationOutOfRange,
  RedOutOfRange,
  NotProportionable,
  ZeroStratum,
  NotProportional,
  SearchSpaceExceeded,
  EmptyClass,
  HypothesisViolated,
  ExhaustedStratum,
  UnknownTheoremId,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewStrata: return "TooFewStrata";
    case ErrorKind::StratumTooSmall: return "StratumTooSmall";
    case ErrorKind::AllocationOutOfRange: return "AllocationOutOfRange";
    case ErrorKind::RedOutOfRange: return "RedOutOfRange";
    case ErrorKind::NotProportionable: return "NotProportionable";
    case ErrorKind::ZeroStratum: return "ZeroStratum";
    case ErrorKind::NotProportional: return "NotProportional";
    case ErrorKind::SearchSpaceExceeded: return "SearchSpaceExceeded";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ExhaustedStratum: return "ExhaustedStratum";
    case ErrorKind::UnknownTheoremId: return "UnknownTheoremId";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Thrown by every validating operation. Carries the offending stratum index
/// when the failure is tied to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(message), kind_(kind), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace stratvar

#endif  // STRATVAR_ERROR_HPP
