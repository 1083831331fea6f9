#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace voi {

enum class ErrorKind {
  InvalidArgument,
  NonFiniteReduction,
  ModelEvaluation,
  ParseError,
  DegenerateFocal,
  FocalDimension,
  InvalidCount,
  DegenerateWeights,
  UnsupportedDependence,
  VarianceInflation,
  Validation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `index()` carries the row, line,
/// nested sample or repetition the failure is attached to, when there is one.
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

}  // namespace voi
