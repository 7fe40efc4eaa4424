#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrhet {

enum class ErrorKind {
  MissingColumn,
  MalformedRow,
  DuplicateSnpId,
  EmptyIntersection,
  DegenerateGenotype,
  DegenerateDesign,
  VanishingDenominator,
  NonConvergence,
  TooManyFailures,
  DegenerateInput,
  BadConfig,
  Io,
};

std::string_view error_kind_name(ErrorKind kind);

// Single exception type for every data or numerical failure in the library.
// `kind()` is the machine-readable tag the CLI emits on stderr.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  static Error missing_column(const std::string& column, const std::string& file);
  static Error malformed_row(std::size_t line, const std::string& file, const std::string& why);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::string>& column() const noexcept { return column_; }
  const std::optional<std::size_t>& line() const noexcept { return line_; }
  const std::optional<std::string>& file() const noexcept { return file_; }

 private:
  ErrorKind kind_;
  std::optional<std::string> column_;
  std::optional<std::size_t> line_;
  std::optional<std::string> file_;
};

}  // namespace mrhet
