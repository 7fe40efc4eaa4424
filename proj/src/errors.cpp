#include "mrhet/errors.hpp"

namespace mrhet {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateSnpId: return "DuplicateSnpId";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::DegenerateGenotype: return "DegenerateGenotype";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::VanishingDenominator: return "VanishingDenominator";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::TooManyFailures: return "TooManyFailures";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error Error::missing_column(const std::string& column, const std::string& file) {
  Error e(ErrorKind::MissingColumn, "column '" + column + "' not found in header of " + file);
  e.column_ = column;
  e.file_ = file;
  return e;
}

Error Error::malformed_row(std::size_t line, const std::string& file, const std::string& why) {
  Error e(ErrorKind::MalformedRow, file + ":" + std::to_string(line) + ": " + why);
  e.line_ = line;
  e.file_ = file;
  return e;
}

}  // namespace mrhet
