#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace shetorque {

/// Shortest round-trippable-enough text for a value: 12 significant digits,
/// '.' decimal separator regardless of locale.
std::string format_number(double value);

/// Empty field for a missing value.
std::string format_optional(const std::optional<double>& value);

/// Rows of pre-formatted fields under a fixed header, written with LF line
/// endings. Fields are not quoted; callers pass plain tokens.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  void append(const CsvTable& other);

  [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
  [[nodiscard]] const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

  void write(std::ostream& out) const;
  [[nodiscard]] std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace shetorque
