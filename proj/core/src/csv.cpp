#include "shetorque/csv.hpp"

#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "shetorque/errors.hpp"

namespace shetorque {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", value);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) {
    throw Error(Errc::invalid_input,
                fmt::format("row has {} fields, header has {}", fields.size(), header_.size()));
  }
  rows_.push_back(std::move(fields));
}

void CsvTable::append(const CsvTable& other) {
  if (other.header_ != header_) throw Error(Errc::invalid_input, "cannot append tables with different headers");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

namespace {
void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}
}  // namespace

void CsvTable::write(std::ostream& out) const {
  write_line(out, header_);
  for (const auto& row : rows_) write_line(out, row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace shetorque
