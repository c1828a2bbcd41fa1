#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ettbicc {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// Plain numeric CSV with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws std::out_of_range if absent.
  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace ettbicc
