#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace momsafe {

/// Fixed-point rendering used for every floating-point CSV cell, so output
/// bytes depend only on the values. NaN renders as an empty cell.
std::string csv_number(double v, int decimals = 6);

/// Comma-separated writer with a fixed header. Cells are written verbatim;
/// callers only pass identifiers and numbers.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  std::size_t columns() const noexcept { return header_.size(); }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<std::string> header_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::runtime_error naming the column
  /// when it is missing.
  std::size_t column(std::string_view name) const;
};

/// Reads a headered CSV without quoting. Throws std::runtime_error on I/O
/// failure or a row whose width differs from the header.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace momsafe
