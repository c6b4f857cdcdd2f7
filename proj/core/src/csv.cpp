#include "momsafe/csv.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace momsafe {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string csv_number(double v, int decimals) {
  if (std::isnan(v)) return {};
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  std::string s = fmt::format("{:.{}f}", v, decimals);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), header_(std::move(header)), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  row(header_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw std::logic_error(fmt::format("{}: row has {} cells, header has {}", path_.string(), cells.size(),
                                       header_.size()));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error(fmt::format("write to {} failed", path_.string()));
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error(fmt::format("missing column '{}'", name));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(fmt::format("{} is empty", path.string()));
  t.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw std::runtime_error(fmt::format("{}:{}: expected {} cells, got {}", path.string(), line_no,
                                           t.header.size(), cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace momsafe
