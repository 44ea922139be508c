#include "kerr/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kerr {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvTable needs at least one column");
}

void CsvTable::add_metadata(const std::string& line) {
  if (line.find('\n') != std::string::npos)
    throw std::invalid_argument("metadata line must not contain a newline");
  metadata_.push_back(line);
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_text_row(std::move(cells));
}

void CsvTable::add_text_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("CsvTable row has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(columns_.size()));
  rows_.push_back(std::move(cells));
}

std::string CsvTable::render() const {
  std::string out;
  for (const auto& m : metadata_) out += "# " + m + "\n";
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace kerr
