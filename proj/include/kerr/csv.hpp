#ifndef KERR_CSV_HPP
#define KERR_CSV_HPP

#include <string>
#include <vector>

namespace kerr {

/// %.12e, the only float format written to tables.
std::string format_double(double v);

/// Comma-separated table with `#` metadata lines above the header. Rendering
/// is byte-stable: fixed column order, LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_metadata(const std::string& line);
  void add_row(const std::vector<double>& values);
  /// Row with preformatted cells (for integer or text columns).
  void add_text_row(std::vector<std::string> cells);

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string render() const;

 private:
  std::vector<std::string> metadata_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Quotes a cell when it contains a comma, quote or newline.
std::string csv_escape(const std::string& cell);

/// Writes `content` verbatim (binary mode). Throws std::runtime_error on I/O
/// failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace kerr

#endif  // KERR_CSV_HPP
