#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcap {

/// Shortest-round-trip is not used on purpose: CSV artifacts carry 17
/// significant digits, '.' decimal separator, independent of the C locale.
std::string format_double(double value);

/// Minimal CSV table: header plus rows of preformatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_cell(double value);
std::string csv_cell(int value);
std::string csv_cell(bool value);
std::string csv_cell(std::string_view value);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Splits a CSV line on commas (no quoting support; artifacts never quote).
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses a full double; throws ArtifactError with `what` on failure.
double parse_double(std::string_view text, std::string_view what);

}  // namespace pcap
