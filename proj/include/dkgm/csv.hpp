#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dkgm {

/// Shortest round-trip decimal form, '.' decimal point, no locale.
std::string format_double(double v);

/// Minimal CSV emitter: UTF-8, one header row, comma separated. Cells are
/// written verbatim; all our schemas are plain numbers and identifiers.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(const std::vector<std::string>& cells) { row(cells); }
  void row(const std::vector<std::string>& cells);
  void raw_line(const std::string& line);

 private:
  std::ofstream out_;
};

}  // namespace dkgm
