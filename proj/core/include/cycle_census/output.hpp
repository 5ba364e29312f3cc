#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cycle_census {

// Writes to a sibling temporary file and renames it over `path`. Creates parent
// directories. Throws Io.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
// Same, gzip-compressed (deterministic header: no name, no timestamp).
void write_gzip_atomic(const std::filesystem::path& path, std::string_view content);

// "%.17g"; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string csv_file;
  std::string title;
  int x_column = 1;
  int y_column = 2;
  bool log_y = false;
};

// gnuplot commands plotting each CSV series into <stem>.png.
std::string plot_script(const std::string& stem, const std::vector<PlotSeries>& series);

}  // namespace cycle_census
