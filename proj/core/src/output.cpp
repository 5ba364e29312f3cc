#include "cycle_census/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <zlib.h>

#include "cycle_census/error.hpp"

namespace cycle_census {

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move temporary file into place at " + path.string());
  }
}

void ensure_parent(const std::filesystem::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  ensure_parent(path);
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  commit(tmp, path);
}

void write_gzip_atomic(const std::filesystem::path& path, std::string_view content) {
  z_stream zs{};
  // windowBits 15 + 16 selects the gzip wrapper; zlib writes mtime 0 and no name.
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kIo, "zlib initialisation failed");
  }
  std::string compressed;
  compressed.resize(deflateBound(&zs, static_cast<uLong>(content.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(content.data()));
  zs.avail_in = static_cast<uInt>(content.size());
  zs.next_out = reinterpret_cast<Bytef*>(compressed.data());
  zs.avail_out = static_cast<uInt>(compressed.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto produced = compressed.size() - zs.avail_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kIo, "zlib compression failed for " + path.string());
  compressed.resize(produced);
  write_file_atomic(path, compressed);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error(ErrorCode::kInvalidArgument, "CSV row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  return out.str();
}

std::string plot_script(const std::string& stem, const std::vector<PlotSeries>& series) {
  std::ostringstream out;
  out << "# gnuplot script; run with: gnuplot " << stem << ".gp\n";
  out << "set datafile separator ','\n";
  out << "set terminal pngcairo size 900,600\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    out << "set output '" << stem << "-" << i << ".png'\n";
    out << (s.log_y ? "set logscale y\n" : "unset logscale y\n");
    out << "set title '" << s.title << "'\n";
    out << "plot '" << s.csv_file << "' every ::1 using " << s.x_column << ":" << s.y_column
        << " with linespoints title '" << s.title << "'\n";
  }
  return out.str();
}

}  // namespace cycle_census
