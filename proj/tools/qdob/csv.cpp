#include "csv.hpp"

namespace qdob::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path) {
  file_ = std::fopen(path.string().c_str(), "wb");
  if (!file_) {
    throw config_error("csv: cannot open '" + path.string() +
                       "' for writing");
  }
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::header(const std::vector<std::string>& names) {
  begin_row();
  for (const auto& n : names) field(n);
  end_row();
}

void CsvWriter::begin_row() { first_in_row_ = true; }

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long long v) { field(std::to_string(v)); }

void CsvWriter::field(const std::string& v) {
  if (!first_in_row_) std::fputc(',', file_);
  std::fputs(v.c_str(), file_);
  first_in_row_ = false;
}

void CsvWriter::end_row() { std::fputc('\n', file_); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qdob::cli
