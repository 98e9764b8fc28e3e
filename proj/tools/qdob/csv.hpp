#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qdob/errors.hpp"

namespace qdob::cli {

/// Row-oriented CSV writer. Floats are printed with 17 significant digits
/// so a round trip re-parses to the identical bits; the decimal separator
/// is always '.'.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& names);
  void begin_row();
  void field(double v);
  void field(long long v);
  void field(const std::string& v);
  void end_row();

 private:
  std::FILE* file_ = nullptr;
  bool first_in_row_ = true;
};

std::string format_double(double v);

}  // namespace qdob::cli
