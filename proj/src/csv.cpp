#include "fsl/csv.hpp"

#include <cstdio>

#include "fsl/errors.hpp"

namespace fsl::csv {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), cols_(header.size()) {
  require_input(out_.good(), "csv: cannot open " + path + " for writing");
  require_input(cols_ >= 1, "csv: header must be nonempty");
  for (size_t i = 0; i < cols_; ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void Writer::row(const std::vector<double>& values) {
  require_input(values.size() == cols_,
                "csv: row width mismatch in " + path_);
  for (size_t i = 0; i < cols_; ++i) {
    if (i) out_ << ',';
    out_ << num(values[i]);
  }
  out_ << '\n';
}

void Writer::raw_row(const std::vector<std::string>& cells) {
  require_input(cells.size() == cols_,
                "csv: row width mismatch in " + path_);
  for (size_t i = 0; i < cols_; ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  require_input(out.good(), "report: cannot open " + path + " for writing");
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

}  // namespace fsl::csv
