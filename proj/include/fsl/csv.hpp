#pragma once

// Deterministic CSV / key-value emission.  All numbers go through the
// same %.17g formatting so a rerun with identical inputs is
// byte-identical.

#include <fstream>
#include <string>
#include <vector>

namespace fsl::csv {

// Shortest round-trippable decimal form (17 significant digits).
std::string num(double v);

class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  // Mixed rows (e.g. a leading name column).
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::string path_;
  size_t cols_;
};

// key=value lines, one per entry, in the given order.
void write_kv(const std::string& path,
              const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace fsl::csv
