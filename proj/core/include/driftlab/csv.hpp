#pragma once

#include <string>
#include <vector>

namespace driftlab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t cols() const { return header.size(); }
  int column_index(const std::string& name) const;  // -1 if absent
};

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// First row is treated as a header when any cell fails numeric parsing.
CsvTable read_csv(const std::string& path);

}  // namespace driftlab
