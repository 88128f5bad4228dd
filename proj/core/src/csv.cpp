#include "driftlab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace driftlab {

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 == header.size() ? '\n' : ',');
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf << (i + 1 == row.size() ? '\n' : ',');
    }
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      bool numeric = true;
      std::vector<double> vals;
      for (const auto& c : cells) {
        try {
          std::size_t used = 0;
          vals.push_back(std::stod(c, &used));
          if (used != c.size()) numeric = false;
        } catch (...) {
          numeric = false;
        }
        if (!numeric) break;
      }
      if (numeric) {
        for (std::size_t i = 0; i < cells.size(); ++i)
          t.header.push_back("c" + std::to_string(i));
        t.rows.push_back(vals);
      } else {
        t.header = cells;
      }
      continue;
    }
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (const auto& c : cells) vals.push_back(std::stod(c));
    if (!t.header.empty() && vals.size() != t.header.size())
      throw std::runtime_error("ragged CSV row in " + path);
    t.rows.push_back(std::move(vals));
  }
  return t;
}

}  // namespace driftlab
