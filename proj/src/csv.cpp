#include "ipman/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "ipman/errors.hpp"

namespace ipman {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix2& values) {
  if (!values.empty() && header.size() != values.cols()) {
    throw ShapeError("csv header width does not match the data");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out << (c ? "," : "") << format_double(values(r, c));
    }
    out << '\n';
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("missing file " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " has no header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
      ++cols;
    }
    if (cols != t.header.size()) {
      throw ShapeError(path.string() + ": row " + std::to_string(rows + 1) + " has the wrong width");
    }
    ++rows;
  }
  t.values = Matrix2(rows, t.header.size(), std::move(data));
  return t;
}

}  // namespace ipman
