#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ipman/matrix.hpp"

namespace ipman {

struct Table {
  std::vector<std::string> header;
  Matrix2 values;
};

// One row per point, numbers printed with round-trip precision so a re-read
// reproduces every value bit for bit.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix2& values);
Table read_csv(const std::filesystem::path& path);

// Round-trip formatting used by every numeric text artifact.
std::string format_double(double v);

}  // namespace ipman
