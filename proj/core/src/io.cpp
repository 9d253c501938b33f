// SPDX-License-Identifier: Apache-2.0
#include "kppvar/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kppvar/errors.hpp"

namespace kppvar::io {

std::string format_value(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParameterError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw ParameterError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               std::span<const std::vector<double>> rows) {
  std::string content = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) content += ',';
      content += format_value(row[j]);
    }
    content += '\n';
  }
  write_text_file(path, content);
}

void write_shear_csv(const std::filesystem::path& path, const ShearPath& shear) {
  std::vector<std::vector<double>> rows;
  rows.reserve(shear.values.size());
  for (int i = 0; i < shear.grid.nodes; ++i)
    rows.push_back({shear.grid.node(i), shear.values[i]});
  write_csv(path, "y,b", rows);
}

void write_trajectory_csv(const std::filesystem::path& path, const FrontTrajectory& trajectory) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trajectory.times.size());
  for (std::size_t i = 0; i < trajectory.times.size(); ++i)
    rows.push_back({trajectory.times[i], trajectory.positions[i]});
  write_csv(path, "t,x_f", rows);
}

}  // namespace kppvar::io
