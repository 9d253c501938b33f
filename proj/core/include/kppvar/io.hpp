// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kppvar/pde.hpp"
#include "kppvar/shear.hpp"

namespace kppvar::io {

/// 17 significant digits: round-trip exact for double.
std::string format_value(double value);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Numeric CSV with a header line; every value at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::string& header,
               std::span<const std::vector<double>> rows);

/// Shear realization as `y,b`, one row per node.
void write_shear_csv(const std::filesystem::path& path, const ShearPath& shear);

/// Front trajectory as `t,x_f`.
void write_trajectory_csv(const std::filesystem::path& path, const FrontTrajectory& trajectory);

}  // namespace kppvar::io
