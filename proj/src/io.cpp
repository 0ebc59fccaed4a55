// Copyright 2026 The convlearn Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "convlearn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "convlearn/errors.hpp"

namespace convlearn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw ArgumentError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const AuditHeader& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (const auto& [key, value] : header) text += "# " + key + " = " + value + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) text += (i ? "," : "") + columns[i];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text += format_double(row[i]);
    }
    text += "\n";
  }
  write_text(path, text);
}

void write_trajectory_csv(const std::filesystem::path& path, const AuditHeader& header,
                          const Trajectory& trajectory) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trajectory.size());
  for (const TrajectoryRecord& r : trajectory) {
    rows.push_back({static_cast<double>(r.iter), r.loss_estimate, r.norm_w, r.norm_a,
                    r.dist_plus, r.dist_minus});
  }
  write_csv(path, header,
            {"iter", "loss_estimate", "norm_w", "norm_a", "dist_plus", "dist_minus"}, rows);
}

}  // namespace convlearn
