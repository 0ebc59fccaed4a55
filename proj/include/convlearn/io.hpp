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

// Text output helpers. Numbers are written with 17 significant digits and a
// '.' decimal separator regardless of locale.

#ifndef CONVLEARN_IO_HPP_
#define CONVLEARN_IO_HPP_

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "convlearn/trajectory.hpp"

namespace convlearn {

using AuditHeader = std::vector<std::pair<std::string, std::string>>;

std::string format_double(double v);

// "# key = value" lines, then `columns`, then one row per entry of `rows`.
void write_csv(const std::filesystem::path& path, const AuditHeader& header,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_trajectory_csv(const std::filesystem::path& path, const AuditHeader& header,
                          const Trajectory& trajectory);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string read_text(const std::filesystem::path& path);

}  // namespace convlearn

#endif  // CONVLEARN_IO_HPP_
