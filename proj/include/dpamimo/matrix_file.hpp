// Copyright 2026 The dpamimo Authors
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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>

#include "dpamimo/common.hpp"

namespace dpamimo::io {

/// Plain-text container for named parameters and complex matrices.
///
///   dpamimo-matrix-file 1
///   param <name> <value>
///   matrix <name> <rows> <cols>
///   <re> <im> <re> <im> ...        one line per row, row-major
///   end
///
/// Values are written with 17 significant digits so files round-trip exactly.
struct MatrixFile {
  std::string kind;  // free-form tag, e.g. "pilot-plan" or "channel"
  std::map<std::string, std::string> params;
  std::map<std::string, cmat> matrices;

  const cmat& matrix(const std::string& name) const;
  const std::string& param(const std::string& name) const;
};

void write_matrix_file(const MatrixFile& file, std::ostream& out);
void write_matrix_file(const MatrixFile& file, const std::filesystem::path& path);

MatrixFile read_matrix_file(std::istream& in);
MatrixFile read_matrix_file(const std::filesystem::path& path);

}  // namespace dpamimo::io
