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

#include "dpamimo/matrix_file.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace dpamimo::io {

namespace {
constexpr const char* kMagic = "dpamimo-matrix-file";
}

const cmat& MatrixFile::matrix(const std::string& name) const {
  auto it = matrices.find(name);
  if (it == matrices.end()) throw IoError("matrix file: missing matrix '" + name + "'");
  return it->second;
}

const std::string& MatrixFile::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw IoError("matrix file: missing param '" + name + "'");
  return it->second;
}

void write_matrix_file(const MatrixFile& file, std::ostream& out) {
  out << kMagic << " 1\n";
  if (!file.kind.empty()) out << "kind " << file.kind << '\n';
  for (const auto& [name, value] : file.params) out << "param " << name << ' ' << value << '\n';
  out << std::setprecision(17);
  for (const auto& [name, m] : file.matrices) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (j) out << ' ';
        out << m(i, j).real() << ' ' << m(i, j).imag();
      }
      out << '\n';
    }
  }
  out << "end\n";
}

void write_matrix_file(const MatrixFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_matrix_file(file, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MatrixFile read_matrix_file(std::istream& in) {
  MatrixFile file;
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic || version != 1)
    throw IoError("matrix file: bad header");
  std::string tag;
  while (in >> tag) {
    if (tag == "end") return file;
    if (tag == "kind") {
      in >> file.kind;
    } else if (tag == "param") {
      std::string name, value;
      in >> name;
      std::getline(in >> std::ws, value);
      file.params[name] = value;
    } else if (tag == "matrix") {
      std::string name;
      Index rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0)
        throw IoError("matrix file: bad matrix header");
      cmat m(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
          double re = 0, im = 0;
          if (!(in >> re >> im)) throw IoError("matrix file: truncated matrix '" + name + "'");
          m(i, j) = {re, im};
        }
      file.matrices[name] = std::move(m);
    } else {
      throw IoError("matrix file: unknown record '" + tag + "'");
    }
  }
  throw IoError("matrix file: missing 'end'");
}

MatrixFile read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_matrix_file(in);
}

}  // namespace dpamimo::io
