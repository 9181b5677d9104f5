#pragma once

#include <filesystem>

#include "hmlab/domain.hpp"

namespace hmlab {

// Field snapshot format (.fld): one line of JSON header
//   {"format":"hmlab-fld-v1","kind":"torus","N":64,"tau":[re,im],
//    "value":"scalar"|"matrix","dim":d}
// (patch headers carry "L" instead of "tau"), followed by the raw
// little-endian payload: 64-bit floats interleaved (re, im), row-major nodes,
// row-major d x d blocks for matrix fields.

void save_fld(const std::filesystem::path& path, const ScalarField& f);
void save_fld(const std::filesystem::path& path, const RealField& f);  // zero imaginary part
void save_fld(const std::filesystem::path& path, const MatrixField& f);

struct LoadedField {
  SurfaceDomain dom;
  int dim = 1;
  bool is_matrix = false;
  std::vector<cplx> v;
};

// Throws std::runtime_error naming the offending byte counts or shapes.
LoadedField load_fld(const std::filesystem::path& path);

ScalarField load_scalar_fld(const std::filesystem::path& path);
RealField load_real_fld(const std::filesystem::path& path);  // checks Im = 0
MatrixField load_matrix_fld(const std::filesystem::path& path);

}  // namespace hmlab
