#pragma once

#include <filesystem>

#include "exsis/model_core.hpp"

namespace exsis {

// Two on-disk formats, chosen by extension:
//   *.csv  rows are observations; a non-numeric first line is treated as a
//          header and skipped.
//   *.bin  8-byte header (u32 n, u32 p, little endian) followed by n*p
//          float64 values in column-major order.
Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& m);

// A vector is a single-column matrix in either format.
Vector load_vector(const std::filesystem::path& path);
void save_vector(const std::filesystem::path& path, const Vector& v);

}  // namespace exsis
