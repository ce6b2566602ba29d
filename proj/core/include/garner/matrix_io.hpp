#pragma once

#include <filesystem>

#include "garner/dense.hpp"

namespace garner {

// Binary matrix file: magic "GRNM", u32 rows, u32 cols, then rows*cols
// little-endian f32 values in row-major order. Compact and fast for
// n ~ 1e5; values round through single precision.
void save_matrix_grnm(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix_grnm(const std::filesystem::path& path);

// Text matrix file: header line "rows,cols", then one comma-separated
// line per row. Written with 17 significant digits so doubles survive
// a round trip exactly.
void save_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix_csv(const std::filesystem::path& path);

// Dispatch on the ".grnm" / ".csv" extension.
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix(const std::filesystem::path& path);

// Load "<stem>.grnm" if present, else "<stem>.csv"; error when neither
// exists.
DenseMatrix load_matrix_either(const std::filesystem::path& stem);

}  // namespace garner
