#pragma once

#include <span>

#include <Eigen/Core>

#include "garner/types.hpp"

namespace garner {

// Row-major so that a node's feature row is contiguous and CSR row
// accumulation streams memory in order.
using DenseMatrix =
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

inline void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw StructureError(std::string(what) + " contains a non-finite value");
  }
}

// out.row(i) = in.row(ids[i]); ids may repeat and may be a subset.
inline DenseMatrix gather_rows(const DenseMatrix& in,
                               std::span<const Index> ids) {
  DenseMatrix out(static_cast<Index>(ids.size()), in.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    const Index src = ids[static_cast<std::size_t>(i)];
    if (src < 0 || src >= in.rows()) {
      throw InvalidArgument("row id out of range");
    }
    out.row(i) = in.row(src);
  }
  return out;
}

// gather_rows restricted to a full permutation of [0, rows).
inline DenseMatrix permute_rows(const DenseMatrix& in,
                                std::span<const Index> perm) {
  if (static_cast<Index>(perm.size()) != in.rows()) {
    throw DimensionError("permutation length does not match row count");
  }
  return gather_rows(in, perm);
}

}  // namespace garner
