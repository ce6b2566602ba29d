#pragma once

#include <vector>

#include "garner/dense.hpp"
#include "garner/sparse_graph.hpp"

namespace garner {

// Eigenvalues of the combinatorial Laplacian, ascending. Dense solve;
// guarded to n <= 2000 nodes.
std::vector<Real> laplacian_eigenvalues(const SparseGraph& g);

struct CertificateReport {
  bool pass = false;
  // Smallest and largest Laplacian eigenvalue above the zero mode.
  Real lambda_min = 0.0;
  Real lambda_max = 0.0;
  // Two-sided target band [d - 2*sqrt(d-1), d + 2*sqrt(d-1)].
  Real band_lo = 0.0;
  Real band_hi = 0.0;
};

// Checks that every nonzero Laplacian eigenvalue of a d-regular graph
// lies inside the band above. A disconnected graph fails automatically:
// its second eigenvalue is zero, far below the lower edge.
CertificateReport certify_regular_spectrum(const SparseGraph& g, Index d);

}  // namespace garner
