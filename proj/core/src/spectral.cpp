#include "garner/spectral.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "garner/graph_ops.hpp"

namespace garner {

namespace {
constexpr Index kMaxDenseNodes = 2000;
}  // namespace

std::vector<Real> laplacian_eigenvalues(const SparseGraph& g) {
  const Index n = g.num_nodes();
  if (n > kMaxDenseNodes) {
    throw InvalidArgument("dense eigenvalue solve is limited to " +
                          std::to_string(kMaxDenseNodes) + " nodes");
  }
  const SparseGraph lap = laplacian(g);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    auto cols = lap.neighbors(i);
    auto vals = lap.edge_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      dense(i, cols[k]) = vals[k];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("eigenvalue solve did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return std::vector<Real>(ev.data(), ev.data() + ev.size());
}

CertificateReport certify_regular_spectrum(const SparseGraph& g, Index d) {
  const Index n = g.num_nodes();
  if (d < 1 || d >= n) {
    throw InvalidArgument("regular degree must satisfy 1 <= d < n");
  }
  const std::vector<Real> deg = g.degrees();
  for (Real v : deg) {
    if (v != static_cast<Real>(d)) {
      throw StructureError("graph is not d-regular");
    }
  }

  const std::vector<Real> ev = laplacian_eigenvalues(g);
  const Real spread = 2.0 * std::sqrt(static_cast<Real>(d - 1));
  CertificateReport report;
  report.band_lo = static_cast<Real>(d) - spread;
  report.band_hi = static_cast<Real>(d) + spread;
  // ev[0] is the zero mode of the (connected) graph; everything above
  // it must sit inside the band. Slack absorbs eigensolver round-off.
  report.lambda_min = ev[1];
  report.lambda_max = ev.back();
  const Real slack = 1e-8 * static_cast<Real>(d);
  report.pass = ev[1] >= report.band_lo - slack &&
                ev.back() <= report.band_hi + slack &&
                std::abs(ev[0]) <= slack;
  return report;
}

}  // namespace garner
