#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace garner::oracle {
namespace {

void require_square(const Dense& m) {
  if (m.rows != m.cols) throw DimensionError("oracle: matrix must be square");
}

}  // namespace

Dense from_graph(const SparseGraph& g) {
  Dense out(g.num_nodes(), g.num_nodes());
  for (Index i = 0; i < g.num_nodes(); ++i) {
    auto cols = g.neighbors(i);
    auto vals = g.edge_weights(i);
    for (std::size_t k = 0; k < cols.size(); ++k) out.at(i, cols[k]) = vals[k];
  }
  return out;
}

Dense identity(Index n) {
  Dense out(n, n);
  for (Index i = 0; i < n; ++i) out.at(i, i) = 1.0;
  return out;
}

Dense transpose(const Dense& m) {
  Dense out(m.cols, m.rows);
  for (Index i = 0; i < m.rows; ++i)
    for (Index j = 0; j < m.cols; ++j) out.at(j, i) = m.at(i, j);
  return out;
}

Dense matmul(const Dense& a, const Dense& b) {
  if (a.cols != b.rows) throw DimensionError("oracle: matmul shape mismatch");
  Dense out(a.rows, b.cols);
  for (Index i = 0; i < a.rows; ++i) {
    for (Index k = 0; k < a.cols; ++k) {
      const Real aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

Dense add(const Dense& a, const Dense& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw DimensionError("oracle: add shape mismatch");
  }
  Dense out = a;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += b.a[i];
  return out;
}

Dense scale(Dense m, Real s) {
  for (Real& v : m.a) v *= s;
  return m;
}

Dense matpow(const Dense& m, int k) {
  require_square(m);
  if (k < 0) throw InvalidArgument("oracle: negative matrix power");
  Dense out = identity(m.rows);
  for (int t = 0; t < k; ++t) out = matmul(out, m);
  return out;
}

Dense sym_normalize(const Dense& adj, bool add_loops, bool loop_in_scaling) {
  require_square(adj);
  const Index n = adj.rows;
  std::vector<Real> inv_sqrt(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Real deg = loop_in_scaling ? 1.0 : 0.0;
    for (Index j = 0; j < n; ++j) deg += adj.at(i, j);
    inv_sqrt[static_cast<std::size_t>(i)] =
        deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Dense out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Real w = adj.at(i, j);
      if (add_loops && i == j) w += 1.0;
      out.at(i, j) = w * inv_sqrt[static_cast<std::size_t>(i)] *
                     inv_sqrt[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

Dense laplacian(const Dense& adj) {
  require_square(adj);
  const Index n = adj.rows;
  Dense out(n, n);
  for (Index i = 0; i < n; ++i) {
    Real deg = 0.0;
    for (Index j = 0; j < n; ++j) deg += adj.at(i, j);
    for (Index j = 0; j < n; ++j) out.at(i, j) = -adj.at(i, j);
    out.at(i, i) = deg - adj.at(i, i);
  }
  return out;
}

Real trace_quadratic(const Dense& z, const Dense& m) {
  require_square(m);
  if (z.rows != m.rows) {
    throw DimensionError("oracle: trace_quadratic shape mismatch");
  }
  // tr(Z^T M Z) = sum_ij M_ij <Z_i, Z_j>
  Real acc = 0.0;
  for (Index i = 0; i < m.rows; ++i) {
    for (Index j = 0; j < m.cols; ++j) {
      const Real mij = m.at(i, j);
      if (mij == 0.0) continue;
      Real dot = 0.0;
      for (Index c = 0; c < z.cols; ++c) dot += z.at(i, c) * z.at(j, c);
      acc += mij * dot;
    }
  }
  return acc;
}

Dense inverse(Dense m) {
  require_square(m);
  const Index n = m.rows;
  Dense inv = identity(n);
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r) {
      if (std::abs(m.at(r, col)) > std::abs(m.at(pivot, col))) pivot = r;
    }
    if (std::abs(m.at(pivot, col)) < 1e-300) {
      throw Error("oracle: singular matrix");
    }
    if (pivot != col) {
      for (Index j = 0; j < n; ++j) {
        std::swap(m.at(pivot, j), m.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    const Real scale = 1.0 / m.at(col, col);
    for (Index j = 0; j < n; ++j) {
      m.at(col, j) *= scale;
      inv.at(col, j) *= scale;
    }
    for (Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const Real f = m.at(r, col);
      if (f == 0.0) continue;
      for (Index j = 0; j < n; ++j) {
        m.at(r, j) -= f * m.at(col, j);
        inv.at(r, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

Dense ppr_inverse(const Dense& adj, Real alpha) {
  const Dense m = sym_normalize(adj, /*add_loops=*/false);
  Dense system = identity(adj.rows);
  for (Index i = 0; i < adj.rows; ++i) {
    for (Index j = 0; j < adj.cols; ++j) {
      system.at(i, j) -= (1.0 - alpha) * m.at(i, j);
    }
  }
  return scale(inverse(std::move(system)), alpha);
}

Dense dense_sgc(const Dense& adj, const Dense& h, const Dense& theta, int k) {
  if (adj.rows > 500) {
    throw InvalidArgument("oracle: dense_sgc capped at n <= 500");
  }
  const Dense s_hat = sym_normalize(adj, /*add_loops=*/true);
  return matmul(matmul(matpow(s_hat, k), h), theta);
}

std::vector<Real> sym_eigenvalues(Dense m) {
  require_square(m);
  const Index n = m.rows;
  if (n == 0) return {};

  Real diag_scale = 0.0;
  for (Index i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(m.at(i, i)));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      diag_scale = std::max(diag_scale, std::abs(m.at(i, j)));
  const Real tol = 1e-12 * std::max(1.0, diag_scale);

  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += m.at(p, q) * m.at(p, q);
    if (std::sqrt(off) <= tol) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Real apq = m.at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const Real theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        const Real t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const Real c = 1.0 / std::sqrt(1.0 + t * t);
        const Real s = t * c;
        for (Index k = 0; k < n; ++k) {
          const Real akp = m.at(k, p);
          const Real akq = m.at(k, q);
          m.at(k, p) = c * akp - s * akq;
          m.at(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const Real apk = m.at(p, k);
          const Real aqk = m.at(q, k);
          m.at(p, k) = c * apk - s * aqk;
          m.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<Real> ev(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = m.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<Real> dense_eigenvalues(const SparseGraph& g) {
  if (g.num_nodes() > 2000) {
    throw InvalidArgument("oracle: dense_eigenvalues capped at n <= 2000");
  }
  return sym_eigenvalues(laplacian(from_graph(g)));
}

Real brute_force_sparsest_cut(const SparseGraph& g) {
  const Index n = g.num_nodes();
  if (n < 2 || n > 16) {
    throw InvalidArgument("sparsest cut enumeration requires 2 <= n <= 16");
  }
  const Dense adj = from_graph(g);
  Real best = std::numeric_limits<Real>::infinity();
  const std::uint32_t limit = 1u << static_cast<std::uint32_t>(n - 1);
  // Fixing node n-1 outside S halves the enumeration; every proper
  // nonempty subset or its complement is still visited.
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    Real cut = 0.0;
    int size = 0;
    for (Index i = 0; i < n; ++i) {
      const bool in_i = (mask >> i) & 1u;
      if (in_i) ++size;
      for (Index j = 0; j < n; ++j) {
        const bool in_j = (mask >> j) & 1u;
        if (in_i && !in_j) cut += adj.at(i, j);
      }
    }
    const Real denom = static_cast<Real>(size) * static_cast<Real>(n - size);
    best = std::min(best, cut / denom);
  }
  return best;
}

Real min_indicator_ratio(const SparseGraph& g) {
  const Index n = g.num_nodes();
  if (n < 2 || n > 12) {
    throw InvalidArgument("indicator enumeration requires 2 <= n <= 12");
  }
  const Dense lap = laplacian(from_graph(g));
  Dense complete(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) complete.at(i, j) = (i == j) ? 0.0 : 1.0;
  const Dense lap_complete = laplacian(complete);

  Real best = std::numeric_limits<Real>::infinity();
  const std::uint32_t limit = 1u << static_cast<std::uint32_t>(n);
  for (std::uint32_t mask = 1; mask + 1 < limit; ++mask) {
    Dense x(n, 1);
    for (Index i = 0; i < n; ++i) x.at(i, 0) = (mask >> i) & 1u ? 1.0 : 0.0;
    const Real num = trace_quadratic(x, lap);
    const Real den = trace_quadratic(x, lap_complete);
    best = std::min(best, num / den);
  }
  return best;
}

}  // namespace garner::oracle
