#include "garner/objective.hpp"

#include <cmath>
#include <utility>

#include "garner/dataset.hpp"
#include "garner/graph_ops.hpp"

namespace garner {

Real stable_softplus(Real x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

Real stable_sigmoid(Real x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const Real e = std::exp(x);
  return e / (1.0 + e);
}

Real disc_score(const Vector& a, const Vector& b, const DenseMatrix& w) {
  if (a.size() != w.rows() || b.size() != w.cols()) {
    throw DimensionError("discriminator shapes do not match");
  }
  return a.dot(w * b);
}

Real discriminate(const Vector& a, const Vector& b, const DenseMatrix& w) {
  return stable_sigmoid(disc_score(a, b, w));
}

Real jsd_mi(const EmbeddingMatrix& z_pos, const Vector& z_g,
            const EmbeddingMatrix& z_neg, const DenseMatrix& w) {
  if (z_pos.rows() != z_neg.rows()) {
    throw DimensionError("positive and negative embeddings differ in rows");
  }
  if (z_pos.cols() != w.rows() || z_g.size() != w.cols() ||
      z_neg.cols() != w.rows()) {
    throw DimensionError("embedding width does not match discriminator");
  }
  const Index n = z_pos.rows();
  if (n == 0) throw DimensionError("empty embedding matrix");
  const Vector wb = w * z_g;
  const Vector p = z_pos * wb;
  const Vector q = z_neg * wb;
  // log sigma(p) = -softplus(-p); log(1 - sigma(q)) = -softplus(q).
  Real acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    acc -= stable_softplus(-p(i)) + stable_softplus(q(i));
  }
  return acc / static_cast<Real>(n);
}

Real loss_l1(const EmbeddingMatrix& z0, const EmbeddingMatrix& z1,
             const EmbeddingMatrix& z0_shuf_neg,
             const EmbeddingMatrix& z1_spec_neg, const DenseMatrix& w1) {
  return -(jsd_mi(z0, mean_pool(z1), z0_shuf_neg, w1) +
           jsd_mi(z1, mean_pool(z0), z1_spec_neg, w1));
}

Real loss_l2(const EmbeddingMatrix& z0, const EmbeddingMatrix& z2,
             const EmbeddingMatrix& z0_shuf_neg,
             const EmbeddingMatrix& z2_shuf_neg, const DenseMatrix& w2) {
  return -(jsd_mi(z0, mean_pool(z2), z0_shuf_neg, w2) +
           jsd_mi(z2, mean_pool(z0), z2_shuf_neg, w2));
}

ParamGradients ParamGradients::zeros_like(const ModelParams& params) {
  ParamGradients g;
  g.w_c = DenseMatrix::Zero(params.w_c.rows(), params.w_c.cols());
  g.w_x = DenseMatrix::Zero(params.w_x.rows(), params.w_x.cols());
  g.theta0 = DenseMatrix::Zero(params.theta0.rows(), params.theta0.cols());
  g.theta1 = DenseMatrix::Zero(params.theta1.rows(), params.theta1.cols());
  g.theta2 = DenseMatrix::Zero(params.theta2.rows(), params.theta2.cols());
  g.w_disc1 = DenseMatrix::Zero(params.w_disc1.rows(), params.w_disc1.cols());
  g.w_disc2 = DenseMatrix::Zero(params.w_disc2.rows(), params.w_disc2.cols());
  return g;
}

namespace {

// One MI term T = -mean_i[log sigma(p_i)] - mean_i[log(1 - sigma(q_i))]
// with p = A(Wb), q = Cn(Wb). Returns the MI value and accumulates
// dT/dA, dT/dCn, dT/db, dT/dW into the given buffers.
Real mi_term_with_grads(const DenseMatrix& a, const Vector& b,
                        const DenseMatrix& cn, const DenseMatrix& w,
                        DenseMatrix& da, DenseMatrix& dcn, Vector& db,
                        DenseMatrix& dw) {
  const Index n = a.rows();
  const Real inv_n = 1.0 / static_cast<Real>(n);
  const Vector wb = w * b;
  const Vector p = a * wb;
  const Vector q = cn * wb;

  Real acc = 0.0;
  Vector u(n);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    acc -= stable_softplus(-p(i)) + stable_softplus(q(i));
    u(i) = (stable_sigmoid(p(i)) - 1.0) * inv_n;
    v(i) = stable_sigmoid(q(i)) * inv_n;
  }

  da.noalias() += u * wb.transpose();
  dcn.noalias() += v * wb.transpose();
  const Vector dwb = a.transpose() * u + cn.transpose() * v;
  dw.noalias() += dwb * b.transpose();
  db.noalias() += w.transpose() * dwb;
  return acc * inv_n;
}

struct ForwardState {
  SparseGraph s0, s1, s2, nneg;
  DenseMatrix h, hs;
  DenseMatrix p0, p1, p2;     // S_v^K H
  DenseMatrix p0s, p1s, p2s;  // S_v^K Hs (only the used ones)
  DenseMatrix pn;             // N H
  EmbeddingMatrix z0, z1, z2, z0s, z2s, z1n, z0n2, z2n2;
  Vector s_z0, s_z1, s_z2;
};

}  // namespace

std::pair<LossBreakdown, ParamGradients> loss_and_gradients(
    const ViewSet& views, const DenseMatrix& c, const DenseMatrix& x,
    const ModelParams& params, std::span<const Index> shuffle,
    const ObjectiveConfig& cfg) {
  views.validate();
  params.validate();
  const Index n = views.num_nodes();
  if (c.rows() != n || x.rows() != n) {
    throw DimensionError("input rows do not match the view node count");
  }
  if (cfg.propagation_depth < 0) {
    throw InvalidArgument("propagation depth must be non-negative");
  }
  const int depth = cfg.propagation_depth;
  const bool spec1 = cfg.use_spectral_negative;
  const bool spec2 = cfg.l2_spectral_negative;

  ForwardState fs;
  fs.s0 = normalize_adjacency(views.g0);
  fs.s2 = normalize_adjacency(views.g2);
  if (cfg.use_config_view) fs.s1 = normalize_adjacency(views.g1);
  if ((cfg.use_config_view && spec1) || spec2) {
    fs.nneg = normalize_plain(views.gneg);
  }

  fs.h = project_inputs(c, x, params.w_c, params.w_x);
  fs.hs = permute_rows(fs.h, shuffle);

  fs.p0 = spmm_power(fs.s0, fs.h, depth);
  fs.p2 = spmm_power(fs.s2, fs.h, depth);
  fs.z0.noalias() = fs.p0 * params.theta0;
  fs.z2.noalias() = fs.p2 * params.theta2;
  fs.s_z0 = mean_pool(fs.z0);
  fs.s_z2 = mean_pool(fs.z2);

  if (spec2) {
    if (fs.pn.size() == 0) fs.pn = spmm(fs.nneg, fs.h);
    fs.z0n2.noalias() = fs.pn * params.theta0;
    fs.z2n2.noalias() = fs.pn * params.theta2;
  } else {
    fs.p0s = spmm_power(fs.s0, fs.hs, depth);
    fs.p2s = spmm_power(fs.s2, fs.hs, depth);
    fs.z0s.noalias() = fs.p0s * params.theta0;
    fs.z2s.noalias() = fs.p2s * params.theta2;
  }

  if (cfg.use_config_view) {
    fs.p1 = spmm_power(fs.s1, fs.h, depth);
    fs.z1.noalias() = fs.p1 * params.theta1;
    fs.s_z1 = mean_pool(fs.z1);
    if (spec1) {
      if (fs.pn.size() == 0) fs.pn = spmm(fs.nneg, fs.h);
      fs.z1n.noalias() = fs.pn * params.theta1;
    } else {
      fs.p1s = spmm_power(fs.s1, fs.hs, depth);
      fs.z1n.noalias() = fs.p1s * params.theta1;
    }
    if (spec2 && fs.p0s.size() == 0) {
      // L1's view-0 negative always shuffles; build it even when L2
      // went spectral.
      fs.p0s = spmm_power(fs.s0, fs.hs, depth);
      fs.z0s.noalias() = fs.p0s * params.theta0;
    }
  }

  ParamGradients grads = ParamGradients::zeros_like(params);
  const Index f = params.f();
  DenseMatrix dz0 = DenseMatrix::Zero(n, f);
  DenseMatrix dz1 = DenseMatrix::Zero(n, f);
  DenseMatrix dz2 = DenseMatrix::Zero(n, f);
  DenseMatrix dz0s = DenseMatrix::Zero(n, f);
  DenseMatrix dz2s = DenseMatrix::Zero(n, f);
  DenseMatrix dz1n = DenseMatrix::Zero(n, f);
  DenseMatrix dz0n2 = DenseMatrix::Zero(n, f);
  DenseMatrix dz2n2 = DenseMatrix::Zero(n, f);
  Vector ds0 = Vector::Zero(f);
  Vector ds1 = Vector::Zero(f);
  Vector ds2 = Vector::Zero(f);

  LossBreakdown loss;
  if (cfg.use_config_view) {
    loss.mi01 = mi_term_with_grads(fs.z0, fs.s_z1, fs.z0s, params.w_disc1,
                                   dz0, dz0s, ds1, grads.w_disc1);
    loss.mi10 = mi_term_with_grads(fs.z1, fs.s_z0, fs.z1n, params.w_disc1,
                                   dz1, dz1n, ds0, grads.w_disc1);
    loss.l1 = -(loss.mi01 + loss.mi10);
  }
  {
    DenseMatrix& neg0 = spec2 ? fs.z0n2 : fs.z0s;
    DenseMatrix& dneg0 = spec2 ? dz0n2 : dz0s;
    DenseMatrix& neg2 = spec2 ? fs.z2n2 : fs.z2s;
    DenseMatrix& dneg2 = spec2 ? dz2n2 : dz2s;
    loss.mi02 = mi_term_with_grads(fs.z0, fs.s_z2, neg0, params.w_disc2,
                                   dz0, dneg0, ds2, grads.w_disc2);
    loss.mi20 = mi_term_with_grads(fs.z2, fs.s_z0, neg2, params.w_disc2,
                                   dz2, dneg2, ds0, grads.w_disc2);
    loss.l2 = -(loss.mi02 + loss.mi20);
  }
  loss.total = loss.l1 + loss.l2;

  // Summary gradients spread evenly over their source rows.
  const Real inv_n = 1.0 / static_cast<Real>(n);
  dz0.rowwise() += (inv_n * ds0).transpose();
  dz2.rowwise() += (inv_n * ds2).transpose();
  if (cfg.use_config_view) dz1.rowwise() += (inv_n * ds1).transpose();

  // Propagation weights: dTheta_v = (M_v H)^T dZ_v summed over every
  // path that uses Theta_v.
  grads.theta0.noalias() += fs.p0.transpose() * dz0;
  grads.theta2.noalias() += fs.p2.transpose() * dz2;
  if (fs.p0s.size() != 0) grads.theta0.noalias() += fs.p0s.transpose() * dz0s;
  if (!spec2) grads.theta2.noalias() += fs.p2s.transpose() * dz2s;
  if (spec2) {
    grads.theta0.noalias() += fs.pn.transpose() * dz0n2;
    grads.theta2.noalias() += fs.pn.transpose() * dz2n2;
  }
  if (cfg.use_config_view) {
    grads.theta1.noalias() += fs.p1.transpose() * dz1;
    if (spec1) {
      grads.theta1.noalias() += fs.pn.transpose() * dz1n;
    } else {
      grads.theta1.noalias() += fs.p1s.transpose() * dz1n;
    }
  }

  // Input gradients. M_v is symmetric, so dH += M_v^K (dZ Theta^T).
  DenseMatrix gh = spmm_power(fs.s0, dz0 * params.theta0.transpose(), depth);
  gh += spmm_power(fs.s2, dz2 * params.theta2.transpose(), depth);
  DenseMatrix ghs = DenseMatrix::Zero(n, fs.h.cols());
  if (fs.p0s.size() != 0) {
    ghs += spmm_power(fs.s0, dz0s * params.theta0.transpose(), depth);
  }
  if (!spec2) {
    ghs += spmm_power(fs.s2, dz2s * params.theta2.transpose(), depth);
  }
  if (spec2) {
    gh += spmm(fs.nneg, dz0n2 * params.theta0.transpose());
    gh += spmm(fs.nneg, dz2n2 * params.theta2.transpose());
  }
  if (cfg.use_config_view) {
    gh += spmm_power(fs.s1, dz1 * params.theta1.transpose(), depth);
    if (spec1) {
      gh += spmm(fs.nneg, dz1n * params.theta1.transpose());
    } else {
      ghs += spmm_power(fs.s1, dz1n * params.theta1.transpose(), depth);
    }
  }
  // Hs rows came from H rows via the permutation; scatter back.
  for (Index i = 0; i < n; ++i) {
    gh.row(shuffle[static_cast<std::size_t>(i)]) += ghs.row(i);
  }

  const Index p_dim = params.p();
  grads.w_c.noalias() = c.transpose() * gh.leftCols(p_dim);
  grads.w_x.noalias() = x.transpose() * gh.rightCols(p_dim);

  return {loss, std::move(grads)};
}

LossBreakdown loss_only(const ViewSet& views, const DenseMatrix& c,
                        const DenseMatrix& x, const ModelParams& params,
                        std::span<const Index> shuffle,
                        const ObjectiveConfig& cfg) {
  return loss_and_gradients(views, c, x, params, shuffle, cfg).first;
}

}  // namespace garner
