#include "garner/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "garner/graph_ops.hpp"
#include "garner/rng.hpp"

namespace garner {
namespace {

DenseMatrix uniform_init(Index rows, Index cols, std::uint64_t seed,
                         std::uint64_t stream_tag) {
  const Real bound = 1.0 / std::sqrt(static_cast<Real>(rows));
  std::mt19937_64 rng = make_rng(seed, streams::kParamInit, stream_tag);
  std::uniform_real_distribution<Real> dist(-bound, bound);
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

constexpr char kMagic[4] = {'G', 'R', 'N', 'P'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint files are little-endian; add byte swapping to port");

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated checkpoint: " + path.string());
  return v;
}

void write_named_matrix(std::ostream& out, std::string_view name,
                        const DenseMatrix& m) {
  write_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  std::vector<float> row(static_cast<std::size_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = static_cast<float>(m(i, j));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

}  // namespace

ModelParams ModelParams::init(Index c, Index f_in, Index p, Index f,
                              std::uint64_t seed) {
  if (c < 1 || f_in < 1 || p < 1 || f < 1) {
    throw InvalidArgument("model dimensions must be positive");
  }
  ModelParams out;
  out.w_c = uniform_init(c, p, seed, 0);
  out.w_x = uniform_init(f_in, p, seed, 1);
  out.theta0 = uniform_init(2 * p, f, seed, 2);
  out.theta1 = uniform_init(2 * p, f, seed, 3);
  out.theta2 = uniform_init(2 * p, f, seed, 4);
  out.w_disc1 = uniform_init(f, f, seed, 5);
  out.w_disc2 = uniform_init(f, f, seed, 6);
  return out;
}

void ModelParams::validate() const {
  const Index proj = w_c.cols();
  if (w_x.cols() != proj) {
    throw DimensionError("projection widths disagree");
  }
  const Index width = theta0.cols();
  for (const DenseMatrix* theta : {&theta0, &theta1, &theta2}) {
    if (theta->rows() != 2 * proj || theta->cols() != width) {
      throw DimensionError("propagation weight shape mismatch");
    }
  }
  for (const DenseMatrix* w : {&w_disc1, &w_disc2}) {
    if (w->rows() != width || w->cols() != width) {
      throw DimensionError("discriminator must be f x f");
    }
  }
  for (const DenseMatrix* m :
       {&w_c, &w_x, &theta0, &theta1, &theta2, &w_disc1, &w_disc2}) {
    require_finite(*m, "model parameter");
  }
}

EmbeddingMatrix sgc_forward(const SparseGraph& s_hat, const DenseMatrix& h,
                            const DenseMatrix& theta, int k) {
  if (h.cols() != theta.rows()) {
    throw DimensionError("H width does not match Theta rows");
  }
  const DenseMatrix propagated = spmm_power(s_hat, h, k);
  EmbeddingMatrix z(h.rows(), theta.cols());
  z.noalias() = propagated * theta;
  return z;
}

EmbeddingMatrix negative_sgc(const SparseGraph& kneg_hat, const DenseMatrix& h,
                             const DenseMatrix& theta) {
  return sgc_forward(kneg_hat, h, theta, 1);
}

Vector mean_pool(const EmbeddingMatrix& z) {
  if (z.rows() == 0) throw DimensionError("mean_pool of an empty matrix");
  return z.colwise().mean().transpose();
}

void save_checkpoint(const std::filesystem::path& path,
                     const ModelParams& params) {
  params.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::pair<std::string_view, const DenseMatrix*> entries[] = {
      {"w_c", &params.w_c},     {"w_x", &params.w_x},
      {"theta0", &params.theta0}, {"theta1", &params.theta1},
      {"theta2", &params.theta2}, {"w_disc1", &params.w_disc1},
      {"w_disc2", &params.w_disc2}};
  write_u32(out, static_cast<std::uint32_t>(std::size(entries)));
  for (const auto& [name, m] : entries) write_named_matrix(out, name, *m);
  if (!out) throw IoError("write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError("not a GRNP checkpoint: " + path.string());
  }
  const std::uint32_t count = read_u32(in, path);
  ModelParams params;
  bool found[7] = {};
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::uint32_t name_len = read_u32(in, path);
    if (name_len > 256) throw IoError("implausible name length in " + path.string());
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint32_t rows = read_u32(in, path);
    const std::uint32_t cols = read_u32(in, path);
    DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    std::vector<float> row(cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
      if (!in) throw IoError("truncated checkpoint: " + path.string());
      for (std::uint32_t j = 0; j < cols; ++j) {
        m(static_cast<Index>(i), static_cast<Index>(j)) =
            static_cast<Real>(row[j]);
      }
    }
    const std::pair<std::string_view, DenseMatrix*> slots[] = {
        {"w_c", &params.w_c},       {"w_x", &params.w_x},
        {"theta0", &params.theta0}, {"theta1", &params.theta1},
        {"theta2", &params.theta2}, {"w_disc1", &params.w_disc1},
        {"w_disc2", &params.w_disc2}};
    bool known = false;
    for (std::size_t s = 0; s < std::size(slots); ++s) {
      if (slots[s].first == name) {
        *slots[s].second = std::move(m);
        found[s] = true;
        known = true;
        break;
      }
    }
    if (!known) throw IoError("unknown checkpoint matrix '" + name + "'");
  }
  for (bool f : found) {
    if (!f) throw IoError("checkpoint is missing a parameter matrix");
  }
  params.validate();
  return params;
}

}  // namespace garner
