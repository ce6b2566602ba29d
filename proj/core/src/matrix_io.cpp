#include "garner/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace garner {
namespace {

constexpr char kMagic[4] = {'G', 'R', 'N', 'M'};

static_assert(std::endian::native == std::endian::little,
              "matrix files are little-endian; add byte swapping to port");

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated matrix file: " + path.string());
  return v;
}

[[noreturn]] void bad_number(const std::filesystem::path& path, Index line) {
  throw IoError("unparseable number at " + path.string() + ":" +
                std::to_string(line + 1));
}

Real parse_real(std::string_view tok, const std::filesystem::path& path,
                Index line) {
  Real value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    bad_number(path, line);
  }
  return value;
}

}  // namespace

void save_matrix_grnm(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, sizeof kMagic);
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
  if (!out) throw IoError("write failed: " + path.string());
}

DenseMatrix load_matrix_grnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError("not a GRNM matrix file: " + path.string());
  }
  const std::uint32_t rows = read_u32(in, path);
  const std::uint32_t cols = read_u32(in, path);
  DenseMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::vector<float> row(cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("truncated matrix file: " + path.string());
    for (std::uint32_t j = 0; j < cols; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) =
          static_cast<Real>(row[j]);
    }
  }
  require_finite(m, path.string().c_str());
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << m.rows() << "," << m.cols() << "\n";
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const int len = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j > 0) out << ',';
      out.write(buf, len);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

DenseMatrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty matrix file: " + path.string());
  const auto comma = line.find(',');
  if (comma == std::string::npos) {
    throw IoError("missing rows,cols header: " + path.string());
  }
  const Index rows = static_cast<Index>(parse_real(line.substr(0, comma), path, 0));
  const Index cols =
      static_cast<Index>(parse_real(line.substr(comma + 1), path, 0));
  if (rows < 0 || cols < 0) throw IoError("negative shape: " + path.string());

  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw IoError("truncated matrix file: " + path.string());
    }
    std::string_view rest(line);
    for (Index j = 0; j < cols; ++j) {
      const auto next = rest.find(',');
      const std::string_view tok = rest.substr(0, next);
      if (tok.empty()) bad_number(path, i + 1);
      m(i, j) = parse_real(tok, path, i + 1);
      if (next == std::string_view::npos) {
        if (j + 1 != cols) throw IoError("short row in " + path.string());
        rest = {};
      } else {
        rest = rest.substr(next + 1);
      }
    }
    if (!rest.empty()) throw IoError("long row in " + path.string());
  }
  require_finite(m, path.string().c_str());
  return m;
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix& m) {
  if (path.extension() == ".grnm") {
    save_matrix_grnm(path, m);
  } else if (path.extension() == ".csv") {
    save_matrix_csv(path, m);
  } else {
    throw IoError("unknown matrix extension: " + path.string());
  }
}

DenseMatrix load_matrix(const std::filesystem::path& path) {
  if (path.extension() == ".grnm") return load_matrix_grnm(path);
  if (path.extension() == ".csv") return load_matrix_csv(path);
  throw IoError("unknown matrix extension: " + path.string());
}

DenseMatrix load_matrix_either(const std::filesystem::path& stem) {
  std::filesystem::path grnm = stem;
  grnm += ".grnm";
  if (std::filesystem::exists(grnm)) return load_matrix_grnm(grnm);
  std::filesystem::path csv = stem;
  csv += ".csv";
  if (std::filesystem::exists(csv)) return load_matrix_csv(csv);
  throw IoError("no matrix file " + stem.string() + ".{grnm,csv}");
}

}  // namespace garner
