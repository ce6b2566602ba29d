#include "garner/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "garner/matrix_io.hpp"

namespace garner {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return out;
}

bool looks_like_header(std::string_view first_field) {
  return !first_field.empty() && !std::isdigit(static_cast<unsigned char>(
                                     first_field.front())) &&
         first_field.front() != '-' && first_field.front() != '+';
}

template <typename T>
T parse_field(std::string_view tok, const std::filesystem::path& path,
              Index line) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw IoError("unparseable field at " + path.string() + ":" +
                  std::to_string(line + 1));
  }
  return value;
}

// Reads a CSV table, skipping one optional header line. Each row must
// have exactly `fields` columns.
std::vector<std::vector<std::string>> read_table(
    const std::filesystem::path& path, std::size_t fields) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++lineno;
      continue;
    }
    const auto parts = split_fields(line);
    if (lineno == 0 && looks_like_header(parts[0])) {
      ++lineno;
      continue;
    }
    if (parts.size() != fields) {
      throw IoError("expected " + std::to_string(fields) + " fields at " +
                    path.string() + ":" + std::to_string(lineno + 1));
    }
    std::vector<std::string> row;
    row.reserve(fields);
    for (auto p : parts) row.emplace_back(p);
    rows.push_back(std::move(row));
    ++lineno;
  }
  return rows;
}

}  // namespace

void RoadDataset::validate() const {
  const Index count = graph.num_nodes();
  if (X.rows() != count || C.rows() != count ||
      static_cast<Index>(positions.size()) != count ||
      static_cast<Index>(has_config.size()) != count) {
    throw DimensionError("dataset fields disagree on the number of roads");
  }
  if (!graph.symmetric()) {
    throw StructureError("road topology must be symmetric");
  }
  require_finite(X, "features X");
  require_finite(C, "configurations C");
}

int LabelSet::num_classes() const {
  int top = 0;
  for (int c : classes) top = std::max(top, c + 1);
  return top;
}

void LabelSet::validate(Index n) const {
  switch (task) {
    case Task::kFunction:
      if (static_cast<Index>(classes.size()) != n) {
        throw DimensionError("function labels do not cover every road");
      }
      for (int c : classes) {
        if (c < 0 || c >= kMaxFunctionClasses) {
          throw StructureError("function class id out of range [0, " +
                               std::to_string(kMaxFunctionClasses) + ")");
        }
      }
      break;
    case Task::kTraffic:
      if (static_cast<Index>(speeds.size()) != n) {
        throw DimensionError("traffic labels do not cover every road");
      }
      for (Real s : speeds) {
        if (!std::isfinite(s)) throw StructureError("non-finite speed label");
      }
      break;
    case Task::kRetrieval:
      if (queries.rows() != static_cast<Index>(query_truth.size())) {
        throw DimensionError("query count does not match truth count");
      }
      require_finite(queries, "queries");
      for (Index t : query_truth) {
        if (t < 0 || t >= n) {
          throw StructureError("query ground-truth road id out of range");
        }
      }
      break;
  }
}

void fill_missing_configs(DenseMatrix& c,
                          const std::vector<std::uint8_t>& has_config) {
  if (static_cast<Index>(has_config.size()) != c.rows()) {
    throw DimensionError("has_config length does not match C rows");
  }
  Index present = 0;
  Vector mean = Vector::Zero(c.cols());
  for (Index i = 0; i < c.rows(); ++i) {
    if (has_config[static_cast<std::size_t>(i)]) {
      mean += c.row(i).transpose();
      ++present;
    }
  }
  if (present == 0) {
    throw StructureError("no road has an observed configuration");
  }
  mean /= static_cast<Real>(present);
  for (Index i = 0; i < c.rows(); ++i) {
    if (!has_config[static_cast<std::size_t>(i)]) {
      c.row(i) = mean.transpose();
    }
  }
}

RoadDataset load_dataset(const std::filesystem::path& dir) {
  const auto nodes_path = dir / "nodes.csv";
  const auto node_rows = read_table(nodes_path, 4);
  const Index n = static_cast<Index>(node_rows.size());

  RoadDataset ds;
  ds.positions.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  ds.has_config.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  for (Index r = 0; r < n; ++r) {
    const auto& row = node_rows[static_cast<std::size_t>(r)];
    const Index id = parse_field<Index>(row[0], nodes_path, r);
    if (id < 0 || id >= n) {
      throw StructureError("node id " + std::to_string(id) +
                           " outside [0, " + std::to_string(n) + ")");
    }
    if (seen[static_cast<std::size_t>(id)]) {
      throw StructureError("duplicate node id " + std::to_string(id));
    }
    seen[static_cast<std::size_t>(id)] = 1;
    ds.positions[static_cast<std::size_t>(id)] = {
        parse_field<Real>(row[1], nodes_path, r),
        parse_field<Real>(row[2], nodes_path, r)};
    const int flag = parse_field<int>(row[3], nodes_path, r);
    if (flag != 0 && flag != 1) {
      throw StructureError("has_config must be 0 or 1");
    }
    ds.has_config[static_cast<std::size_t>(id)] =
        static_cast<std::uint8_t>(flag);
  }

  const auto edges_path = dir / "edges.csv";
  std::vector<Edge> pairs;
  for (const auto& row : read_table(edges_path, 2)) {
    pairs.push_back({parse_field<Index>(row[0], edges_path, 0),
                     parse_field<Index>(row[1], edges_path, 0), 1.0});
  }
  ds.graph = SparseGraph::from_undirected(n, pairs);

  ds.X = load_matrix_either(dir / "features");
  ds.C = load_matrix_either(dir / "config");
  fill_missing_configs(ds.C, ds.has_config);
  ds.validate();
  return ds;
}

void save_dataset(const std::filesystem::path& dir, const RoadDataset& ds) {
  ds.validate();
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "nodes.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write nodes.csv");
    out << "id,x,y,has_config\n";
    char buf[96];
    for (Index i = 0; i < ds.n(); ++i) {
      const auto& p = ds.positions[static_cast<std::size_t>(i)];
      std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%d",
                    static_cast<long long>(i), p[0], p[1],
                    ds.has_config[static_cast<std::size_t>(i)] ? 1 : 0);
      out << buf << '\n';
    }
  }
  {
    std::ofstream out(dir / "edges.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write edges.csv");
    out << "src,dst\n";
    for (Index i = 0; i < ds.n(); ++i) {
      auto cols = ds.graph.neighbors(i);
      for (Index j : cols) {
        if (j >= i) out << i << ',' << j << '\n';
      }
    }
  }
  save_matrix_grnm(dir / "features.grnm", ds.X);
  save_matrix_grnm(dir / "config.grnm", ds.C);
}

LabelSet load_labels(const std::filesystem::path& dir, Task task) {
  LabelSet out;
  out.task = task;
  switch (task) {
    case Task::kFunction: {
      const auto path = dir / "labels_function.csv";
      const auto rows = read_table(path, 2);
      out.classes.assign(rows.size(), 0);
      std::vector<std::uint8_t> seen(rows.size(), 0);
      for (const auto& row : rows) {
        const Index id = parse_field<Index>(row[0], path, 0);
        if (id < 0 || id >= static_cast<Index>(rows.size()) ||
            seen[static_cast<std::size_t>(id)]) {
          throw StructureError("bad or duplicate road id in function labels");
        }
        seen[static_cast<std::size_t>(id)] = 1;
        out.classes[static_cast<std::size_t>(id)] =
            parse_field<int>(row[1], path, 0);
      }
      break;
    }
    case Task::kTraffic: {
      const auto path = dir / "labels_traffic.csv";
      const auto rows = read_table(path, 2);
      out.speeds.assign(rows.size(), 0.0);
      std::vector<std::uint8_t> seen(rows.size(), 0);
      for (const auto& row : rows) {
        const Index id = parse_field<Index>(row[0], path, 0);
        if (id < 0 || id >= static_cast<Index>(rows.size()) ||
            seen[static_cast<std::size_t>(id)]) {
          throw StructureError("bad or duplicate road id in traffic labels");
        }
        seen[static_cast<std::size_t>(id)] = 1;
        out.speeds[static_cast<std::size_t>(id)] =
            parse_field<Real>(row[1], path, 0);
      }
      break;
    }
    case Task::kRetrieval: {
      out.queries = load_matrix_either(dir / "queries");
      const auto path = dir / "queries_truth.csv";
      const auto rows = read_table(path, 2);
      out.query_truth.assign(
          static_cast<std::size_t>(out.queries.rows()), 0);
      if (static_cast<Index>(rows.size()) != out.queries.rows()) {
        throw DimensionError("queries_truth rows do not match query matrix");
      }
      for (const auto& row : rows) {
        const Index q = parse_field<Index>(row[0], path, 0);
        if (q < 0 || q >= out.queries.rows()) {
          throw StructureError("query row index out of range");
        }
        out.query_truth[static_cast<std::size_t>(q)] =
            parse_field<Index>(row[1], path, 0);
      }
      break;
    }
  }
  return out;
}

void save_labels(const std::filesystem::path& dir, const LabelSet& labels) {
  std::filesystem::create_directories(dir);
  switch (labels.task) {
    case Task::kFunction: {
      std::ofstream out(dir / "labels_function.csv", std::ios::trunc);
      if (!out) throw IoError("cannot write labels_function.csv");
      out << "id,class\n";
      for (std::size_t i = 0; i < labels.classes.size(); ++i) {
        out << i << ',' << labels.classes[i] << '\n';
      }
      break;
    }
    case Task::kTraffic: {
      std::ofstream out(dir / "labels_traffic.csv", std::ios::trunc);
      if (!out) throw IoError("cannot write labels_traffic.csv");
      out << "id,speed\n";
      char buf[40];
      for (std::size_t i = 0; i < labels.speeds.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", labels.speeds[i]);
        out << i << ',' << buf << '\n';
      }
      break;
    }
    case Task::kRetrieval: {
      save_matrix_grnm(dir / "queries.grnm", labels.queries);
      std::ofstream out(dir / "queries_truth.csv", std::ios::trunc);
      if (!out) throw IoError("cannot write queries_truth.csv");
      out << "row,node_id\n";
      for (std::size_t i = 0; i < labels.query_truth.size(); ++i) {
        out << i << ',' << labels.query_truth[i] << '\n';
      }
      break;
    }
  }
}

DenseMatrix project_inputs(const DenseMatrix& C, const DenseMatrix& X,
                           const DenseMatrix& w_c, const DenseMatrix& w_x) {
  if (C.cols() != w_c.rows() || X.cols() != w_x.rows()) {
    throw DimensionError("projection shapes do not match inputs");
  }
  if (w_c.cols() != w_x.cols()) {
    throw DimensionError("both projections must share the output width");
  }
  if (C.rows() != X.rows()) {
    throw DimensionError("C and X disagree on the number of roads");
  }
  const Index p = w_c.cols();
  DenseMatrix h(C.rows(), 2 * p);
  h.leftCols(p).noalias() = C * w_c;
  h.rightCols(p).noalias() = X * w_x;
  return h;
}

DenseMatrix project_inputs(const RoadDataset& ds, const DenseMatrix& w_c,
                           const DenseMatrix& w_x) {
  return project_inputs(ds.C, ds.X, w_c, w_x);
}

}  // namespace garner
