#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "garner/dense.hpp"
#include "garner/sparse_graph.hpp"

namespace garner {

// A road network with per-road attributes:
//   graph     symmetric road topology
//   X         n x f' basic road features
//   C         n x c geographic-configuration vectors
//   positions planar coordinates, carried through but unused by training
//   has_config  whether row i of C was observed (false rows hold the
//               mean of the observed rows)
struct RoadDataset {
  SparseGraph graph;
  DenseMatrix X;
  DenseMatrix C;
  std::vector<std::array<Real, 2>> positions;
  std::vector<std::uint8_t> has_config;

  Index n() const { return graph.num_nodes(); }
  void validate() const;
};

enum class Task { kFunction, kTraffic, kRetrieval };

// Supervision for one downstream task. Only the fields of the active
// task are populated.
struct LabelSet {
  Task task = Task::kFunction;
  std::vector<int> classes;        // function: class id per road, in [0, 8)
  std::vector<Real> speeds;        // traffic: target speed per road
  DenseMatrix queries;             // retrieval: q x c query vectors
  std::vector<Index> query_truth;  // retrieval: source road per query

  int num_classes() const;
  void validate(Index n) const;
};

// Maximum function classes; matches the land-use taxonomy the probe
// reports over.
inline constexpr int kMaxFunctionClasses = 8;

// Reads nodes.csv, edges.csv, features.{grnm|csv}, config.{grnm|csv}.
// Missing-config rows are replaced by the mean of the observed rows.
RoadDataset load_dataset(const std::filesystem::path& dir);

// Writes the same layout (matrices in GRNM form). Mean-filled C rows
// are written as stored, so a round trip is lossless given f32 data.
void save_dataset(const std::filesystem::path& dir, const RoadDataset& ds);

LabelSet load_labels(const std::filesystem::path& dir, Task task);
void save_labels(const std::filesystem::path& dir, const LabelSet& labels);

// H0 = [C * W_c | X * W_x], the n x 2p encoder input.
DenseMatrix project_inputs(const DenseMatrix& C, const DenseMatrix& X,
                           const DenseMatrix& w_c, const DenseMatrix& w_x);
DenseMatrix project_inputs(const RoadDataset& ds, const DenseMatrix& w_c,
                           const DenseMatrix& w_x);

// Replace rows with has_config = false by the mean of the rows with
// has_config = true. Errors when no row is observed.
void fill_missing_configs(DenseMatrix& c,
                          const std::vector<std::uint8_t>& has_config);

}  // namespace garner
