#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtmc/trajectory.hpp"

namespace mtmc {

struct GraphNode {
  std::size_t record = 0;  // index into the source TrajectorySet
  std::string trajectory_id;
  int camera_id = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  std::optional<std::string> identity_id;
};

// Undirected edge stored with first < second. Nodes are sorted by
// (camera_id, trajectory_id), so index order is the canonical endpoint order.
struct EdgeEndpoints {
  std::uint32_t first = 0;
  std::uint32_t second = 0;

  friend bool operator==(const EdgeEndpoints&, const EdgeEndpoints&) = default;
  friend auto operator<=>(const EdgeEndpoints&, const EdgeEndpoints&) = default;
};

struct EdgeRawFeatures {
  double euclidean = 0.0;
  double cosine_distance = 0.0;
};

// Dense inter-camera association graph. Nodes under the same camera are never
// connected.
struct AssociationGraph {
  std::vector<GraphNode> nodes;
  Eigen::MatrixXd features;  // nodes x D, one descriptor per row
  std::vector<EdgeEndpoints> edges;  // lexicographic by (first, second)
  Eigen::MatrixXd edge_raw;  // edges x 2: (euclidean, cosine distance)
  std::optional<std::vector<std::uint8_t>> labels;  // 1 iff same identity

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  int dim() const { return static_cast<int>(features.cols()); }
};

// ||a - b||_2 and 1 - cos(a, b). Throws on zero-norm input.
EdgeRawFeatures edge_raw_features(const Eigen::Ref<const Eigen::VectorXd>& a,
                                  const Eigen::Ref<const Eigen::VectorXd>& b);

// Gap in frames between two closed spans; 0 when they overlap.
std::int64_t temporal_gap(std::int64_t start_a, std::int64_t end_a, std::int64_t start_b,
                          std::int64_t end_b);

AssociationGraph build_graph(const TrajectorySet& trajectories,
                             std::optional<std::int64_t> temporal_threshold = std::nullopt);

// Graph over a subset of records (indices into `trajectories`).
AssociationGraph build_graph(const TrajectorySet& trajectories, std::span<const std::size_t> records,
                             std::optional<std::int64_t> temporal_threshold = std::nullopt);

// Refreshes edge_raw after node features were modified in place.
void recompute_edge_features(AssociationGraph& graph);

}  // namespace mtmc
