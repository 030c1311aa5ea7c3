#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mtmc/association_graph.hpp"

namespace mtmc {

// Union by size with path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

struct ClusterSet {
  std::vector<std::vector<std::size_t>> clusters;  // sorted members, ordered by smallest member
  std::vector<std::size_t> assignment;             // node -> cluster index
  std::vector<EdgeEndpoints> kept_edges;           // canonical order
  std::vector<double> kept_probability;            // p1 per kept edge
};

// Indices of edges whose class-1 probability strictly exceeds class 0.
std::vector<std::size_t> prune_edges(const Eigen::MatrixXd& probabilities);

ClusterSet connected_components(std::size_t node_count, std::span<const EdgeEndpoints> edges,
                                std::span<const double> probabilities = {});

// Splits every cluster holding more than `camera_count` nodes or two nodes of
// one camera by repeatedly dropping its weakest kept edge (lowest p1, ties by
// canonical edge order) and recomputing components, until all clusters
// satisfy both constraints.
ClusterSet refine_clusters(const ClusterSet& clusters, std::span<const int> node_cameras,
                           int camera_count);

bool cluster_is_valid(std::span<const std::size_t> members, std::span<const int> node_cameras,
                      int camera_count);

}  // namespace mtmc
