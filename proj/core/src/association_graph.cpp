#include "mtmc/association_graph.hpp"

#include <algorithm>
#include <numeric>

#include "mtmc/error.hpp"

namespace mtmc {

EdgeRawFeatures edge_raw_features(const Eigen::Ref<const Eigen::VectorXd>& a,
                                  const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw Error("edge_raw_features: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw Error("edge_raw_features: zero-norm descriptor");
  const double cosine = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return {(a - b).norm(), 1.0 - cosine};
}

std::int64_t temporal_gap(std::int64_t start_a, std::int64_t end_a, std::int64_t start_b,
                          std::int64_t end_b) {
  return std::max<std::int64_t>(0, std::max(start_a, start_b) - std::min(end_a, end_b));
}

AssociationGraph build_graph(const TrajectorySet& trajectories,
                             std::optional<std::int64_t> temporal_threshold) {
  std::vector<std::size_t> all(trajectories.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_graph(trajectories, all, temporal_threshold);
}

AssociationGraph build_graph(const TrajectorySet& trajectories, std::span<const std::size_t> records,
                             std::optional<std::int64_t> temporal_threshold) {
  if (temporal_threshold && *temporal_threshold < 0) {
    throw Error("temporal_threshold must be non-negative");
  }
  std::vector<std::size_t> order(records.begin(), records.end());
  for (std::size_t r : order) {
    if (r >= trajectories.size()) throw Error("build_graph: record index out of range");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = trajectories[x];
    const auto& b = trajectories[y];
    if (a.camera_id != b.camera_id) return a.camera_id < b.camera_id;
    return a.trajectory_id < b.trajectory_id;
  });
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw Error("build_graph: duplicate record index");
  }

  AssociationGraph g;
  const auto n = order.size();
  g.nodes.reserve(n);
  g.features.resize(static_cast<Eigen::Index>(n), trajectories.dim());
  bool labeled = n > 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = trajectories[order[i]];
    g.nodes.push_back({order[i], r.trajectory_id, r.camera_id, r.start_frame, r.end_frame,
                       r.identity_id});
    g.features.row(static_cast<Eigen::Index>(i)) = r.feature.transpose();
    labeled = labeled && r.identity_id.has_value();
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& a = g.nodes[i];
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const auto& b = g.nodes[j];
      if (a.camera_id == b.camera_id) continue;
      if (temporal_threshold &&
          temporal_gap(a.start_frame, a.end_frame, b.start_frame, b.end_frame) >
              *temporal_threshold) {
        continue;
      }
      g.edges.push_back({i, j});
    }
  }

  recompute_edge_features(g);
  if (labeled) {
    std::vector<std::uint8_t> labels(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      labels[e] = *g.nodes[g.edges[e].first].identity_id == *g.nodes[g.edges[e].second].identity_id;
    }
    g.labels = std::move(labels);
  }
  return g;
}

void recompute_edge_features(AssociationGraph& graph) {
  graph.edge_raw.resize(static_cast<Eigen::Index>(graph.edges.size()), 2);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [i, j] = graph.edges[e];
    const auto raw = edge_raw_features(graph.features.row(i).transpose(),
                                       graph.features.row(j).transpose());
    graph.edge_raw(static_cast<Eigen::Index>(e), 0) = raw.euclidean;
    graph.edge_raw(static_cast<Eigen::Index>(e), 1) = raw.cosine_distance;
  }
}

}  // namespace mtmc
