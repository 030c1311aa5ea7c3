#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtmc/association_graph.hpp"
#include "mtmc/clustering.hpp"
#include "mtmc/gcn.hpp"
#include "mtmc/trajectory.hpp"

namespace mtmc {

// One refined cluster. Clusters spanning at least two cameras are the
// multi-camera (global) trajectories; singletons are kept but not flagged.
struct GlobalTrajectory {
  int global_id = 0;
  bool multi_camera = false;
  std::vector<std::string> trajectory_ids;
};

struct InferenceResult {
  AssociationGraph graph;
  Eigen::MatrixXd probabilities;
  ClusterSet clusters;  // after refinement
  std::vector<GlobalTrajectory> trajectories;
};

InferenceResult infer(const ModelParameters& model, const TrajectorySet& trajectories,
                      std::optional<std::int64_t> temporal_threshold = std::nullopt);

std::vector<GlobalTrajectory> to_global_trajectories(const AssociationGraph& graph,
                                                     const ClusterSet& clusters);

// {"clusters": [{"global_id": int, "multi_camera": bool, "trajectories": [...]}]}
// plus an optional "config" echo.
nlohmann::json clusters_to_json(const std::vector<GlobalTrajectory>& trajectories,
                                const nlohmann::json& config = nlohmann::json());
std::vector<GlobalTrajectory> clusters_from_json(const nlohmann::json& j);

void save_clusters(const std::filesystem::path& path, const std::vector<GlobalTrajectory>& t,
                   const nlohmann::json& config = nlohmann::json());
std::vector<GlobalTrajectory> load_clusters(const std::filesystem::path& path);

}  // namespace mtmc
