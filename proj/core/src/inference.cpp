#include "mtmc/inference.hpp"

#include <fstream>
#include <set>

#include "mtmc/error.hpp"

namespace mtmc {

using nlohmann::json;

std::vector<GlobalTrajectory> to_global_trajectories(const AssociationGraph& graph,
                                                     const ClusterSet& clusters) {
  std::vector<GlobalTrajectory> out;
  out.reserve(clusters.clusters.size());
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    GlobalTrajectory t;
    t.global_id = static_cast<int>(c) + 1;
    std::set<int> cameras;
    for (std::size_t node : clusters.clusters[c]) {
      t.trajectory_ids.push_back(graph.nodes[node].trajectory_id);
      cameras.insert(graph.nodes[node].camera_id);
    }
    t.multi_camera = cameras.size() >= 2;
    out.push_back(std::move(t));
  }
  return out;
}

InferenceResult infer(const ModelParameters& model, const TrajectorySet& trajectories,
                      std::optional<std::int64_t> temporal_threshold) {
  InferenceResult r;
  if (trajectories.empty()) return r;
  if (trajectories.dim() != model.config.dim) {
    throw Error("model dim " + std::to_string(model.config.dim) + " does not match data dim " +
                std::to_string(trajectories.dim()));
  }
  r.graph = build_graph(trajectories, temporal_threshold);
  r.probabilities = forward(r.graph, model).probabilities;

  const auto kept = prune_edges(r.probabilities);
  std::vector<EdgeEndpoints> edges;
  std::vector<double> p1;
  edges.reserve(kept.size());
  p1.reserve(kept.size());
  for (std::size_t e : kept) {
    edges.push_back(r.graph.edges[e]);
    p1.push_back(r.probabilities(static_cast<Eigen::Index>(e), 1));
  }
  const ClusterSet components = connected_components(r.graph.node_count(), edges, p1);
  std::vector<int> cameras;
  cameras.reserve(r.graph.node_count());
  for (const auto& n : r.graph.nodes) cameras.push_back(n.camera_id);
  r.clusters = refine_clusters(components, cameras, trajectories.camera_count());
  r.trajectories = to_global_trajectories(r.graph, r.clusters);
  return r;
}

json clusters_to_json(const std::vector<GlobalTrajectory>& trajectories, const json& config) {
  json arr = json::array();
  for (const auto& t : trajectories) {
    arr.push_back({{"global_id", t.global_id},
                   {"multi_camera", t.multi_camera},
                   {"trajectories", t.trajectory_ids}});
  }
  json out = {{"clusters", std::move(arr)}};
  if (!config.is_null()) out["config"] = config;
  return out;
}

std::vector<GlobalTrajectory> clusters_from_json(const json& j) {
  if (!j.is_object() || !j.contains("clusters") || !j.at("clusters").is_array()) {
    throw Error("cluster file needs a 'clusters' array");
  }
  std::vector<GlobalTrajectory> out;
  for (const auto& c : j.at("clusters")) {
    try {
      GlobalTrajectory t;
      t.global_id = c.at("global_id").get<int>();
      t.multi_camera = c.at("multi_camera").get<bool>();
      t.trajectory_ids = c.at("trajectories").get<std::vector<std::string>>();
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw Error(std::string("malformed cluster entry: ") + e.what());
    }
  }
  return out;
}

void save_clusters(const std::filesystem::path& path, const std::vector<GlobalTrajectory>& t,
                   const json& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write cluster file '" + path.string() + "'");
  out << clusters_to_json(t, config).dump(2) << '\n';
}

std::vector<GlobalTrajectory> load_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open cluster file '" + path.string() + "'");
  try {
    return clusters_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace mtmc
