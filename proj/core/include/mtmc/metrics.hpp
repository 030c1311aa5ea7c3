#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "mtmc/inference.hpp"
#include "mtmc/trajectory.hpp"

namespace mtmc {

// Identity metrics over multi-camera trajectories, in percent. Each SC
// trajectory weighs its frame count.
struct MetricsReport {
  double idp = 0.0;
  double idr = 0.0;
  double idf1 = 0.0;
  std::int64_t idtp = 0;
  std::int64_t pred_frames = 0;
  std::int64_t gt_frames = 0;
  // Set when either side has no multi-camera trajectory; all scores are 0.
  bool degenerate = false;
};

// Ground-truth identities seen by at least two cameras are matched one-to-one
// against predicted clusters flagged multi_camera, maximizing matched frames.
MetricsReport id_metrics(std::span<const GlobalTrajectory> predicted,
                         const TrajectorySet& ground_truth);

nlohmann::json to_json(const MetricsReport& report);

// Aligned text table with one row per labelled report.
std::string format_metrics_table(
    std::span<const std::pair<std::string, MetricsReport>> rows);

}  // namespace mtmc
