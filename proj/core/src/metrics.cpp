#include "mtmc/metrics.hpp"

#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mtmc/assignment.hpp"
#include "mtmc/error.hpp"

namespace mtmc {

MetricsReport id_metrics(std::span<const GlobalTrajectory> predicted,
                         const TrajectorySet& ground_truth) {
  std::unordered_map<std::string, std::size_t> record_of;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    record_of.emplace(ground_truth[i].trajectory_id, i);
  }

  // Ground-truth identities visible in >= 2 cameras.
  std::map<std::string, std::set<int>> cameras_of;
  for (const auto& r : ground_truth.records()) {
    if (r.identity_id) cameras_of[*r.identity_id].insert(r.camera_id);
  }
  std::unordered_map<std::string, std::size_t> gt_column;
  for (const auto& [id, cams] : cameras_of) {
    if (cams.size() >= 2) gt_column.emplace(id, gt_column.size());
  }

  MetricsReport report;
  for (const auto& r : ground_truth.records()) {
    if (r.identity_id && gt_column.contains(*r.identity_id)) report.gt_frames += r.frame_count();
  }

  std::unordered_set<std::string> seen;
  std::vector<std::vector<std::int64_t>> overlap;
  for (const auto& cluster : predicted) {
    for (const auto& tid : cluster.trajectory_ids) {
      if (!record_of.contains(tid)) throw Error("unknown trajectory_id '" + tid + "'");
      if (!seen.insert(tid).second) {
        throw Error("trajectory_id '" + tid + "' appears in more than one cluster");
      }
    }
    if (!cluster.multi_camera) continue;
    std::vector<std::int64_t> row(gt_column.size(), 0);
    for (const auto& tid : cluster.trajectory_ids) {
      const auto& r = ground_truth[record_of.at(tid)];
      report.pred_frames += r.frame_count();
      if (!r.identity_id) continue;
      if (auto it = gt_column.find(*r.identity_id); it != gt_column.end()) {
        row[it->second] += r.frame_count();
      }
    }
    overlap.push_back(std::move(row));
  }

  if (report.pred_frames == 0 || report.gt_frames == 0) {
    report.degenerate = true;
    return report;
  }

  const auto match = max_weight_assignment(overlap);
  for (std::size_t c = 0; c < match.size(); ++c) {
    if (match[c] >= 0) report.idtp += overlap[c][static_cast<std::size_t>(match[c])];
  }
  const auto tp = static_cast<double>(report.idtp);
  report.idp = 100.0 * tp / static_cast<double>(report.pred_frames);
  report.idr = 100.0 * tp / static_cast<double>(report.gt_frames);
  report.idf1 = 100.0 * 2.0 * tp / static_cast<double>(report.pred_frames + report.gt_frames);
  return report;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"idp", r.idp},           {"idr", r.idr},
          {"idf1", r.idf1},         {"idtp", r.idtp},
          {"pred_frames", r.pred_frames}, {"gt_frames", r.gt_frames},
          {"degenerate", r.degenerate}};
}

std::string format_metrics_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::size_t width = 5;
  for (const auto& [label, _] : rows) width = std::max(width, label.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "run" << std::right << std::setw(9)
     << "IDP" << std::setw(9) << "IDR" << std::setw(9) << "IDF1" << '\n';
  os << std::string(width + 27, '-') << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto& [label, r] : rows) {
    os << std::left << std::setw(static_cast<int>(width)) << label << std::right;
    if (r.degenerate) {
      os << std::setw(9) << "-" << std::setw(9) << "-" << std::setw(9) << "-";
    } else {
      os << std::setw(9) << r.idp << std::setw(9) << r.idr << std::setw(9) << r.idf1;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace mtmc
