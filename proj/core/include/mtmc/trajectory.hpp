#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace mtmc {

inline constexpr int kDefaultDescriptorDim = 2048;

// One single-camera (SC) trajectory: a tracklet under one camera summarized
// by a single appearance descriptor.
struct TrajectoryRecord {
  std::string trajectory_id;
  int camera_id = 1;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  Eigen::VectorXd feature;
  std::optional<std::string> identity_id;

  std::int64_t frame_count() const { return end_frame - start_frame + 1; }
};

bool operator==(const TrajectoryRecord& a, const TrajectoryRecord& b);

// Validated, immutable collection of SC trajectories sharing one descriptor
// dimension. Camera ids are 1-based and bounded by camera_count().
class TrajectorySet {
 public:
  TrajectorySet() = default;

  // Throws mtmc::Error when any record breaks the set invariants. A
  // camera_count of 0 means "infer as the largest camera id".
  TrajectorySet(std::vector<TrajectoryRecord> records, int camera_count, int dim);

  const std::vector<TrajectoryRecord>& records() const { return records_; }
  const TrajectoryRecord& operator[](std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  int camera_count() const { return camera_count_; }
  int dim() const { return dim_; }

  // True when every record carries a ground-truth identity.
  bool fully_labeled() const;

  // Distinct identity ids in order of first appearance.
  std::vector<std::string> identities() const;

  // Records whose identity is in `ids`; camera_count and dim are kept.
  TrajectorySet select_identities(std::span<const std::string> ids) const;

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;

 private:
  std::vector<TrajectoryRecord> records_;
  int camera_count_ = 0;
  int dim_ = 0;
};

// Component-wise mean of per-box appearance embeddings.
Eigen::VectorXd average_descriptors(std::span<const Eigen::VectorXd> embeddings);

// JSON Lines trajectory files. An optional first line
// {"mtmc_header": 1, "dim": D, "cameras": M} fixes D and M; otherwise D is
// taken from the first record and M from the largest camera id. A record
// carries either "feature" (one descriptor) or "embeddings" (per-box
// descriptors, averaged on load).
TrajectorySet read_trajectories(std::istream& in);
TrajectorySet load_trajectories(const std::filesystem::path& path);

// `header_extra` members (e.g. a run config echo) are merged into the header
// line; readers ignore them.
void write_trajectories(std::ostream& out, const TrajectorySet& set,
                        const nlohmann::json& header_extra = nlohmann::json::object());
void save_trajectories(const std::filesystem::path& path, const TrajectorySet& set,
                       const nlohmann::json& header_extra = nlohmann::json::object());

}  // namespace mtmc
