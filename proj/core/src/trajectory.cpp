#include "mtmc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "mtmc/error.hpp"

namespace mtmc {

using nlohmann::json;

bool operator==(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  return a.trajectory_id == b.trajectory_id && a.camera_id == b.camera_id &&
         a.start_frame == b.start_frame && a.end_frame == b.end_frame &&
         a.feature.size() == b.feature.size() && a.feature == b.feature &&
         a.identity_id == b.identity_id;
}

TrajectorySet::TrajectorySet(std::vector<TrajectoryRecord> records, int camera_count, int dim)
    : records_(std::move(records)), camera_count_(camera_count), dim_(dim) {
  if (dim_ <= 0) throw Error("descriptor dimension must be positive, got " + std::to_string(dim_));
  if (camera_count_ < 0) throw Error("camera count must be non-negative");

  int max_camera = 0;
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (r.trajectory_id.empty()) throw Error("empty trajectory_id");
    if (!seen.insert(r.trajectory_id).second) {
      throw Error("duplicate trajectory_id '" + r.trajectory_id + "'");
    }
    if (r.camera_id < 1) {
      throw Error("trajectory '" + r.trajectory_id + "': camera_id must be >= 1");
    }
    if (r.end_frame < r.start_frame) {
      throw Error("trajectory '" + r.trajectory_id + "': end_frame < start_frame");
    }
    if (r.feature.size() != dim_) {
      throw Error("trajectory '" + r.trajectory_id + "': feature has dimension " +
                  std::to_string(r.feature.size()) + ", expected " + std::to_string(dim_));
    }
    if (!r.feature.allFinite()) {
      throw Error("trajectory '" + r.trajectory_id + "': feature has non-finite entries");
    }
    if (r.feature.squaredNorm() == 0.0) {
      throw Error("trajectory '" + r.trajectory_id + "': feature has zero norm");
    }
    max_camera = std::max(max_camera, r.camera_id);
  }
  if (camera_count_ == 0) {
    camera_count_ = max_camera;
  } else if (max_camera > camera_count_) {
    throw Error("camera_id " + std::to_string(max_camera) + " exceeds camera count " +
                std::to_string(camera_count_));
  }
}

bool TrajectorySet::fully_labeled() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const TrajectoryRecord& r) { return r.identity_id.has_value(); });
}

std::vector<std::string> TrajectorySet::identities() const {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (r.identity_id && seen.insert(*r.identity_id).second) ids.push_back(*r.identity_id);
  }
  return ids;
}

TrajectorySet TrajectorySet::select_identities(std::span<const std::string> ids) const {
  std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  std::vector<TrajectoryRecord> picked;
  for (const auto& r : records_) {
    if (r.identity_id && wanted.contains(*r.identity_id)) picked.push_back(r);
  }
  return TrajectorySet(std::move(picked), camera_count_, dim_);
}

Eigen::VectorXd average_descriptors(std::span<const Eigen::VectorXd> embeddings) {
  if (embeddings.empty()) throw Error("no embeddings");
  const Eigen::Index dim = embeddings.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (const auto& e : embeddings) {
    if (e.size() != dim) {
      throw Error("embedding dimension mismatch: " + std::to_string(e.size()) + " vs " +
                  std::to_string(dim));
    }
    if (!e.allFinite()) throw Error("embedding has non-finite entries");
    sum += e;
  }
  return sum / static_cast<double>(embeddings.size());
}

namespace {

Eigen::VectorXd parse_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw Error("'" + field + "' must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error("'" + field + "' must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

template <typename T>
T required(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(std::string("missing field '") + key + "'");
  if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string");
  } else {
    if (!it->is_number_integer()) throw Error(std::string("field '") + key + "' must be an integer");
  }
  return it->get<T>();
}

TrajectoryRecord parse_record(const json& obj) {
  if (!obj.is_object()) throw Error("record must be a JSON object");
  TrajectoryRecord r;
  r.trajectory_id = required<std::string>(obj, "trajectory_id");
  r.camera_id = required<int>(obj, "camera_id");
  r.start_frame = required<std::int64_t>(obj, "start_frame");
  r.end_frame = required<std::int64_t>(obj, "end_frame");

  const bool has_feature = obj.contains("feature");
  const bool has_embeddings = obj.contains("embeddings");
  if (has_feature == has_embeddings) {
    throw Error("record needs exactly one of 'feature' or 'embeddings'");
  }
  if (has_feature) {
    r.feature = parse_vector(obj.at("feature"), "feature");
  } else {
    const json& boxes = obj.at("embeddings");
    if (!boxes.is_array()) throw Error("'embeddings' must be an array of arrays");
    std::vector<Eigen::VectorXd> per_box;
    per_box.reserve(boxes.size());
    for (const auto& b : boxes) per_box.push_back(parse_vector(b, "embeddings"));
    r.feature = average_descriptors(per_box);
  }
  if (auto it = obj.find("identity_id"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw Error("field 'identity_id' must be a string");
    r.identity_id = it->get<std::string>();
  }
  return r;
}

}  // namespace

TrajectorySet read_trajectories(std::istream& in) {
  std::vector<TrajectoryRecord> records;
  std::unordered_map<std::string, std::size_t> line_of;
  int dim = 0;
  int cameras = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json obj = json::parse(line);
      if (obj.is_object() && obj.contains("mtmc_header")) {
        if (!records.empty()) throw Error("header must be the first line");
        dim = obj.value("dim", 0);
        cameras = obj.value("cameras", 0);
        continue;
      }
      TrajectoryRecord r = parse_record(obj);
      if (dim == 0) dim = static_cast<int>(r.feature.size());
      if (r.feature.size() != dim) {
        throw Error("feature dimension " + std::to_string(r.feature.size()) + " != " +
                    std::to_string(dim));
      }
      if (auto [it, inserted] = line_of.emplace(r.trajectory_id, line_no); !inserted) {
        throw Error("duplicate trajectory_id '" + r.trajectory_id + "' (first seen on line " +
                    std::to_string(it->second) + ")");
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    } catch (const Error& e) {
      throw Error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (dim == 0) dim = kDefaultDescriptorDim;
  return TrajectorySet(std::move(records), cameras, dim);
}

TrajectorySet load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file '" + path.string() + "'");
  try {
    return read_trajectories(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_trajectories(std::ostream& out, const TrajectorySet& set, const json& header_extra) {
  json header = header_extra.is_object() ? header_extra : json::object();
  header["mtmc_header"] = 1;
  header["dim"] = set.dim();
  header["cameras"] = set.camera_count();
  out << header.dump() << '\n';
  for (const auto& r : set.records()) {
    json obj;
    obj["trajectory_id"] = r.trajectory_id;
    obj["camera_id"] = r.camera_id;
    obj["start_frame"] = r.start_frame;
    obj["end_frame"] = r.end_frame;
    obj["feature"] = std::vector<double>(r.feature.data(), r.feature.data() + r.feature.size());
    if (r.identity_id) obj["identity_id"] = *r.identity_id;
    out << obj.dump() << '\n';
  }
}

void save_trajectories(const std::filesystem::path& path, const TrajectorySet& set,
                       const json& header_extra) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file '" + path.string() + "'");
  write_trajectories(out, set, header_extra);
}

}  // namespace mtmc
