#include "mtmc/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "mtmc/error.hpp"

namespace mtmc {

namespace {

constexpr int kCentroidRetries = 10000;

std::string padded(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, n);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (identities < 1) throw Error("identities must be >= 1");
  if (cameras < 1) throw Error("cameras must be >= 1");
  if (dim < 2) throw Error("dim must be >= 2");
  if (!(presence_prob > 0.0 && presence_prob <= 1.0)) throw Error("presence_prob must be in (0, 1]");
  if (!(intra_noise_sigma >= 0.0) || !std::isfinite(intra_noise_sigma)) {
    throw Error("intra_noise_sigma must be finite and >= 0");
  }
  if (!(inter_class_min_sep > 0.0) || !std::isfinite(inter_class_min_sep)) {
    throw Error("inter_class_min_sep must be finite and > 0");
  }
  if (min_track_frames < 1 || max_track_frames < min_track_frames) {
    throw Error("track length bounds are invalid");
  }
  if (transit_max_frames < 0 || unsync_max_offset < 0) throw Error("offsets must be >= 0");
  if (frames_per_camera < max_track_frames + transit_max_frames) {
    throw Error("frames_per_camera too short for the track length and transit bounds");
  }
}

TrajectorySet generate_scenario(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::int64_t> offset(static_cast<std::size_t>(config.cameras) + 1, 0);
  std::uniform_int_distribution<int> offset_dist(0, config.unsync_max_offset);
  for (int c = 1; c <= config.cameras; ++c) offset[c] = offset_dist(rng);

  std::vector<Eigen::VectorXd> centroids;
  centroids.reserve(static_cast<std::size_t>(config.identities));
  for (int k = 0; k < config.identities; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kCentroidRetries && !placed; ++attempt) {
      Eigen::VectorXd v(config.dim);
      for (int d = 0; d < config.dim; ++d) v[d] = gauss(rng);
      v.normalize();
      placed = true;
      for (const auto& c : centroids) {
        if ((c - v).norm() < config.inter_class_min_sep) {
          placed = false;
          break;
        }
      }
      if (placed) centroids.push_back(std::move(v));
    }
    if (!placed) {
      throw Error("cannot place " + std::to_string(config.identities) +
                  " centroids with separation " + std::to_string(config.inter_class_min_sep) +
                  "; use fewer identities or a smaller separation");
    }
  }

  const double noise_std = config.intra_noise_sigma / std::sqrt(static_cast<double>(config.dim));
  std::bernoulli_distribution present(config.presence_prob);
  std::uniform_int_distribution<int> base_dist(
      0, config.frames_per_camera - config.max_track_frames - config.transit_max_frames);
  std::uniform_int_distribution<int> transit_dist(0, config.transit_max_frames);
  std::uniform_int_distribution<int> length_dist(config.min_track_frames, config.max_track_frames);
  const int min_views = std::min(2, config.cameras);

  std::vector<TrajectoryRecord> records;
  for (int k = 0; k < config.identities; ++k) {
    std::vector<int> cams;
    while (static_cast<int>(cams.size()) < min_views) {
      cams.clear();
      for (int c = 1; c <= config.cameras; ++c) {
        if (present(rng)) cams.push_back(c);
      }
    }
    const int base = base_dist(rng);
    for (int c : cams) {
      TrajectoryRecord r;
      r.trajectory_id = padded("t", k) + "_c" + std::to_string(c);
      r.identity_id = padded("v", k);
      r.camera_id = c;
      r.start_frame = base + transit_dist(rng) + offset[c];
      r.end_frame = r.start_frame + length_dist(rng) - 1;
      r.feature = centroids[k];
      if (noise_std > 0.0) {
        for (int d = 0; d < config.dim; ++d) r.feature[d] += noise_std * gauss(rng);
      }
      records.push_back(std::move(r));
    }
  }
  return TrajectorySet(std::move(records), config.cameras, config.dim);
}

}  // namespace mtmc
