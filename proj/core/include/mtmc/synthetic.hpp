#pragma once

#include <cstdint>

#include "mtmc/trajectory.hpp"

namespace mtmc {

// Labeled multi-camera scenario: identity centroids on the unit sphere,
// per-view descriptors jittered around them, and per-camera timeline offsets
// emulating unsynchronized recordings.
struct SynthConfig {
  int identities = 96;
  int cameras = 4;
  int dim = 64;
  double presence_prob = 1.0;  // chance an identity shows up in a camera
  // Expected norm of the descriptor noise (per-dimension std sigma/sqrt(D)).
  double intra_noise_sigma = 0.25;
  double inter_class_min_sep = 1.0;  // minimum centroid distance
  int frames_per_camera = 2000;
  int unsync_max_offset = 0;
  int min_track_frames = 50;
  int max_track_frames = 250;
  int transit_max_frames = 100;  // delay of a vehicle between cameras
  std::uint64_t seed = 0;

  void validate() const;
};

TrajectorySet generate_scenario(const SynthConfig& config);

}  // namespace mtmc
