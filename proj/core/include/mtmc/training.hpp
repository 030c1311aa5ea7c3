#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtmc/association_graph.hpp"
#include "mtmc/gcn.hpp"
#include "mtmc/loss.hpp"
#include "mtmc/trajectory.hpp"

namespace mtmc {

struct TrainConfig {
  std::size_t batch_size_ids = 100;
  int epochs = 100;
  double base_lr = 0.01;
  int warmup_epochs = 5;
  int decay_epoch = 50;
  double decay_factor = 0.1;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> temporal_threshold;
  // Gaussian descriptor jitter applied per batch; per-dimension std is
  // sigma / sqrt(D) so that sigma is the expected noise norm. 0 disables.
  double descriptor_noise_sigma = 0.0;
  ModelConfig model;
  LossOptions loss;

  void validate() const;
};

// Groups a labeled dataset by identity for ID-level batch sampling.
class IdentityBatcher {
 public:
  explicit IdentityBatcher(const TrajectorySet& dataset);

  const std::vector<std::string>& identities() const { return identities_; }

  // Shuffled partition of all identities into batches of `batch_size`; the
  // last batch may be short. Fewer identities than `batch_size` yields one
  // batch holding all of them.
  std::vector<std::vector<std::string>> epoch_partition(std::size_t batch_size,
                                                        std::mt19937_64& rng) const;

  AssociationGraph batch_graph(std::span<const std::string> batch,
                               std::optional<std::int64_t> temporal_threshold = std::nullopt) const;

 private:
  const TrajectorySet* dataset_;
  std::vector<std::string> identities_;
  std::unordered_map<std::string, std::vector<std::size_t>> records_by_identity_;
};

// Graph over the first batch of a fresh epoch partition.
AssociationGraph sample_batch(const TrajectorySet& dataset, std::size_t batch_size_ids,
                              std::mt19937_64& rng,
                              std::optional<std::int64_t> temporal_threshold = std::nullopt);

// Linear warmup from 0 over warmup_epochs, base_lr until decay_epoch, then
// base_lr * decay_factor. `epoch_progress` counts fractional epochs.
double lr_schedule(const TrainConfig& config, double epoch_progress);

// p <- p - lr * g on every weight and bias.
void sgd_step(ModelParameters& params, const ModelGradients& grads, double lr);

struct BatchLogEntry {
  int epoch = 0;
  int batch = 0;
  double loss_total = 0.0;
  double loss_wce = 0.0;
  double fpr_soft = 0.0;
  double fpr_hard = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double lr = 0.0;
};

nlohmann::json to_json(const BatchLogEntry& entry);

struct TrainResult {
  ModelParameters params;
  std::vector<BatchLogEntry> log;
};

// Called after every epoch with the 0-based epoch index.
using EpochCallback = std::function<void(int epoch, const ModelParameters& params)>;

TrainResult train(const TrajectorySet& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch_end = {});

// As train(), starting from `initial` instead of init_parameters().
TrainResult train_from(const ModelParameters& initial, const TrajectorySet& dataset,
                       const TrainConfig& config, const EpochCallback& on_epoch_end = {});

// Edge-count weighted mean of a log field over one epoch.
double epoch_mean(const std::vector<BatchLogEntry>& log, int epoch,
                  double BatchLogEntry::*field);

}  // namespace mtmc
