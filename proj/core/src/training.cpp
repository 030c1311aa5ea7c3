#include "mtmc/training.hpp"

#include <algorithm>
#include <cmath>

#include "mtmc/error.hpp"

namespace mtmc {

void TrainConfig::validate() const {
  if (batch_size_ids < 2) throw Error("batch_size must be >= 2");
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw Error("lr must be positive");
  if (warmup_epochs < 0 || warmup_epochs >= decay_epoch || decay_epoch > epochs) {
    throw Error("schedule requires warmup_epochs < decay_epoch <= epochs");
  }
  if (!(decay_factor > 0.0)) throw Error("decay_factor must be positive");
  if (descriptor_noise_sigma < 0.0) throw Error("descriptor_noise_sigma must be >= 0");
  if (temporal_threshold && *temporal_threshold < 0) {
    throw Error("temporal_threshold must be >= 0");
  }
}

IdentityBatcher::IdentityBatcher(const TrajectorySet& dataset) : dataset_(&dataset) {
  if (!dataset.fully_labeled()) throw Error("training data must carry identity_id on every record");
  identities_ = dataset.identities();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    records_by_identity_[*dataset[i].identity_id].push_back(i);
  }
}

std::vector<std::vector<std::string>> IdentityBatcher::epoch_partition(std::size_t batch_size,
                                                                       std::mt19937_64& rng) const {
  if (batch_size == 0) throw Error("batch size must be positive");
  std::vector<std::string> order = identities_;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::string>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const auto end = std::min(order.size(), i + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

AssociationGraph IdentityBatcher::batch_graph(std::span<const std::string> batch,
                                              std::optional<std::int64_t> temporal_threshold) const {
  std::vector<std::size_t> records;
  for (const auto& id : batch) {
    auto it = records_by_identity_.find(id);
    if (it == records_by_identity_.end()) throw Error("unknown identity '" + id + "'");
    records.insert(records.end(), it->second.begin(), it->second.end());
  }
  return build_graph(*dataset_, records, temporal_threshold);
}

AssociationGraph sample_batch(const TrajectorySet& dataset, std::size_t batch_size_ids,
                              std::mt19937_64& rng, std::optional<std::int64_t> temporal_threshold) {
  IdentityBatcher batcher(dataset);
  const auto batches = batcher.epoch_partition(batch_size_ids, rng);
  if (batches.empty()) throw Error("sample_batch: dataset has no identities");
  return batcher.batch_graph(batches.front(), temporal_threshold);
}

double lr_schedule(const TrainConfig& config, double epoch_progress) {
  if (epoch_progress < config.warmup_epochs) {
    return config.base_lr * std::max(0.0, epoch_progress) / config.warmup_epochs;
  }
  if (epoch_progress < config.decay_epoch) return config.base_lr;
  return config.base_lr * config.decay_factor;
}

void sgd_step(ModelParameters& params, const ModelGradients& grads, double lr) {
  std::vector<const Mlp*> g;
  grads.for_each_block([&](std::string_view, const Mlp& m) { g.push_back(&m); });
  std::size_t k = 0;
  params.for_each_block([&](std::string_view name, Mlp& m) {
    const Mlp& gm = *g[k++];
    if (gm.layers.size() != m.layers.size()) {
      throw Error("sgd_step: gradient shape mismatch in '" + std::string(name) + "'");
    }
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      auto& p = m.layers[l];
      const auto& d = gm.layers[l];
      if (p.weight.rows() != d.weight.rows() || p.weight.cols() != d.weight.cols() ||
          p.bias.size() != d.bias.size()) {
        throw Error("sgd_step: gradient shape mismatch in '" + std::string(name) + "'");
      }
      p.weight -= lr * d.weight;
      p.bias -= lr * d.bias;
    }
  });
}

nlohmann::json to_json(const BatchLogEntry& e) {
  return {{"epoch", e.epoch},        {"batch", e.batch},       {"loss_total", e.loss_total},
          {"loss_wce", e.loss_wce},  {"fpr_soft", e.fpr_soft}, {"fpr_hard", e.fpr_hard},
          {"n0", e.n0},              {"n1", e.n1},             {"lr", e.lr}};
}

namespace {

void add_descriptor_noise(AssociationGraph& g, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, sigma / std::sqrt(static_cast<double>(g.dim())));
  for (Eigen::Index r = 0; r < g.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.features.cols(); ++c) g.features(r, c) += noise(rng);
  }
  recompute_edge_features(g);
}

}  // namespace

TrainResult train(const TrajectorySet& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch_end) {
  return train_from(init_parameters(config.model, config.seed), dataset, config, on_epoch_end);
}

TrainResult train_from(const ModelParameters& initial, const TrajectorySet& dataset,
                       const TrainConfig& config, const EpochCallback& on_epoch_end) {
  config.validate();
  validate_parameters(initial);
  if (!(initial.config == config.model)) throw Error("initial parameters do not match the model config");
  if (config.model.dim != dataset.dim()) {
    throw Error("model dim " + std::to_string(config.model.dim) + " does not match data dim " +
                std::to_string(dataset.dim()));
  }
  IdentityBatcher batcher(dataset);
  if (batcher.identities().empty()) throw Error("training data has no identities");

  TrainResult result;
  result.params = initial;
  // Sampling stream, kept apart from the initialization stream.
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    std::uint32_t{0x4d504c45}};
  std::mt19937_64 rng(seq);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = batcher.epoch_partition(config.batch_size_ids, rng);
    const auto nb = static_cast<double>(batches.size());
    for (std::size_t b = 0; b < batches.size(); ++b) {
      AssociationGraph graph = batcher.batch_graph(batches[b], config.temporal_threshold);
      if (config.descriptor_noise_sigma > 0.0) {
        add_descriptor_noise(graph, config.descriptor_noise_sigma, rng);
      }
      BatchLogEntry entry;
      entry.epoch = epoch;
      entry.batch = static_cast<int>(b);
      entry.lr = lr_schedule(config, epoch + (static_cast<double>(b) + 1.0) / nb);
      if (graph.edge_count() > 0) {
        const ForwardTrace trace = forward(graph, result.params);
        const LossBreakdown loss = total_loss_from_logits(trace.logits, *graph.labels, config.loss);
        if (!std::isfinite(loss.total)) {
          throw Error("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                      std::to_string(b));
        }
        const ModelGradients grads = backward(graph, result.params, trace,
                                              {loss.grad_probabilities, loss.grad_logits, {}});
        sgd_step(result.params, grads, entry.lr);
        entry.loss_total = loss.total;
        entry.loss_wce = loss.weighted_ce;
        entry.fpr_soft = loss.fpr;
        entry.fpr_hard = loss.fpr_hard;
        entry.n0 = loss.counts.negatives;
        entry.n1 = loss.counts.positives;
      }
      result.log.push_back(entry);
    }
    if (on_epoch_end) on_epoch_end(epoch, result.params);
  }
  return result;
}

double epoch_mean(const std::vector<BatchLogEntry>& log, int epoch, double BatchLogEntry::*field) {
  double sum = 0.0;
  double weight = 0.0;
  for (const auto& e : log) {
    if (e.epoch != epoch) continue;
    const auto w = static_cast<double>(e.n0 + e.n1);
    sum += w * (e.*field);
    weight += w;
  }
  return weight > 0.0 ? sum / weight : 0.0;
}

}  // namespace mtmc
