#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "mtmc/inference.hpp"
#include "mtmc/metrics.hpp"
#include "mtmc/training.hpp"

namespace mtmc {

struct ExperimentResult {
  TrainResult training;
  InferenceResult inference;
  MetricsReport metrics;
  double final_epoch_fpr_hard = 0.0;  // edge-weighted mean over the last epoch
  std::size_t predicted_positive_edges = 0;  // edges kept before refinement
};

// train -> infer -> evaluate. Inference uses config.temporal_threshold unless
// `inference_threshold` is given.
ExperimentResult run_experiment(const TrajectorySet& train_set, const TrajectorySet& eval_set,
                                const TrainConfig& config,
                                std::optional<std::optional<std::int64_t>> inference_threshold = {});

// Inference and evaluation with an already trained model.
ExperimentResult evaluate_model(const ModelParameters& model, const TrajectorySet& eval_set,
                                std::optional<std::int64_t> temporal_threshold);

}  // namespace mtmc
