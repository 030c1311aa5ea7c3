#include "mtmc/experiment.hpp"

#include "mtmc/clustering.hpp"

namespace mtmc {

ExperimentResult evaluate_model(const ModelParameters& model, const TrajectorySet& eval_set,
                                std::optional<std::int64_t> temporal_threshold) {
  ExperimentResult r;
  r.inference = infer(model, eval_set, temporal_threshold);
  if (r.inference.probabilities.size() > 0) {
    r.predicted_positive_edges = prune_edges(r.inference.probabilities).size();
  }
  r.metrics = id_metrics(r.inference.trajectories, eval_set);
  return r;
}

ExperimentResult run_experiment(const TrajectorySet& train_set, const TrajectorySet& eval_set,
                                const TrainConfig& config,
                                std::optional<std::optional<std::int64_t>> inference_threshold) {
  TrainResult trained = train(train_set, config);
  ExperimentResult r = evaluate_model(
      trained.params, eval_set,
      inference_threshold ? *inference_threshold : config.temporal_threshold);
  r.final_epoch_fpr_hard = epoch_mean(trained.log, config.epochs - 1, &BatchLogEntry::fpr_hard);
  r.training = std::move(trained);
  return r;
}

}  // namespace mtmc
