// mtmc: command-line driver for synthetic data generation, training,
// inference, evaluation and ablation sweeps.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mtmc/checkpoint.hpp"
#include "mtmc/error.hpp"
#include "mtmc/experiment.hpp"
#include "mtmc/inference.hpp"
#include "mtmc/metrics.hpp"
#include "mtmc/run_config.hpp"
#include "mtmc/synthetic.hpp"
#include "mtmc/training.hpp"
#include "mtmc/trajectory.hpp"

namespace {

using nlohmann::json;

// Flags shared by every subcommand. Only flags actually passed end up in the
// override layer.
struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;
  int epochs = 0;
  double lr = 0.0;
  std::string temporal_threshold;
  bool no_weighting = false;
  bool no_fpr = false;
  int dim = 0;
  std::vector<std::string> sets;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* lr_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* dim_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file or any artifact embedding one")
        ->check(CLI::ExistingFile);
    seed_opt = app.add_option("--seed", seed, "Random seed");
    batch_opt = app.add_option("--batch-size", batch_size, "Identities per training batch");
    epochs_opt = app.add_option("--epochs", epochs, "Training epochs");
    lr_opt = app.add_option("--lr", lr, "Base learning rate");
    threshold_opt = app.add_option("--temporal-threshold", temporal_threshold,
                                   "Max frame gap between connected trajectories, or 'none'");
    app.add_flag("--no-weighting", no_weighting, "Disable batch-wise class weighting");
    app.add_flag("--no-fpr", no_fpr, "Drop the false-positive-rate loss term");
    dim_opt = app.add_option("--dim", dim, "Descriptor dimension");
    app.add_option("--set", sets, "Override any config field: key=value (JSON value)");
  }

  json overrides() const {
    json o = json::object();
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw mtmc::Error("--set expects key=value, got '" + kv + "'");
      const std::string value = kv.substr(eq + 1);
      json parsed = json::parse(value, nullptr, false);
      o[kv.substr(0, eq)] = parsed.is_discarded() ? json(value) : parsed;
    }
    if (*seed_opt) o["seed"] = seed;
    if (*batch_opt) o["batch_size"] = batch_size;
    if (*epochs_opt) o["epochs"] = epochs;
    if (*lr_opt) o["lr"] = lr;
    if (*threshold_opt) {
      if (temporal_threshold == "none") {
        o["temporal_threshold"] = nullptr;
      } else {
        try {
          o["temporal_threshold"] = std::stoll(temporal_threshold);
        } catch (const std::exception&) {
          throw mtmc::Error("--temporal-threshold expects an integer or 'none'");
        }
      }
    }
    if (no_weighting) o["class_weighting"] = false;
    if (no_fpr) o["fpr_term"] = false;
    if (*dim_opt) o["dim"] = dim;
    return o;
  }

  mtmc::RunConfig resolve(const json& fallback_file = json()) const {
    json file = fallback_file;
    if (!config_path.empty()) file = read_json(config_path);
    mtmc::RunConfig rc = mtmc::resolve_run_config(file, overrides());
    return rc;
  }

  static json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mtmc::Error("cannot open '" + path + "'");
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw mtmc::Error(path + ": malformed JSON: " + e.what());
    }
  }
};

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw mtmc::Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// Model width follows the data unless --dim / config pinned it.
void adopt_data_dim(mtmc::RunConfig& rc, const mtmc::TrajectorySet& data) {
  if (rc.provenance["dim"] == "default") {
    rc.train.model.dim = data.dim();
    rc.synth.dim = data.dim();
  }
}

int cmd_synth(const CommonFlags& flags, const std::string& out, const std::string& heldout_out) {
  mtmc::RunConfig rc = flags.resolve();
  rc.synth.seed = rc.train.seed;
  const mtmc::TrajectorySet all = mtmc::generate_scenario(rc.synth);
  const json echo = {{"config", rc.to_json()}};
  if (rc.heldout_identities <= 0) {
    mtmc::save_trajectories(out, all, echo);
    std::cout << "wrote " << all.size() << " trajectories to " << out << '\n';
    return 0;
  }
  if (heldout_out.empty()) throw mtmc::Error("heldout_identities > 0 requires --heldout-out");
  const auto ids = all.identities();
  if (static_cast<std::size_t>(rc.heldout_identities) >= ids.size()) {
    throw mtmc::Error("heldout_identities must be smaller than identities");
  }
  const auto split = ids.size() - static_cast<std::size_t>(rc.heldout_identities);
  const std::vector<std::string> train_ids(ids.begin(), ids.begin() + static_cast<long>(split));
  const std::vector<std::string> test_ids(ids.begin() + static_cast<long>(split), ids.end());
  const auto train_set = all.select_identities(train_ids);
  const auto test_set = all.select_identities(test_ids);
  mtmc::save_trajectories(out, train_set, echo);
  mtmc::save_trajectories(heldout_out, test_set, echo);
  std::cout << "wrote " << train_set.size() << " trajectories to " << out << " and "
            << test_set.size() << " to " << heldout_out << '\n';
  return 0;
}

int cmd_train(const CommonFlags& flags, const std::string& data, const std::string& out,
              std::string log_path) {
  const mtmc::TrajectorySet set = mtmc::load_trajectories(data);
  mtmc::RunConfig rc = flags.resolve();
  adopt_data_dim(rc, set);
  const json echo = rc.to_json();

  if (log_path.empty()) log_path = out + ".log.jsonl";
  std::ofstream log(log_path);
  if (!log) throw mtmc::Error("cannot write '" + log_path + "'");

  const mtmc::TrainResult result = mtmc::train(set, rc.train);
  log << json{{"mtmc_log_header", 1}, {"config", echo}}.dump() << '\n';
  for (const auto& e : result.log) log << mtmc::to_json(e).dump() << '\n';
  mtmc::save_checkpoint(out, result.params, echo);

  const auto& last = result.log.back();
  std::cout << "trained " << result.params.parameter_count() << " parameters for "
            << rc.train.epochs << " epochs; final batch loss " << last.loss_total << '\n'
            << "checkpoint: " << out << "\nlog: " << log_path << '\n';
  return 0;
}

int cmd_infer(const CommonFlags& flags, const std::string& model_path, const std::string& data,
              const std::string& out) {
  const mtmc::Checkpoint ck = mtmc::load_checkpoint(model_path);
  const mtmc::RunConfig rc = flags.resolve(json{{"config", ck.config}});
  const mtmc::TrajectorySet set = mtmc::load_trajectories(data);
  const mtmc::InferenceResult r = mtmc::infer(ck.params, set, rc.train.temporal_threshold);
  mtmc::save_clusters(out, r.trajectories, rc.to_json());
  std::size_t mc = 0;
  for (const auto& t : r.trajectories) mc += t.multi_camera;
  std::cout << r.graph.edge_count() << " candidate edges, " << r.clusters.kept_edges.size()
            << " kept; " << r.trajectories.size() << " clusters (" << mc
            << " multi-camera) written to " << out << '\n';
  return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& data, const std::string& pred,
             const std::string& out) {
  const mtmc::RunConfig rc = flags.resolve();
  const mtmc::TrajectorySet gt = mtmc::load_trajectories(data);
  const auto predicted = mtmc::load_clusters(pred);
  const mtmc::MetricsReport m = mtmc::id_metrics(predicted, gt);
  const std::vector<std::pair<std::string, mtmc::MetricsReport>> rows{{"eval", m}};
  std::cout << mtmc::format_metrics_table(rows);
  if (m.degenerate) std::cout << "warning: no multi-camera trajectories to score\n";
  if (!out.empty()) {
    json j = mtmc::to_json(m);
    j["config"] = rc.to_json();
    write_json(out, j);
  }
  return 0;
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw mtmc::Error("--values is empty");
  return out;
}

int cmd_ablate(const CommonFlags& flags, const std::string& param, const std::string& values,
               const std::string& data, std::string eval_data, const std::string& out) {
  const mtmc::TrajectorySet train_set = mtmc::load_trajectories(data);
  if (eval_data.empty()) eval_data = data;
  const mtmc::TrajectorySet eval_set = mtmc::load_trajectories(eval_data);
  mtmc::RunConfig rc = flags.resolve();
  adopt_data_dim(rc, train_set);

  std::vector<std::pair<std::string, mtmc::MetricsReport>> rows;
  json results = json::array();
  const auto record = [&](const std::string& label, const mtmc::ExperimentResult& r,
                          const mtmc::TrainConfig& cfg) {
    rows.emplace_back(label, r.metrics);
    json row = mtmc::to_json(r.metrics);
    row["value"] = label;
    row["edges"] = r.inference.graph.edge_count();
    row["predicted_positive_edges"] = r.predicted_positive_edges;
    row["final_epoch_fpr_hard"] = r.final_epoch_fpr_hard;
    row["class_weighting"] = cfg.loss.class_weighting;
    row["fpr_term"] = cfg.loss.fpr_term;
    results.push_back(std::move(row));
  };

  if (param == "batch_size") {
    for (const auto& v : split_values(values)) {
      mtmc::TrainConfig cfg = rc.train;
      cfg.batch_size_ids = std::stoul(v);
      record(v, mtmc::run_experiment(train_set, eval_set, cfg), cfg);
    }
  } else if (param == "temporal_threshold") {
    // One model, inference graphs restricted at each threshold.
    const mtmc::TrainResult trained = mtmc::train(train_set, rc.train);
    for (const auto& v : split_values(values)) {
      std::optional<std::int64_t> t;
      if (v != "none" && v != "full") t = std::stoll(v);
      mtmc::ExperimentResult r = mtmc::evaluate_model(trained.params, eval_set, t);
      record(v, r, rc.train);
    }
  } else if (param == "loss_terms") {
    for (const auto& v : split_values(values)) {
      mtmc::TrainConfig cfg = rc.train;
      if (v == "none") {
        cfg.loss = {false, false};
      } else if (v == "weight") {
        cfg.loss = {true, false};
      } else if (v == "weight+fpr") {
        cfg.loss = {true, true};
      } else if (v == "fpr") {
        cfg.loss = {false, true};
      } else {
        throw mtmc::Error("loss_terms values are none, weight, fpr, weight+fpr; got '" + v + "'");
      }
      record(v, mtmc::run_experiment(train_set, eval_set, cfg), cfg);
    }
  } else {
    throw mtmc::Error("--param must be batch_size, temporal_threshold or loss_terms");
  }

  std::cout << "ablation over " << param << '\n' << mtmc::format_metrics_table(rows);
  if (!out.empty()) {
    write_json(out, {{"param", param}, {"results", results}, {"config", rc.to_json()}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-camera trajectory association with a graph convolutional network"};
  app.require_subcommand(1);

  CommonFlags synth_flags, train_flags, infer_flags, eval_flags, ablate_flags;
  std::string out, heldout_out, data, model, log_path, pred, param, values, eval_data;

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic scenario");
  synth_flags.attach(*synth);
  synth->add_option("--out", out, "Output trajectory file (training identities)")->required();
  synth->add_option("--heldout-out", heldout_out, "Output file for held-out identities");

  auto* train = app.add_subcommand("train", "Train the association model");
  train_flags.attach(*train);
  train->add_option("--data", data, "Labeled trajectory file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Output checkpoint")->required();
  train->add_option("--log", log_path, "Training log (default: <out>.log.jsonl)");

  auto* infer = app.add_subcommand("infer", "Cluster trajectories into global trajectories");
  infer_flags.attach(*infer);
  infer->add_option("--model", model, "Checkpoint")->required()->check(CLI::ExistingFile);
  infer->add_option("--data", data, "Trajectory file")->required()->check(CLI::ExistingFile);
  infer->add_option("--out", out, "Output cluster file")->required();

  auto* eval = app.add_subcommand("eval", "Score predicted clusters with IDP/IDR/IDF1");
  eval_flags.attach(*eval);
  eval->add_option("--data", data, "Ground-truth trajectory file")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", pred, "Predicted cluster file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Metrics JSON output");

  auto* ablate = app.add_subcommand("ablate", "Sweep one setting and report metrics per value");
  ablate_flags.attach(*ablate);
  ablate->add_option("--param", param, "batch_size | temporal_threshold | loss_terms")->required();
  ablate->add_option("--values", values, "Comma-separated values")->required();
  ablate->add_option("--data", data, "Training trajectory file")->required()->check(CLI::ExistingFile);
  ablate->add_option("--eval-data", eval_data, "Evaluation file (default: --data)")
      ->check(CLI::ExistingFile);
  ablate->add_option("--out", out, "Combined JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_flags, out, heldout_out);
    if (*train) return cmd_train(train_flags, data, out, log_path);
    if (*infer) return cmd_infer(infer_flags, model, data, out);
    if (*eval) return cmd_eval(eval_flags, data, pred, out);
    if (*ablate) return cmd_ablate(ablate_flags, param, values, data, eval_data, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
