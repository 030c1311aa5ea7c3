#include "mtmc/run_config.hpp"

#include <functional>

#include "mtmc/error.hpp"

namespace mtmc {

using nlohmann::json;

namespace {

struct Field {
  std::string name;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <typename T>
T as(const json& v, const std::string& name) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw Error("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw Error("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
          throw Error("");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw Error("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw Error("config field '" + name + "' has an invalid value: " + v.dump());
  }
}

template <typename T>
Field scalar(std::string name, T RunConfig::*outer) {
  return {name, [outer](const RunConfig& c) { return json(c.*outer); },
          [outer, name](RunConfig& c, const json& v) { c.*outer = as<T>(v, name); }};
}

template <typename S, typename T>
Field nested(std::string name, S RunConfig::*outer, T S::*inner) {
  return {name, [outer, inner](const RunConfig& c) { return json((c.*outer).*inner); },
          [outer, inner, name](RunConfig& c, const json& v) {
            (c.*outer).*inner = as<T>(v, name);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(nested("batch_size", &RunConfig::train, &TrainConfig::batch_size_ids));
    f.push_back(nested("epochs", &RunConfig::train, &TrainConfig::epochs));
    f.push_back(nested("lr", &RunConfig::train, &TrainConfig::base_lr));
    f.push_back(nested("warmup_epochs", &RunConfig::train, &TrainConfig::warmup_epochs));
    f.push_back(nested("decay_epoch", &RunConfig::train, &TrainConfig::decay_epoch));
    f.push_back(nested("decay_factor", &RunConfig::train, &TrainConfig::decay_factor));
    f.push_back(nested("descriptor_noise_sigma", &RunConfig::train,
                       &TrainConfig::descriptor_noise_sigma));
    f.push_back({"seed", [](const RunConfig& c) { return json(c.train.seed); },
                 [](RunConfig& c, const json& v) {
                   c.train.seed = as<std::uint64_t>(v, "seed");
                   c.synth.seed = c.train.seed;
                 }});
    f.push_back({"temporal_threshold",
                 [](const RunConfig& c) {
                   return c.train.temporal_threshold ? json(*c.train.temporal_threshold) : json();
                 },
                 [](RunConfig& c, const json& v) {
                   if (v.is_null()) {
                     c.train.temporal_threshold.reset();
                   } else {
                     c.train.temporal_threshold = as<std::int64_t>(v, "temporal_threshold");
                   }
                 }});
    f.push_back({"dim", [](const RunConfig& c) { return json(c.train.model.dim); },
                 [](RunConfig& c, const json& v) {
                   c.train.model.dim = as<int>(v, "dim");
                   c.synth.dim = c.train.model.dim;
                 }});
    f.push_back({"node_hidden", [](const RunConfig& c) { return json(c.train.model.node_hidden); },
                 [](RunConfig& c, const json& v) {
                   if (!v.is_array()) throw Error("config field 'node_hidden' must be an array");
                   std::vector<int> widths;
                   for (const auto& w : v) widths.push_back(as<int>(w, "node_hidden"));
                   c.train.model.node_hidden = std::move(widths);
                 }});
    f.push_back({"class_weighting",
                 [](const RunConfig& c) { return json(c.train.loss.class_weighting); },
                 [](RunConfig& c, const json& v) {
                   c.train.loss.class_weighting = as<bool>(v, "class_weighting");
                 }});
    f.push_back({"fpr_term", [](const RunConfig& c) { return json(c.train.loss.fpr_term); },
                 [](RunConfig& c, const json& v) { c.train.loss.fpr_term = as<bool>(v, "fpr_term"); }});
    f.push_back(nested("identities", &RunConfig::synth, &SynthConfig::identities));
    f.push_back(nested("cameras", &RunConfig::synth, &SynthConfig::cameras));
    f.push_back(nested("presence_prob", &RunConfig::synth, &SynthConfig::presence_prob));
    f.push_back(nested("intra_noise_sigma", &RunConfig::synth, &SynthConfig::intra_noise_sigma));
    f.push_back(nested("inter_class_min_sep", &RunConfig::synth, &SynthConfig::inter_class_min_sep));
    f.push_back(nested("frames_per_camera", &RunConfig::synth, &SynthConfig::frames_per_camera));
    f.push_back(nested("unsync_max_offset", &RunConfig::synth, &SynthConfig::unsync_max_offset));
    f.push_back(nested("min_track_frames", &RunConfig::synth, &SynthConfig::min_track_frames));
    f.push_back(nested("max_track_frames", &RunConfig::synth, &SynthConfig::max_track_frames));
    f.push_back(nested("transit_max_frames", &RunConfig::synth, &SynthConfig::transit_max_frames));
    f.push_back(scalar("heldout_identities", &RunConfig::heldout_identities));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& name) {
  for (const auto& f : fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

void apply(RunConfig& c, const json& values, const char* layer) {
  if (values.is_null()) return;
  if (!values.is_object()) throw Error(std::string(layer) + " values must be a JSON object");
  for (const auto& [key, value] : values.items()) {
    if (key == "provenance") continue;
    const Field* f = find_field(key);
    if (!f) throw Error("unknown config field '" + key + "'");
    f->set(c, value);
    c.provenance[key] = layer;
  }
}

}  // namespace

const std::vector<std::string>& run_config_fields() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& f : fields()) n.push_back(f.name);
    return n;
  }();
  return names;
}

json RunConfig::to_json() const {
  json out = json::object();
  for (const auto& f : fields()) out[f.name] = f.get(*this);
  out["provenance"] = provenance;
  return out;
}

RunConfig resolve_run_config(const json& file_values, const json& flag_values) {
  RunConfig c;
  c.train.model.dim = c.synth.dim;
  for (const auto& f : fields()) c.provenance[f.name] = "default";

  json file = file_values;
  // Artifacts (checkpoints, cluster files, metrics) embed their config.
  while (file.is_object() && file.contains("config") && file.at("config").is_object()) {
    file = json(file.at("config"));
  }
  apply(c, file, "config");
  apply(c, flag_values, "flag");
  return c;
}

}  // namespace mtmc
