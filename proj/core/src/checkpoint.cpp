#include "mtmc/checkpoint.hpp"

#include <fstream>

#include "mtmc/error.hpp"

namespace mtmc {

using nlohmann::json;

namespace {

json layer_to_json(const DenseLayer& layer) {
  json w = json::array();
  for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(layer.weight.cols()));
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) row[c] = layer.weight(r, c);
    w.push_back(std::move(row));
  }
  return {{"w", std::move(w)},
          {"b", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}};
}

DenseLayer layer_from_json(const json& j, Activation activation, const std::string& where) {
  if (!j.is_object() || !j.contains("w") || !j.contains("b")) {
    throw Error(where + ": layer needs 'w' and 'b'");
  }
  const json& w = j.at("w");
  const json& b = j.at("b");
  if (!w.is_array() || w.empty() || !b.is_array()) throw Error(where + ": malformed layer");
  const auto rows = static_cast<Eigen::Index>(w.size());
  const auto cols = static_cast<Eigen::Index>(w.front().size());
  DenseLayer layer;
  layer.activation = activation;
  layer.weight.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = w[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(where + ": ragged weight matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) layer.weight(r, c) = row[c].get<double>();
  }
  if (static_cast<Eigen::Index>(b.size()) != rows) {
    throw Error(where + ": bias length " + std::to_string(b.size()) + " != " + std::to_string(rows));
  }
  layer.bias.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) layer.bias[r] = b[static_cast<std::size_t>(r)].get<double>();
  return layer;
}

}  // namespace

json checkpoint_to_json(const ModelParameters& params, const json& config) {
  json blocks = json::object();
  params.for_each_block([&](std::string_view name, const Mlp& mlp) {
    json layers = json::array();
    for (const auto& l : mlp.layers) layers.push_back(layer_to_json(l));
    blocks[std::string(name)] = std::move(layers);
  });
  return {{"dim", params.config.dim}, {"blocks", std::move(blocks)}, {"config", config}};
}

Checkpoint checkpoint_from_json(const json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j.contains("dim")) {
    throw Error("checkpoint needs 'dim' and 'blocks'");
  }
  const json& blocks = j.at("blocks");
  Checkpoint ck;
  ModelParameters& p = ck.params;
  p.for_each_block([&](std::string_view name, Mlp& mlp) {
    const std::string key(name);
    if (!blocks.contains(key) || !blocks.at(key).is_array() || blocks.at(key).empty()) {
      throw Error("checkpoint is missing block '" + key + "'");
    }
    const json& layers = blocks.at(key);
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const bool last = l + 1 == layers.size();
      const Activation act =
          (key == "classifier" && last) ? Activation::kSoftmax : Activation::kRelu;
      mlp.layers.push_back(
          layer_from_json(layers[l], act, "block '" + key + "' layer " + std::to_string(l)));
    }
    validate_spec(mlp.spec());
  });

  ModelConfig& c = p.config;
  c.dim = j.at("dim").get<int>();
  if (p.node_encoder.in_dim() != c.dim) {
    throw Error("checkpoint dim " + std::to_string(c.dim) + " does not match node_encoder input " +
                std::to_string(p.node_encoder.in_dim()));
  }
  c.node_hidden.clear();
  for (std::size_t l = 0; l + 1 < p.node_encoder.layers.size(); ++l) {
    c.node_hidden.push_back(p.node_encoder.layers[l].out_dim());
  }
  c.node_embedding = p.node_encoder.out_dim();
  c.edge_hidden.clear();
  for (std::size_t l = 0; l + 1 < p.edge_encoder.layers.size(); ++l) {
    c.edge_hidden.push_back(p.edge_encoder.layers[l].out_dim());
  }
  c.edge_embedding = p.edge_encoder.out_dim();
  c.edge_state = p.edge_update.out_dim();
  c.message = p.node_update.out_dim();
  validate_parameters(p);
  if (j.contains("config")) ck.config = j.at("config");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParameters& params,
                     const json& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path.string() + "'");
  out << checkpoint_to_json(params, config).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint '" + path.string() + "'");
  try {
    return checkpoint_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed checkpoint: " + e.what());
  }
}

}  // namespace mtmc
