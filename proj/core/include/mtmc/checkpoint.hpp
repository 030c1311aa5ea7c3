#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "mtmc/gcn.hpp"

namespace mtmc {

// Checkpoint layout:
//   {"dim": D,
//    "blocks": {"node_encoder": [{"w": [[...]], "b": [...]}, ...], ...},
//    "config": {...}}
// "config" is free-form run metadata echoed back on load.
struct Checkpoint {
  ModelParameters params;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json checkpoint_to_json(const ModelParameters& params,
                                  const nlohmann::json& config = nlohmann::json::object());

// Rebuilds the layer widths from the stored matrices and validates every
// dimension chain.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const ModelParameters& params,
                     const nlohmann::json& config = nlohmann::json::object());
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mtmc
