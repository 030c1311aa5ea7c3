#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtmc/synthetic.hpp"
#include "mtmc/training.hpp"

namespace mtmc {

// Fully resolved settings of one CLI invocation. Values are layered
// defaults < config file < command-line flags; `provenance` records which
// layer supplied each field ("default", "config" or "flag").
struct RunConfig {
  TrainConfig train;
  SynthConfig synth;
  int heldout_identities = 0;
  std::map<std::string, std::string> provenance;

  // Flat object of every field plus a "provenance" member.
  nlohmann::json to_json() const;
};

// Names of all configurable fields, in a stable order.
const std::vector<std::string>& run_config_fields();

// `file_values` may be a plain config object or any artifact embedding one
// under "config". Unknown fields and type errors throw mtmc::Error naming the
// field.
RunConfig resolve_run_config(const nlohmann::json& file_values, const nlohmann::json& flag_values);

}  // namespace mtmc
