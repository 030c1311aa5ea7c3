#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mtmc/association_graph.hpp"
#include "mtmc/mlp.hpp"

namespace mtmc {

// Layer widths of the five learnable blocks. Defaults give the reference
// architecture: node encoder D->1024->512->128->32, edge encoder 2->4->4,
// node update (32+4)->32, edge update (32+32+4)->4, classifier 4->2.
struct ModelConfig {
  int dim = kDefaultDescriptorDim;
  std::vector<int> node_hidden{1024, 512, 128};
  int node_embedding = 32;
  std::vector<int> edge_hidden{4};
  int edge_embedding = 4;
  int edge_state = 4;
  int message = 32;

  MlpSpec node_encoder_spec() const;
  MlpSpec edge_encoder_spec() const;
  MlpSpec node_update_spec() const;
  MlpSpec edge_update_spec() const;
  MlpSpec classifier_spec() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline constexpr int kEdgeRawDim = 2;
inline constexpr int kClassCount = 2;

struct ModelParameters {
  ModelConfig config;
  Mlp node_encoder;  // descriptor -> initial node embedding
  Mlp edge_encoder;  // (euclidean, cosine distance) -> initial edge embedding
  Mlp node_update;   // [own node embedding, edge state] -> message
  Mlp edge_update;   // [node a, node b, edge embedding] -> edge state
  Mlp classifier;    // edge state -> class probabilities

  std::size_t parameter_count() const;

  // Visits the blocks in checkpoint order with their serialized names.
  void for_each_block(const std::function<void(std::string_view, Mlp&)>& fn);
  void for_each_block(const std::function<void(std::string_view, const Mlp&)>& fn) const;
};

// Gradients share the parameter layout.
using ModelGradients = ModelParameters;

ModelParameters init_parameters(const ModelConfig& config, std::uint64_t seed);
ModelParameters zeros_like(const ModelParameters& params);

// Throws unless every block chains and the blocks fit together.
void validate_parameters(const ModelParameters& params);

// Result of one message-passing round over an AssociationGraph.
struct ForwardTrace {
  Eigen::MatrixXd node_embedding;  // h0 per node
  Eigen::MatrixXd edge_embedding;  // h0 per edge
  Eigen::MatrixXd edge_state;      // hidden edge state per edge
  Eigen::MatrixXd node_state;      // summed messages per node
  Eigen::MatrixXd logits;          // classifier pre-softmax
  Eigen::MatrixXd probabilities;   // per-edge (p0, p1)

  // Messages, one row per (receiving node, incident edge), sorted by node
  // then by neighbor index.
  std::vector<std::uint32_t> message_node;
  std::vector<std::uint32_t> message_edge;

  MlpTrace node_encoder;
  MlpTrace edge_encoder;
  MlpTrace edge_update;
  MlpTrace node_update;
  MlpTrace classifier;
};

ForwardTrace forward(const AssociationGraph& graph, const ModelParameters& params);

// Upstream gradients for backward(). Empty matrices are treated as zero.
struct BackwardSeed {
  Eigen::MatrixXd d_probabilities;  // edges x 2
  Eigen::MatrixXd d_logits;         // edges x 2, added after the softmax Jacobian
  Eigen::MatrixXd d_node_state;     // nodes x message
};

ModelGradients backward(const AssociationGraph& graph, const ModelParameters& params,
                        const ForwardTrace& trace, const BackwardSeed& seed);

}  // namespace mtmc
