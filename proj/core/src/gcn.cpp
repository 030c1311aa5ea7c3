#include "mtmc/gcn.hpp"

#include <random>

#include "mtmc/error.hpp"

namespace mtmc {

namespace {

MlpSpec relu_chain(int in, const std::vector<int>& hidden, int out) {
  MlpSpec spec;
  int prev = in;
  for (int h : hidden) {
    spec.push_back({prev, h, Activation::kRelu});
    prev = h;
  }
  spec.push_back({prev, out, Activation::kRelu});
  return spec;
}

void check_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.size() == 0) return;
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(std::string("backward: ") + what + " has shape " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
}

}  // namespace

MlpSpec ModelConfig::node_encoder_spec() const { return relu_chain(dim, node_hidden, node_embedding); }

MlpSpec ModelConfig::edge_encoder_spec() const {
  return relu_chain(kEdgeRawDim, edge_hidden, edge_embedding);
}

MlpSpec ModelConfig::node_update_spec() const {
  return {{node_embedding + edge_state, message, Activation::kRelu}};
}

MlpSpec ModelConfig::edge_update_spec() const {
  return {{2 * node_embedding + edge_embedding, edge_state, Activation::kRelu}};
}

MlpSpec ModelConfig::classifier_spec() const {
  return {{edge_state, kClassCount, Activation::kSoftmax}};
}

std::size_t ModelParameters::parameter_count() const {
  std::size_t n = 0;
  for_each_block([&](std::string_view, const Mlp& m) { n += m.parameter_count(); });
  return n;
}

void ModelParameters::for_each_block(const std::function<void(std::string_view, Mlp&)>& fn) {
  fn("node_encoder", node_encoder);
  fn("edge_encoder", edge_encoder);
  fn("node_update", node_update);
  fn("edge_update", edge_update);
  fn("classifier", classifier);
}

void ModelParameters::for_each_block(
    const std::function<void(std::string_view, const Mlp&)>& fn) const {
  fn("node_encoder", node_encoder);
  fn("edge_encoder", edge_encoder);
  fn("node_update", node_update);
  fn("edge_update", edge_update);
  fn("classifier", classifier);
}

ModelParameters init_parameters(const ModelConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelParameters p;
  p.config = config;
  p.node_encoder = make_mlp(config.node_encoder_spec(), rng);
  p.edge_encoder = make_mlp(config.edge_encoder_spec(), rng);
  p.node_update = make_mlp(config.node_update_spec(), rng);
  p.edge_update = make_mlp(config.edge_update_spec(), rng);
  p.classifier = make_mlp(config.classifier_spec(), rng);
  return p;
}

ModelParameters zeros_like(const ModelParameters& params) {
  ModelParameters z;
  z.config = params.config;
  z.node_encoder = zeros_like(params.node_encoder);
  z.edge_encoder = zeros_like(params.edge_encoder);
  z.node_update = zeros_like(params.node_update);
  z.edge_update = zeros_like(params.edge_update);
  z.classifier = zeros_like(params.classifier);
  return z;
}

void validate_parameters(const ModelParameters& p) {
  const auto expect = [](const Mlp& m, const MlpSpec& spec, const char* name) {
    const MlpSpec got = m.spec();
    bool ok = got.size() == spec.size();
    for (std::size_t l = 0; ok && l < spec.size(); ++l) {
      ok = got[l].in_dim == spec[l].in_dim && got[l].out_dim == spec[l].out_dim &&
           got[l].activation == spec[l].activation && m.layers[l].bias.size() == spec[l].out_dim;
    }
    if (!ok) throw Error(std::string("block '") + name + "' does not match the model layout");
    for (const auto& layer : m.layers) {
      if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
        throw Error(std::string("block '") + name + "' has non-finite parameters");
      }
    }
  };
  const auto& c = p.config;
  validate_spec(c.node_encoder_spec());
  expect(p.node_encoder, c.node_encoder_spec(), "node_encoder");
  expect(p.edge_encoder, c.edge_encoder_spec(), "edge_encoder");
  expect(p.node_update, c.node_update_spec(), "node_update");
  expect(p.edge_update, c.edge_update_spec(), "edge_update");
  expect(p.classifier, c.classifier_spec(), "classifier");
}

ForwardTrace forward(const AssociationGraph& graph, const ModelParameters& params) {
  const auto& cfg = params.config;
  if (graph.dim() != params.node_encoder.in_dim()) {
    throw Error("forward: graph descriptors have dimension " + std::to_string(graph.dim()) +
                ", model expects " + std::to_string(params.node_encoder.in_dim()));
  }
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  const auto m = static_cast<Eigen::Index>(graph.edge_count());
  if (graph.edge_raw.rows() != m || graph.edge_raw.cols() != kEdgeRawDim) {
    throw Error("forward: edge_raw is not filled");
  }

  ForwardTrace t;
  t.node_encoder = mlp_forward_batch(params.node_encoder, graph.features);
  t.node_embedding = t.node_encoder.output;

  t.edge_encoder = mlp_forward_batch(params.edge_encoder, graph.edge_raw);
  t.edge_embedding = t.edge_encoder.output;

  // Hidden edge state from [h0(first), h0(second), h0(edge)].
  const int ne = cfg.node_embedding;
  Eigen::MatrixXd edge_in(m, 2 * ne + cfg.edge_embedding);
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto& ep = graph.edges[static_cast<std::size_t>(e)];
    edge_in.row(e).segment(0, ne) = t.node_embedding.row(ep.first);
    edge_in.row(e).segment(ne, ne) = t.node_embedding.row(ep.second);
    edge_in.row(e).tail(cfg.edge_embedding) = t.edge_embedding.row(e);
  }
  t.edge_update = mlp_forward_batch(params.edge_update, edge_in);
  t.edge_state = t.edge_update.output;

  // Messages towards each node, in ascending neighbor order. Edges are sorted
  // lexicographically, so per-node incidence lists are built in two sweeps.
  std::vector<std::vector<std::uint32_t>> incident(graph.node_count());
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    incident[graph.edges[e].second].push_back(e);
  }
  for (std::uint32_t e = 0; e < graph.edge_count(); ++e) {
    incident[graph.edges[e].first].push_back(e);
  }
  t.message_node.reserve(2 * graph.edge_count());
  t.message_edge.reserve(2 * graph.edge_count());
  for (std::uint32_t v = 0; v < graph.node_count(); ++v) {
    for (std::uint32_t e : incident[v]) {
      t.message_node.push_back(v);
      t.message_edge.push_back(e);
    }
  }
  const auto k = static_cast<Eigen::Index>(t.message_node.size());
  Eigen::MatrixXd msg_in(k, ne + cfg.edge_state);
  for (Eigen::Index r = 0; r < k; ++r) {
    msg_in.row(r).head(ne) = t.node_embedding.row(t.message_node[r]);
    msg_in.row(r).tail(cfg.edge_state) = t.edge_state.row(t.message_edge[r]);
  }
  t.node_update = mlp_forward_batch(params.node_update, msg_in);
  t.node_state = Eigen::MatrixXd::Zero(n, cfg.message);
  for (Eigen::Index r = 0; r < k; ++r) {
    t.node_state.row(t.message_node[r]) += t.node_update.output.row(r);
  }

  t.classifier = mlp_forward_batch(params.classifier, t.edge_state);
  t.logits = t.classifier.preacts.back();
  t.probabilities = t.classifier.output;
  return t;
}

ModelGradients backward(const AssociationGraph& graph, const ModelParameters& params,
                        const ForwardTrace& trace, const BackwardSeed& seed) {
  const auto& cfg = params.config;
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  const auto m = static_cast<Eigen::Index>(graph.edge_count());
  if (trace.probabilities.rows() != m || trace.node_state.rows() != n) {
    throw Error("backward: trace does not belong to this graph");
  }
  check_shape(seed.d_probabilities, m, kClassCount, "d_probabilities");
  check_shape(seed.d_logits, m, kClassCount, "d_logits");
  check_shape(seed.d_node_state, n, cfg.message, "d_node_state");

  ModelGradients g = zeros_like(params);
  const int ne = cfg.node_embedding;
  Eigen::MatrixXd d_node_emb = Eigen::MatrixXd::Zero(n, ne);

  const Eigen::MatrixXd d_prob = seed.d_probabilities.size() > 0
                                     ? seed.d_probabilities
                                     : Eigen::MatrixXd::Zero(m, kClassCount);
  Eigen::MatrixXd d_edge_state =
      mlp_backward(params.classifier, trace.classifier, d_prob, g.classifier, seed.d_logits);

  if (seed.d_node_state.size() > 0) {
    const auto k = static_cast<Eigen::Index>(trace.message_node.size());
    Eigen::MatrixXd d_msg(k, cfg.message);
    for (Eigen::Index r = 0; r < k; ++r) d_msg.row(r) = seed.d_node_state.row(trace.message_node[r]);
    const Eigen::MatrixXd d_msg_in =
        mlp_backward(params.node_update, trace.node_update, d_msg, g.node_update);
    for (Eigen::Index r = 0; r < k; ++r) {
      d_node_emb.row(trace.message_node[r]) += d_msg_in.row(r).head(ne);
      d_edge_state.row(trace.message_edge[r]) += d_msg_in.row(r).tail(cfg.edge_state);
    }
  }

  const Eigen::MatrixXd d_edge_in =
      mlp_backward(params.edge_update, trace.edge_update, d_edge_state, g.edge_update);
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto& ep = graph.edges[static_cast<std::size_t>(e)];
    d_node_emb.row(ep.first) += d_edge_in.row(e).segment(0, ne);
    d_node_emb.row(ep.second) += d_edge_in.row(e).segment(ne, ne);
  }
  const Eigen::MatrixXd d_edge_emb = d_edge_in.rightCols(cfg.edge_embedding);
  mlp_backward(params.edge_encoder, trace.edge_encoder, d_edge_emb, g.edge_encoder);
  mlp_backward(params.node_encoder, trace.node_encoder, d_node_emb, g.node_encoder);
  return g;
}

}  // namespace mtmc
