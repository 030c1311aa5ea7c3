#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mtmc {

enum class Activation { kRelu, kSoftmax };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
  int in_dim = 0;
  int out_dim = 0;
  Activation activation = Activation::kRelu;
};

using MlpSpec = std::vector<LayerSpec>;

// Throws unless dims chain and softmax appears only as the last activation.
void validate_spec(const MlpSpec& spec);

// Fully connected layer y = act(W x + b), W stored out x in.
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
  Activation activation = Activation::kRelu;

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
};

struct Mlp {
  std::vector<DenseLayer> layers;

  int in_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  int out_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
  MlpSpec spec() const;
  std::size_t parameter_count() const;
};

// Weights uniform in [-sqrt(6/in), +sqrt(6/in)], zero biases.
Mlp make_mlp(const MlpSpec& spec, std::mt19937_64& rng);
Mlp zeros_like(const Mlp& mlp);

// Single-vector forward pass.
Eigen::VectorXd mlp_forward(const Mlp& mlp, const Eigen::VectorXd& x);

// Batched forward pass over row-major samples, keeping what backprop needs.
struct MlpTrace {
  std::vector<Eigen::MatrixXd> inputs;  // input to layer l, rows = samples
  std::vector<Eigen::MatrixXd> preacts;  // W x + b of layer l
  Eigen::MatrixXd output;
};

MlpTrace mlp_forward_batch(const Mlp& mlp, const Eigen::MatrixXd& rows);

// Accumulates parameter gradients into `grads` and returns dL/d(input).
// `d_output` is the gradient w.r.t. the post-activation output; a softmax
// final layer is differentiated through its Jacobian. `d_final_preact`, when
// non-empty, is added directly to the final layer's pre-activation gradient.
Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTrace& trace, const Eigen::MatrixXd& d_output,
                             Mlp& grads, const Eigen::MatrixXd& d_final_preact = {});

// Row-wise softmax with max subtraction.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

}  // namespace mtmc
