#include "mtmc/mlp.hpp"

#include <cmath>

#include "mtmc/error.hpp"

namespace mtmc {

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "softmax"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "softmax") return Activation::kSoftmax;
  throw Error("unknown activation '" + s + "'");
}

void validate_spec(const MlpSpec& spec) {
  if (spec.empty()) throw Error("MLP needs at least one layer");
  for (std::size_t l = 0; l < spec.size(); ++l) {
    if (spec[l].in_dim <= 0 || spec[l].out_dim <= 0) {
      throw Error("layer " + std::to_string(l) + " has non-positive dimension");
    }
    if (l > 0 && spec[l].in_dim != spec[l - 1].out_dim) {
      throw Error("layer " + std::to_string(l) + " input " + std::to_string(spec[l].in_dim) +
                  " does not chain with previous output " + std::to_string(spec[l - 1].out_dim));
    }
    if (spec[l].activation == Activation::kSoftmax && l + 1 != spec.size()) {
      throw Error("softmax is only allowed as the final activation");
    }
  }
}

MlpSpec Mlp::spec() const {
  MlpSpec s;
  for (const auto& l : layers) s.push_back({l.in_dim(), l.out_dim(), l.activation});
  return s;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Mlp make_mlp(const MlpSpec& spec, std::mt19937_64& rng) {
  validate_spec(spec);
  Mlp mlp;
  for (const auto& s : spec) {
    const double bound = std::sqrt(6.0 / s.in_dim);
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer;
    layer.weight.resize(s.out_dim, s.in_dim);
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
    layer.bias = Eigen::VectorXd::Zero(s.out_dim);
    layer.activation = s.activation;
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

Mlp zeros_like(const Mlp& mlp) {
  Mlp z;
  for (const auto& l : mlp.layers) {
    z.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                        Eigen::VectorXd::Zero(l.bias.size()), l.activation});
  }
  return z;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& pre, Activation a) {
  if (a == Activation::kRelu) return pre.cwiseMax(0.0);
  return softmax_rows(pre);
}

}  // namespace

Eigen::VectorXd mlp_forward(const Mlp& mlp, const Eigen::VectorXd& x) {
  if (x.size() != mlp.in_dim()) {
    throw Error("mlp_forward: input dimension " + std::to_string(x.size()) + ", expected " +
                std::to_string(mlp.in_dim()));
  }
  Eigen::MatrixXd row = x.transpose();
  return mlp_forward_batch(mlp, row).output.transpose();
}

MlpTrace mlp_forward_batch(const Mlp& mlp, const Eigen::MatrixXd& rows) {
  if (rows.cols() != mlp.in_dim()) {
    throw Error("mlp_forward: input dimension " + std::to_string(rows.cols()) + ", expected " +
                std::to_string(mlp.in_dim()));
  }
  MlpTrace t;
  t.inputs.reserve(mlp.layers.size());
  t.preacts.reserve(mlp.layers.size());
  Eigen::MatrixXd x = rows;
  for (const auto& layer : mlp.layers) {
    Eigen::MatrixXd pre = x * layer.weight.transpose();
    pre.rowwise() += layer.bias.transpose();
    Eigen::MatrixXd y = activate(pre, layer.activation);
    t.inputs.push_back(std::move(x));
    t.preacts.push_back(std::move(pre));
    x = std::move(y);
  }
  t.output = std::move(x);
  return t;
}

Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTrace& trace, const Eigen::MatrixXd& d_output,
                             Mlp& grads, const Eigen::MatrixXd& d_final_preact) {
  if (d_output.rows() != trace.output.rows() || d_output.cols() != trace.output.cols()) {
    throw Error("mlp_backward: gradient shape mismatch");
  }
  Eigen::MatrixXd d = d_output;
  for (std::size_t k = mlp.layers.size(); k-- > 0;) {
    const auto& layer = mlp.layers[k];
    Eigen::MatrixXd d_pre;
    if (layer.activation == Activation::kRelu) {
      d_pre = (trace.preacts[k].array() > 0.0).select(d.array(), 0.0).matrix();
    } else {
      const Eigen::MatrixXd& y = trace.output;
      const Eigen::VectorXd inner = (d.array() * y.array()).rowwise().sum();
      d_pre = (y.array() * (d.colwise() - inner).array()).matrix();
    }
    if (k + 1 == mlp.layers.size() && d_final_preact.size() > 0) {
      if (d_final_preact.rows() != d_pre.rows() || d_final_preact.cols() != d_pre.cols()) {
        throw Error("mlp_backward: pre-activation gradient shape mismatch");
      }
      d_pre += d_final_preact;
    }
    grads.layers[k].weight.noalias() += d_pre.transpose() * trace.inputs[k];
    grads.layers[k].bias += d_pre.colwise().sum().transpose();
    d = d_pre * layer.weight;
  }
  return d;
}

}  // namespace mtmc
