#pragma once

// Independent reference implementations used only by the tests. None of
// these share code paths with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mtmc/gcn.hpp"

namespace mtmc::oracle {

// Neumaier-compensated mean.
inline std::vector<double> compensated_mean(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.front().size();
  std::vector<double> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0, c = 0.0;
    for (const auto& r : rows) {
      const double t = sum + r[k];
      c += std::fabs(sum) >= std::fabs(r[k]) ? (sum - t) + r[k] : (r[k] - t) + sum;
      sum = t;
    }
    out[k] = (sum + c) / static_cast<double>(rows.size());
  }
  return out;
}

// Dense layer evaluated with explicit loops in precision T.
template <typename T>
std::vector<T> dense(const DenseLayer& l, const std::vector<T>& x) {
  const int out = static_cast<int>(l.weight.rows());
  const int in = static_cast<int>(l.weight.cols());
  std::vector<T> y(out);
  for (int r = 0; r < out; ++r) {
    T s = l.bias[r];
    for (int c = 0; c < in; ++c) s += static_cast<T>(l.weight(r, c)) * x[c];
    y[r] = s;
  }
  if (l.activation == Activation::kRelu) {
    for (auto& v : y) v = v > 0 ? v : T(0);
  } else {
    T m = y[0];
    for (T v : y) m = std::max(m, v);
    T z = 0;
    for (auto& v : y) z += (v = std::exp(v - m));
    for (auto& v : y) v /= z;
  }
  return y;
}

template <typename T>
std::vector<T> mlp(const Mlp& m, std::vector<T> x) {
  for (const auto& l : m.layers) x = dense(l, x);
  return x;
}

template <typename T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct ScalarGraph {
  std::vector<std::vector<double>> features;
  std::vector<int> cameras;
  std::vector<std::pair<int, int>> edges;  // i < j
};

struct ScalarForward {
  std::vector<std::vector<double>> probabilities;  // per edge
  std::vector<std::vector<double>> node_state;     // per node
};

// Straight-line evaluation of one message-passing round: node and edge
// encoders, hidden edge state from both endpoints and the edge, summed
// messages per node, softmax classifier on the edge state.
inline ScalarForward forward(const ScalarGraph& g, const ModelParameters& p) {
  const std::size_t n = g.features.size();
  std::vector<std::vector<double>> h0(n);
  for (std::size_t i = 0; i < n; ++i) h0[i] = mlp(p.node_encoder, g.features[i]);

  ScalarForward out;
  std::vector<std::vector<double>> hidden(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& fi = g.features[g.edges[e].first];
    const auto& fj = g.features[g.edges[e].second];
    double dot = 0, ni = 0, nj = 0, sq = 0;
    for (std::size_t k = 0; k < fi.size(); ++k) {
      dot += fi[k] * fj[k];
      ni += fi[k] * fi[k];
      nj += fj[k] * fj[k];
      sq += (fi[k] - fj[k]) * (fi[k] - fj[k]);
    }
    const std::vector<double> raw{std::sqrt(sq), 1.0 - dot / (std::sqrt(ni) * std::sqrt(nj))};
    const auto e0 = mlp(p.edge_encoder, raw);
    hidden[e] = mlp(p.edge_update, concat(concat(h0[g.edges[e].first], h0[g.edges[e].second]), e0));
    out.probabilities.push_back(mlp(p.classifier, hidden[e]));
  }
  out.node_state.assign(n, std::vector<double>(p.config.message, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto [a, b] = g.edges[e];
      if (a != static_cast<int>(i) && b != static_cast<int>(i)) continue;
      const auto m = mlp(p.node_update, concat(h0[i], hidden[e]));
      for (std::size_t k = 0; k < m.size(); ++k) out.node_state[i][k] += m[k];
    }
  }
  return out;
}

// Weighted cross-entropy plus soft FPR evaluated directly from per-edge
// probabilities.
template <typename T>
T total_loss(const std::vector<std::vector<T>>& prob, const std::vector<std::uint8_t>& labels) {
  T n0 = 0, n1 = 0;
  for (auto y : labels) (y ? n1 : n0) += 1;
  T num = 0, den = 0, fp = 0, tn = 0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    const T w = labels[e] ? (n0 + n1) / n1 : (n0 + n1) / n0;
    num += w * -std::log(std::max(prob[e][labels[e]], T(1e-12)));
    den += w;
    if (!labels[e]) {
      fp += prob[e][1];
      tn += prob[e][0];
    }
  }
  return num / den + (n0 > 0 ? fp / (fp + tn) : T(0));
}

// Finite-difference evaluator of the training loss for one graph, computed
// in extended precision so that differences of nearby losses are not
// swamped by 64-bit roundoff. The node encoder is cached layer by layer so
// that perturbing one of its parameters only recomputes what the
// perturbation can reach; every other block is re-evaluated in full.
// Node-update parameters never reach the loss.
class LossProbe {
 public:
  using Real = long double;

  LossProbe(const ScalarGraph& g, const std::vector<std::uint8_t>& labels, const ModelParameters& p)
      : g_(g), labels_(labels), p_(p) {
    const auto& enc = p_.node_encoder.layers;
    for (const auto& f : g_.features) {
      std::vector<std::vector<Real>> in{std::vector<Real>(f.begin(), f.end())}, pre;
      for (const auto& l : enc) {
        std::vector<Real> z(l.out_dim());
        for (int r = 0; r < l.out_dim(); ++r) {
          Real s = l.bias[r];
          for (int c = 0; c < l.in_dim(); ++c) s += static_cast<Real>(l.weight(r, c)) * in.back()[c];
          z[r] = s;
        }
        pre.push_back(z);
        for (auto& v : z) v = v > 0 ? v : 0;
        in.push_back(std::move(z));
      }
      inputs_.push_back(std::move(in));
      preacts_.push_back(std::move(pre));
    }
    for (const auto& e : g_.edges) raw_.push_back(raw_features(e));
    base_ = value();
  }

  // Loss with every parameter at its current value.
  Real value() const { return edge_loss(h0_all()); }

  // Loss after adding `delta` to one parameter. `block` uses checkpoint
  // names; `index` runs over weights (row-major) then biases of the layer.
  Real perturbed(std::string_view block, std::size_t layer, std::size_t index, double delta) {
    if (block == "node_encoder") return node_encoder_perturbed(layer, index, delta);
    if (block == "node_update") return value();
    Mlp& m = mutable_block(block);
    double& slot = locate(m.layers[layer], index);
    const double saved = slot;
    slot = saved + delta;
    const Real v = value();
    slot = saved;
    return v;
  }

 private:
  static double& locate(DenseLayer& l, std::size_t index) {
    const auto nw = static_cast<std::size_t>(l.weight.size());
    if (index < nw) return l.weight(index / l.in_dim(), index % l.in_dim());
    return l.bias[index - nw];
  }

  Mlp& mutable_block(std::string_view block) {
    if (block == "edge_encoder") return p_.edge_encoder;
    if (block == "edge_update") return p_.edge_update;
    return p_.classifier;
  }

  std::vector<Real> raw_features(const std::pair<int, int>& e) const {
    const auto& fi = g_.features[e.first];
    const auto& fj = g_.features[e.second];
    Real dot = 0, ni = 0, nj = 0, sq = 0;
    for (std::size_t k = 0; k < fi.size(); ++k) {
      dot += fi[k] * fj[k];
      ni += fi[k] * fi[k];
      nj += fj[k] * fj[k];
      sq += (fi[k] - fj[k]) * (fi[k] - fj[k]);
    }
    return {std::sqrt(sq), 1.0 - dot / (std::sqrt(ni) * std::sqrt(nj))};
  }

  std::vector<std::vector<Real>> h0_all() const {
    std::vector<std::vector<Real>> h;
    for (const auto& in : inputs_) h.push_back(in.back());
    return h;
  }

  Real edge_loss(const std::vector<std::vector<Real>>& h0) const {
    std::vector<std::vector<Real>> prob;
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      const auto e0 = mlp(p_.edge_encoder, raw_[e]);
      const auto hidden =
          mlp(p_.edge_update, concat(concat(h0[g_.edges[e].first], h0[g_.edges[e].second]), e0));
      prob.push_back(mlp(p_.classifier, hidden));
    }
    return total_loss(prob, labels_);
  }

  Real node_encoder_perturbed(std::size_t layer, std::size_t index, double delta) {
    const auto& enc = p_.node_encoder.layers;
    const DenseLayer& l = enc[layer];
    const auto nw = static_cast<std::size_t>(l.weight.size());
    const int row = static_cast<int>(index < nw ? index / l.in_dim() : index - nw);
    const int col = index < nw ? static_cast<int>(index % l.in_dim()) : -1;

    std::vector<std::vector<Real>> h0 = h0_all();
    bool any_change = false;
    for (std::size_t n = 0; n < g_.features.size(); ++n) {
      const auto& in = inputs_[n];
      const Real z = preacts_[n][layer][row] + Real(delta) * (col >= 0 ? in[layer][col] : Real(1));
      const Real change = std::max(z, Real(0)) - in[layer + 1][row];
      if (change == 0.0) continue;  // unit stays inactive for this node
      any_change = true;
      if (layer + 1 == enc.size()) {
        h0[n][row] += change;
        continue;
      }
      // Rank-one update of the next pre-activation.
      const DenseLayer& next = enc[layer + 1];
      std::vector<Real> x(next.out_dim());
      std::vector<std::pair<int, Real>> moved;
      for (int r = 0; r < next.out_dim(); ++r) {
        const Real v = preacts_[n][layer + 1][r] + next.weight(r, row) * change;
        x[r] = v > 0 ? v : 0;
        if (x[r] != in[layer + 2][r]) moved.emplace_back(r, x[r] - in[layer + 2][r]);
      }
      if (layer + 2 == enc.size()) {
        h0[n] = std::move(x);
        continue;
      }
      // Sparse update of the layer after that, then plain layers.
      const DenseLayer& after = enc[layer + 2];
      std::vector<Real> y(after.out_dim());
      for (int r = 0; r < after.out_dim(); ++r) {
        Real v = preacts_[n][layer + 2][r];
        for (auto [c, d] : moved) v += after.weight(r, c) * d;
        y[r] = v > 0 ? v : 0;
      }
      for (std::size_t k = layer + 3; k < enc.size(); ++k) y = dense(enc[k], y);
      h0[n] = std::move(y);
    }
    return any_change ? edge_loss(h0) : base_;
  }

  const ScalarGraph& g_;
  std::vector<std::uint8_t> labels_;
  ModelParameters p_;
  std::vector<std::vector<std::vector<Real>>> inputs_;   // per node, per layer input (+ output)
  std::vector<std::vector<std::vector<Real>>> preacts_;  // per node, per layer
  std::vector<std::vector<Real>> raw_;
  Real base_ = 0.0;
};

// Reachability by repeated relaxation of a boolean adjacency matrix.
inline std::vector<std::vector<bool>> transitive_closure(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) r[i][i] = true;
  for (auto [a, b] : edges) r[a][b] = r[b][a] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

// Best total weight over every one-to-one matching (rows to distinct columns
// or unmatched), by exhaustive recursion.
inline std::int64_t best_matching(const std::vector<std::vector<std::int64_t>>& w) {
  const int rows = static_cast<int>(w.size());
  const int cols = rows ? static_cast<int>(w[0].size()) : 0;
  std::vector<bool> used(cols, false);
  std::int64_t best = 0;
  auto rec = [&](auto&& self, int r, std::int64_t acc) -> void {
    if (r == rows) {
      best = std::max(best, acc);
      return;
    }
    self(self, r + 1, acc);
    for (int c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      self(self, r + 1, acc + w[r][c]);
      used[c] = false;
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace mtmc::oracle
