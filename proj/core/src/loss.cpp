#include "mtmc/loss.hpp"

#include <algorithm>
#include <cmath>

#include "mtmc/error.hpp"
#include "mtmc/mlp.hpp"

namespace mtmc {

namespace {

void check_batch(const Eigen::MatrixXd& m, std::span<const std::uint8_t> labels, const char* what) {
  if (m.cols() != 2) throw Error(std::string(what) + ": expected 2 columns");
  if (static_cast<std::size_t>(m.rows()) != labels.size()) {
    throw Error(std::string(what) + ": " + std::to_string(m.rows()) + " predictions vs " +
                std::to_string(labels.size()) + " labels");
  }
}

ClassWeights weights_for(std::span<const std::uint8_t> labels, const LossOptions& options) {
  if (!options.class_weighting) return {1.0, 1.0};
  return class_weights(labels);
}

// Soft FPR and its gradient w.r.t. the probabilities of negative edges.
double soft_fpr_with_grad(const Eigen::MatrixXd& p, std::span<const std::uint8_t> labels,
                          Eigen::MatrixXd* grad, double scale) {
  double fp = 0.0;
  double tn = 0.0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (labels[e]) continue;
    tn += p(static_cast<Eigen::Index>(e), 0);
    fp += p(static_cast<Eigen::Index>(e), 1);
  }
  const double denom = fp + tn;
  if (denom <= 0.0) return 0.0;
  if (grad) {
    const double d_fp = scale * tn / (denom * denom);
    const double d_tn = -scale * fp / (denom * denom);
    for (std::size_t e = 0; e < labels.size(); ++e) {
      if (labels[e]) continue;
      (*grad)(static_cast<Eigen::Index>(e), 0) += d_tn;
      (*grad)(static_cast<Eigen::Index>(e), 1) += d_fp;
    }
  }
  return fp / denom;
}

}  // namespace

ClassCounts count_classes(std::span<const std::uint8_t> labels) {
  ClassCounts c;
  for (auto y : labels) {
    if (y > 1) throw Error("labels must be 0 or 1");
    (y ? c.positives : c.negatives) += 1;
  }
  return c;
}

ClassWeights class_weights(std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw Error("class_weights: empty batch");
  const ClassCounts c = count_classes(labels);
  const double total = static_cast<double>(c.negatives + c.positives);
  ClassWeights w;
  if (c.negatives > 0) w.negative = total / static_cast<double>(c.negatives);
  if (c.positives > 0) w.positive = total / static_cast<double>(c.positives);
  return w;
}

double weighted_ce(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels,
                   const ClassWeights& weights) {
  check_batch(probabilities, labels, "weighted_ce");
  if (labels.empty()) throw Error("weighted_ce: empty batch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    const double w = weights[labels[e]];
    const double p = probabilities(static_cast<Eigen::Index>(e), labels[e]);
    num += w * -std::log(std::max(p, kProbabilityFloor));
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double soft_fpr(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels) {
  check_batch(probabilities, labels, "soft_fpr");
  return soft_fpr_with_grad(probabilities, labels, nullptr, 0.0);
}

double hard_fpr(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels) {
  check_batch(probabilities, labels, "hard_fpr");
  std::size_t fp = 0;
  std::size_t negatives = 0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (labels[e]) continue;
    ++negatives;
    const auto r = static_cast<Eigen::Index>(e);
    if (probabilities(r, 1) > probabilities(r, 0)) ++fp;
  }
  return negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
}

LossBreakdown total_loss(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels,
                         const LossOptions& options) {
  check_batch(probabilities, labels, "total_loss");
  LossBreakdown out;
  out.counts = count_classes(labels);
  out.weights = weights_for(labels, options);
  out.weighted_ce = weighted_ce(probabilities, labels, out.weights);
  out.grad_probabilities = Eigen::MatrixXd::Zero(probabilities.rows(), 2);

  double weight_sum = 0.0;
  for (auto y : labels) weight_sum += out.weights[y];
  for (std::size_t e = 0; e < labels.size(); ++e) {
    const auto r = static_cast<Eigen::Index>(e);
    const double p = probabilities(r, labels[e]);
    if (p > kProbabilityFloor) {
      out.grad_probabilities(r, labels[e]) = -out.weights[labels[e]] / (weight_sum * p);
    }
  }

  out.fpr = soft_fpr_with_grad(probabilities, labels,
                               options.fpr_term ? &out.grad_probabilities : nullptr, 1.0);
  out.fpr_hard = hard_fpr(probabilities, labels);
  out.total = out.weighted_ce + (options.fpr_term ? out.fpr : 0.0);
  return out;
}

LossBreakdown total_loss_from_logits(const Eigen::MatrixXd& logits,
                                     std::span<const std::uint8_t> labels,
                                     const LossOptions& options) {
  check_batch(logits, labels, "total_loss_from_logits");
  if (labels.empty()) throw Error("total_loss_from_logits: empty batch");
  const Eigen::MatrixXd probabilities = softmax_rows(logits);

  LossBreakdown out;
  out.counts = count_classes(labels);
  out.weights = weights_for(labels, options);
  out.grad_logits = Eigen::MatrixXd::Zero(logits.rows(), 2);
  out.grad_probabilities = Eigen::MatrixXd::Zero(logits.rows(), 2);

  double weight_sum = 0.0;
  for (auto y : labels) weight_sum += out.weights[y];
  double num = 0.0;
  for (std::size_t e = 0; e < labels.size(); ++e) {
    const auto r = static_cast<Eigen::Index>(e);
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    const double w = out.weights[labels[e]];
    num += w * (lse - logits(r, labels[e]));
    // d/dz of w * CE / W is w / W * (softmax - onehot).
    out.grad_logits.row(r) = (w / weight_sum) * probabilities.row(r);
    out.grad_logits(r, labels[e]) -= w / weight_sum;
  }
  out.weighted_ce = num / weight_sum;

  out.fpr = soft_fpr_with_grad(probabilities, labels,
                               options.fpr_term ? &out.grad_probabilities : nullptr, 1.0);
  out.fpr_hard = hard_fpr(probabilities, labels);
  out.total = out.weighted_ce + (options.fpr_term ? out.fpr : 0.0);
  return out;
}

}  // namespace mtmc
