#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace mtmc {

// Probabilities below this are clamped before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

struct ClassCounts {
  std::size_t negatives = 0;  // n0
  std::size_t positives = 0;  // n1
};

// Batch-level inverse class frequencies, w_c = (n0 + n1) / n_c. The weight
// of a class absent from the batch is never used and reported as 0.
struct ClassWeights {
  double negative = 0.0;
  double positive = 0.0;

  double operator[](std::uint8_t label) const { return label ? positive : negative; }
};

ClassCounts count_classes(std::span<const std::uint8_t> labels);
ClassWeights class_weights(std::span<const std::uint8_t> labels);

// sum_e w_{y_e} * CE_e / sum_e w_{y_e}, with CE_e = -log p_e[y_e].
// `probabilities` is edges x 2.
double weighted_ce(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels,
                   const ClassWeights& weights);

// FP / (FP + TN) over negative edges using probability mass as counts.
// Returns 0 when the batch has no negatives.
double soft_fpr(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels);

// Same ratio with hard decisions: an edge counts as predicted positive only
// when p1 > p0.
double hard_fpr(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels);

struct LossOptions {
  bool class_weighting = true;  // off: every edge weighs 1
  bool fpr_term = true;         // off: total = weighted CE only
};

struct LossBreakdown {
  double weighted_ce = 0.0;
  double fpr = 0.0;       // soft FPR, the trained surrogate
  double fpr_hard = 0.0;  // monitoring only
  double total = 0.0;
  ClassWeights weights;
  ClassCounts counts;
  Eigen::MatrixXd grad_probabilities;  // dL/dp, edges x 2
  Eigen::MatrixXd grad_logits;         // dL/dz for the fused cross-entropy path
};

// Loss on probabilities; the whole gradient lands in grad_probabilities.
LossBreakdown total_loss(const Eigen::MatrixXd& probabilities, std::span<const std::uint8_t> labels,
                         const LossOptions& options = {});

// Loss on classifier logits. Cross-entropy is evaluated as
// logsumexp(z) - z_y and differentiated w.r.t. the logits directly; the FPR
// term is differentiated w.r.t. the softmax probabilities.
LossBreakdown total_loss_from_logits(const Eigen::MatrixXd& logits,
                                     std::span<const std::uint8_t> labels,
                                     const LossOptions& options = {});

}  // namespace mtmc
