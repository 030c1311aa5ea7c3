#include <random>

#include <gtest/gtest.h>

#include "mtmc/error.hpp"
#include "mtmc/loss.hpp"

namespace mtmc {
namespace {

Eigen::MatrixXd probs(std::initializer_list<double> p1) {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(p1.size()), 2);
  Eigen::Index r = 0;
  for (double v : p1) {
    p(r, 0) = 1.0 - v;
    p(r, 1) = v;
    ++r;
  }
  return p;
}

struct RandomBatch {
  Eigen::MatrixXd p;
  std::vector<std::uint8_t> y;
};

RandomBatch random_batch(std::mt19937_64& rng, int n, double positive_rate) {
  std::uniform_real_distribution<double> u(0.001, 0.999);
  std::bernoulli_distribution coin(positive_rate);
  RandomBatch b{Eigen::MatrixXd(n, 2), std::vector<std::uint8_t>(n)};
  for (int e = 0; e < n; ++e) {
    const double v = u(rng);
    b.p(e, 0) = 1.0 - v;
    b.p(e, 1) = v;
    b.y[e] = coin(rng);
  }
  return b;
}

TEST(ClassWeights, Examples) {
  std::vector<std::uint8_t> y(100, 0);
  std::fill(y.begin(), y.begin() + 10, 1);
  auto w = class_weights(y);
  EXPECT_NEAR(w.negative, 10.0 / 9.0, 1e-15);
  EXPECT_DOUBLE_EQ(w.positive, 10.0);

  std::vector<std::uint8_t> balanced(100, 0);
  std::fill(balanced.begin(), balanced.begin() + 50, 1);
  w = class_weights(balanced);
  EXPECT_DOUBLE_EQ(w.negative, 2.0);
  EXPECT_DOUBLE_EQ(w.positive, 2.0);

  w = class_weights(std::vector<std::uint8_t>(40, 0));
  EXPECT_DOUBLE_EQ(w.negative, 1.0);
}

TEST(ClassWeights, EmptyBatchThrows) { EXPECT_THROW(class_weights({}), Error); }

TEST(ClassWeights, MatchesDirectFormulaOnRandomBatches) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 300);
  std::uniform_real_distribution<double> rate(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_batch(rng, len(rng), rate(rng));
    double n0 = 0, n1 = 0;
    for (auto v : b.y) (v ? n1 : n0) += 1;
    const auto w = class_weights(b.y);
    if (n0 > 0) EXPECT_NEAR(w.negative, (n0 + n1) / n0, 1e-12);
    if (n1 > 0) EXPECT_NEAR(w.positive, (n0 + n1) / n1, 1e-12);
    const auto c = count_classes(b.y);
    EXPECT_EQ(c.negatives, n0);
    EXPECT_EQ(c.positives, n1);
  }
}

TEST(WeightedCe, Examples) {
  const std::vector<std::uint8_t> one{1};
  EXPECT_DOUBLE_EQ(weighted_ce(probs({1.0}), one, class_weights(one)), 0.0);
  const std::vector<std::uint8_t> two{0, 1};
  EXPECT_NEAR(weighted_ce(probs({0.5, 0.5}), two, class_weights(two)), 0.69315, 1e-5);
}

TEST(WeightedCe, LengthMismatchThrows) {
  const std::vector<std::uint8_t> y{0, 1};
  EXPECT_THROW(weighted_ce(probs({0.5}), y, class_weights(y)), Error);
}

TEST(WeightedCe, MatchesNaiveSummation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_batch(rng, 1 + trial, 0.2);
    const auto w = class_weights(b.y);
    double num = 0, den = 0;
    for (std::size_t e = 0; e < b.y.size(); ++e) {
      const double we = b.y[e] ? w.positive : w.negative;
      num += we * -std::log(b.p(e, b.y[e]));
      den += we;
    }
    EXPECT_NEAR(weighted_ce(b.p, b.y, w), num / den, 1e-12);
  }
}

TEST(WeightedCe, BalancedBatchEqualsPlainMean) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto b = random_batch(rng, 40, 0.5);
    for (int e = 0; e < 40; ++e) b.y[e] = e % 2;
    double mean = 0;
    for (int e = 0; e < 40; ++e) mean += -std::log(b.p(e, b.y[e]));
    mean /= 40;
    EXPECT_EQ(weighted_ce(b.p, b.y, class_weights(b.y)), mean);
  }
}

TEST(WeightedCe, ScaleInvariantInWeights) {
  std::mt19937_64 rng(4);
  const auto b = random_batch(rng, 60, 0.3);
  const auto w = class_weights(b.y);
  for (double k : {0.5, 3.0, 1e4}) {
    EXPECT_NEAR(weighted_ce(b.p, b.y, {w.negative * k, w.positive * k}), weighted_ce(b.p, b.y, w),
                1e-13);
  }
}

TEST(WeightedCe, ClampsZeroProbability) {
  const std::vector<std::uint8_t> y{1};
  const double v = weighted_ce(probs({0.0}), y, class_weights(y));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, -std::log(kProbabilityFloor), 1e-9);
}

TEST(SoftFpr, Examples) {
  const std::vector<std::uint8_t> y{0, 0};
  EXPECT_DOUBLE_EQ(soft_fpr(probs({0.0, 0.0}), y), 0.0);
  EXPECT_DOUBLE_EQ(soft_fpr(probs({1.0, 1.0}), y), 1.0);
  EXPECT_NEAR(soft_fpr(probs({0.2, 0.6}), y), 0.4, 1e-15);
  const std::vector<std::uint8_t> pos{1, 1};
  EXPECT_DOUBLE_EQ(soft_fpr(probs({0.7, 0.9}), pos), 0.0);
}

TEST(SoftFpr, EqualsHardFprOnBinaryPredictions) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    auto b = random_batch(rng, 30, 0.3);
    for (int e = 0; e < 30; ++e) {
      const double v = coin(rng) ? 1.0 : 0.0;
      b.p(e, 0) = 1 - v;
      b.p(e, 1) = v;
    }
    EXPECT_EQ(soft_fpr(b.p, b.y), hard_fpr(b.p, b.y));
  }
}

TEST(SoftFpr, AlwaysInUnitInterval) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_batch(rng, 25, 0.4);
    const double f = soft_fpr(b.p, b.y);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(HardFpr, TieIsNotPositive) {
  const std::vector<std::uint8_t> y{0};
  EXPECT_EQ(hard_fpr(probs({0.5}), y), 0.0);
}

TEST(TotalLoss, Examples) {
  const std::vector<std::uint8_t> y{0, 1};
  EXPECT_DOUBLE_EQ(total_loss(probs({0.0, 1.0}), y).total, 0.0);
  EXPECT_NEAR(total_loss(probs({0.5, 0.5}), y).total, 1.19315, 1e-5);
}

TEST(TotalLoss, IsSumOfTerms) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_batch(rng, 50, 0.1);
    const auto l = total_loss(b.p, b.y);
    EXPECT_EQ(l.total, l.weighted_ce + l.fpr);
    EXPECT_EQ(l.counts.negatives + l.counts.positives, b.y.size());
  }
}

TEST(TotalLoss, OptionsDisableTerms) {
  std::mt19937_64 rng(8);
  const auto b = random_batch(rng, 50, 0.1);
  const auto off = total_loss(b.p, b.y, {.class_weighting = true, .fpr_term = false});
  EXPECT_EQ(off.total, off.weighted_ce);
  const auto plain = total_loss(b.p, b.y, {.class_weighting = false, .fpr_term = false});
  double mean = 0;
  for (std::size_t e = 0; e < b.y.size(); ++e) mean += -std::log(b.p(e, b.y[e]));
  EXPECT_NEAR(plain.weighted_ce, mean / b.y.size(), 1e-13);
}

double total_at(const Eigen::MatrixXd& p, const std::vector<std::uint8_t>& y, const LossOptions& o) {
  return total_loss(p, y, o).total;
}

TEST(TotalLoss, ProbabilityGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (const LossOptions o : {LossOptions{}, LossOptions{true, false}, LossOptions{false, true}}) {
    const auto b = random_batch(rng, 20, 0.3);
    const auto g = total_loss(b.p, b.y, o).grad_probabilities;
    for (Eigen::Index e = 0; e < b.p.rows(); ++e) {
      for (int k = 0; k < 2; ++k) {
        const double h = 1e-6;
        Eigen::MatrixXd up = b.p, down = b.p;
        up(e, k) += h;
        down(e, k) -= h;
        const double numeric = (total_at(up, b.y, o) - total_at(down, b.y, o)) / (2 * h);
        EXPECT_LT(std::fabs(numeric - g(e, k)), 1e-6 * std::max(1.0, std::fabs(numeric)))
            << "edge " << e << " class " << k;
      }
    }
  }
}

TEST(TotalLossFromLogits, AgreesWithProbabilityPath) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd z(30, 2);
    for (auto& v : z.reshaped()) v = n(rng);
    std::vector<std::uint8_t> y(30);
    for (auto& v : y) v = n(rng) > 1.5;
    Eigen::MatrixXd p(30, 2);
    for (int e = 0; e < 30; ++e) {
      const double m = z.row(e).maxCoeff();
      const double a = std::exp(z(e, 0) - m), c = std::exp(z(e, 1) - m);
      p(e, 0) = a / (a + c);
      p(e, 1) = c / (a + c);
    }
    const auto from_p = total_loss(p, y);
    const auto from_z = total_loss_from_logits(z, y);
    EXPECT_NEAR(from_z.total, from_p.total, 1e-12);
    EXPECT_NEAR(from_z.fpr, from_p.fpr, 1e-14);

    // Chain the probability gradient through the softmax Jacobian.
    for (int e = 0; e < 30; ++e) {
      const double gp0 = from_p.grad_probabilities(e, 0), gp1 = from_p.grad_probabilities(e, 1);
      const double dot = gp0 * p(e, 0) + gp1 * p(e, 1);
      const double gz0 = p(e, 0) * (gp0 - dot), gz1 = p(e, 1) * (gp1 - dot);
      const double got0 = from_z.grad_logits(e, 0) + 0.0, got1 = from_z.grad_logits(e, 1);
      // The fused path may split the gradient between logits and probabilities.
      const double fp0 = from_z.grad_probabilities.size() ? from_z.grad_probabilities(e, 0) : 0.0;
      const double fp1 = from_z.grad_probabilities.size() ? from_z.grad_probabilities(e, 1) : 0.0;
      const double fdot = fp0 * p(e, 0) + fp1 * p(e, 1);
      EXPECT_NEAR(got0 + p(e, 0) * (fp0 - fdot), gz0, 1e-10);
      EXPECT_NEAR(got1 + p(e, 1) * (fp1 - fdot), gz1, 1e-10);
    }
  }
}

TEST(TotalLossFromLogits, FiniteOnExtremeLogits) {
  Eigen::MatrixXd z(2, 2);
  z << 800.0, -800.0, -800.0, 800.0;
  const std::vector<std::uint8_t> y{1, 0};
  const auto l = total_loss_from_logits(z, y);
  EXPECT_TRUE(std::isfinite(l.total));
  EXPECT_NEAR(l.weighted_ce, 1600.0, 1e-9);
  EXPECT_TRUE(l.grad_logits.allFinite());
}

}  // namespace
}  // namespace mtmc
