#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dslp/objective.h"

namespace dslp {
namespace {

constexpr double kLog2 = 0.69314718055994530942;

ObservationSet MakeObs(GridDims dims, std::mt19937_64& rng, double p_pos, double p_neg) {
  ObservationSet obs;
  obs.pos_mask = GridField(dims, 1.0);
  obs.neg_mask = GridField(dims, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < obs.pos_mask.size(); ++k) {
    const double r = u(rng);
    if (r < p_pos) {
      obs.pos_mask[k] = 1.0;
    } else if (r < p_pos + p_neg) {
      obs.neg_mask[k] = 1.0;
    }
  }
  return obs;
}

GridField RandomField(GridDims dims, std::mt19937_64& rng, double lo = 0.01, double hi = 0.99) {
  std::uniform_real_distribution<double> u(lo, hi);
  GridField f(dims, 1.0);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

// Labels placed explicitly: n_pos positives, n_neg negatives.
ObservationSet Counted(int n_pos, int n_neg) {
  ObservationSet obs;
  obs.pos_mask = GridField(16, 16, 1.0);
  obs.neg_mask = GridField(16, 16, 1.0);
  for (int k = 0; k < n_pos; ++k) obs.pos_mask[k] = 1.0;
  for (int k = 0; k < n_neg; ++k) obs.neg_mask[n_pos + k] = 1.0;
  return obs;
}

TEST(AlphaIbTest, DirectRatio) {
  EXPECT_DOUBLE_EQ(AlphaIB(10, 90), 0.1);
  EXPECT_DOUBLE_EQ(AlphaIB(Counted(10, 90)), 0.1);
  EXPECT_DOUBLE_EQ(AlphaIB(0, 5), 0.0);
  EXPECT_THROW(AlphaIB(0, 0), std::invalid_argument);
}

TEST(InfoContribTest, ClosedForms) {
  const ObservationSet obs = Counted(6, 4);
  GridField half(16, 16, 1.0, 0.5);
  EXPECT_NEAR(InfoContribNeg(obs, half), 4 * kLog2, 1e-12);
  EXPECT_NEAR(InfoContribPos(obs, half), 6 * kLog2, 1e-12);
  const double eps = 1e-6;
  GridField good(16, 16, 1.0, 1.0 - eps);
  EXPECT_NEAR(InfoContribPos(obs, good), 6 * eps, 1e-10);
}

TEST(InfoContribTest, RandomMatchesReferenceLoop) {
  std::mt19937_64 rng(17);
  const ObservationSet obs = MakeObs({16, 16}, rng, 0.3, 0.5);
  const GridField y = RandomField({16, 16}, rng);
  double hp = 0.0, hn = 0.0;
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      if (obs.pos_mask.at(i, j) == 1.0) hp += -std::log(y.at(i, j));
      if (obs.neg_mask.at(i, j) == 1.0) hn += -std::log(1.0 - y.at(i, j));
    }
  }
  EXPECT_NEAR(InfoContribPos(obs, y), hp, 1e-9);
  EXPECT_NEAR(InfoContribNeg(obs, y), hn, 1e-9);
}

// The balance bound over random inputs, including extreme predictions.
TEST(BalancedInfoTest, BoundProperty) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ObservationSet obs = MakeObs({8, 8}, rng, u(rng) * 0.5, u(rng) * 0.5);
    if (obs.pos_count() + obs.neg_count() == 0) continue;
    const GridField y = RandomField({8, 8}, rng, 0.0, 1.0);
    const double hp = InfoContribPos(obs, y), hn = InfoContribNeg(obs, y);
    const double h = BalancedInfo(hp, hn, AlphaIB(obs));
    if (!(h >= 0.0 && h <= std::max(hp, hn) * (1 + 1e-12))) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(SlpLossTest, TwoCellClosedForm) {
  const ObservationSet obs = Counted(1, 1);
  const SlpLossReport r = SlpLoss(obs, GridField(16, 16, 1.0, 0.5), AlphaMode::Auto());
  EXPECT_DOUBLE_EQ(r.alpha_ib, 0.5);
  EXPECT_NEAR(r.loss, kLog2 / 2, 1e-12);
  EXPECT_NEAR(r.loss, 0.3466, 1e-4);
}

TEST(SlpLossTest, PerfectPrediction) {
  const ObservationSet obs = Counted(20, 30);
  GridField y = obs.pos_mask;  // exact labels, clamped inside
  const SlpLossReport r = SlpLoss(obs, y, AlphaMode::Auto());
  EXPECT_LE(r.loss, 2 * kSlpClamp);
}

TEST(SlpLossTest, GradientIsZeroOutsideRegion) {
  std::mt19937_64 rng(8);
  const ObservationSet obs = MakeObs({16, 16}, rng, 0.2, 0.4);
  const SlpLossReport r = SlpLoss(obs, RandomField({16, 16}, rng), AlphaMode::Auto());
  for (std::size_t k = 0; k < r.grad.size(); ++k) {
    if (obs.pos_mask[k] == 0.0 && obs.neg_mask[k] == 0.0) EXPECT_EQ(r.grad[k], 0.0);
  }
}

TEST(SlpLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const ObservationSet obs = MakeObs({16, 16}, rng, 0.25, 0.5);
    GridField y = RandomField({16, 16}, rng, 0.05, 0.95);
    for (AlphaMode mode : {AlphaMode::Auto(), AlphaMode::Constant(0.2)}) {
      const SlpLossReport r = SlpLoss(obs, y, mode);
      const double h = 1e-5;
      for (std::size_t k = 0; k < y.size(); ++k) {
        GridField up = y, down = y;
        up[k] += h;
        down[k] -= h;
        const double fd = (SlpLoss(obs, up, mode).loss - SlpLoss(obs, down, mode).loss) / (2 * h);
        const double scale = std::max(std::abs(fd), 1e-3);
        EXPECT_LE(std::abs(r.grad[k] - fd) / scale, 1e-4) << "cell " << k;
      }
    }
  }
}

TEST(SlpLossTest, MatchesReferenceLoop) {
  std::mt19937_64 rng(31);
  const ObservationSet obs = MakeObs({16, 16}, rng, 0.3, 0.3);
  const GridField y = RandomField({16, 16}, rng);
  const double a = AlphaIB(obs);
  double total = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (obs.pos_mask[k] == 1.0) {
      total += (1 - a) * std::log(y[k]);
      ++n;
    } else if (obs.neg_mask[k] == 1.0) {
      total += a * std::log(1 - y[k]);
      ++n;
    }
  }
  EXPECT_NEAR(SlpLoss(obs, y, AlphaMode::Auto()).loss, -total / n, 1e-12);
}

TEST(SlpLossTest, Monotonicity) {
  std::mt19937_64 rng(55);
  const ObservationSet obs = MakeObs({8, 8}, rng, 0.3, 0.5);
  GridField y = RandomField({8, 8}, rng, 0.1, 0.8);
  const double base = SlpLoss(obs, y, AlphaMode::Auto()).loss;
  for (std::size_t k = 0; k < y.size(); ++k) {
    GridField up = y;
    up[k] += 0.1;
    const double l = SlpLoss(obs, up, AlphaMode::Auto()).loss;
    if (obs.pos_mask[k] == 1.0) EXPECT_LE(l, base);
    if (obs.neg_mask[k] == 1.0) EXPECT_GE(l, base);
  }
}

TEST(SlpLossTest, DegenerateWithoutPositives) {
  const ObservationSet obs = Counted(0, 10);
  const SlpLossReport r = SlpLoss(obs, GridField(16, 16, 1.0, 0.3), AlphaMode::Auto());
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.alpha_used, 0.0);
  EXPECT_NEAR(r.loss, 0.0, 1e-15);  // negatives carry weight alpha = 0
  EXPECT_THROW(SlpLoss(Counted(0, 0), GridField(16, 16, 1.0, 0.3), AlphaMode::Auto()),
               std::invalid_argument);
}

TEST(SlpLossTest, ConstantAlphaValidation) {
  EXPECT_THROW(AlphaMode::Constant(1.5), std::invalid_argument);
  EXPECT_THROW(AlphaMode::Constant(-0.1), std::invalid_argument);
  const SlpLossReport r = SlpLoss(Counted(1, 3), GridField(16, 16, 1.0, 0.5), AlphaMode::Constant(0.1));
  EXPECT_DOUBLE_EQ(r.alpha_used, 0.1);
  EXPECT_DOUBLE_EQ(r.alpha_ib, 0.25);
  const nlohmann::json j = r.ToJson();
  EXPECT_EQ(j["pos_count"], 1);
  EXPECT_EQ(j["neg_count"], 3);
}

TEST(SlpLossTest, SoftLabelsAccepted) {
  GridField labels(8, 8, 1.0, 0.3), region(8, 8, 1.0, 1.0), y(8, 8, 1.0, 0.3);
  const SlpLossReport r = BalancedCrossEntropy(labels, region, y, 0.5);
  // alpha = 0.5: the minimiser of each term is y_hat = label.
  for (std::size_t k = 0; k < r.grad.size(); ++k) EXPECT_NEAR(r.grad[k], 0.0, 1e-12);
}

TEST(NllSlpTest, ClosedFormsAndReference) {
  GridField region(8, 8, 1.0, 0.0);
  for (int k = 0; k < 10; ++k) region[k] = 1.0;
  GridField truth(8, 8, 1.0, 0.0);
  truth[2] = truth[5] = 1.0;
  EXPECT_NEAR(NllSlp(truth, GridField(8, 8, 1.0, 0.5), region), 10 * kLog2, 1e-12);
  EXPECT_NEAR(NllSlp(truth, truth, region), 0.0, 1e-5);

  std::mt19937_64 rng(3);
  const GridField y = RandomField({8, 8}, rng);
  double want = 0.0;
  for (int k = 0; k < 10; ++k) want -= truth[k] == 1.0 ? std::log(y[k]) : std::log(1 - y[k]);
  EXPECT_NEAR(NllSlp(truth, y, region), want, 1e-12);
  EXPECT_THROW(NllSlp(truth, y, GridField(8, 8, 1.0, 0.0)), std::invalid_argument);
}

}  // namespace
}  // namespace dslp
