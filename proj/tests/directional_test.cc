#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "dslp/directional.h"

namespace dslp {
namespace {

using std::numbers::pi;
using Big = boost::multiprecision::cpp_dec_float_50;

std::vector<double> RandomDist(std::mt19937_64& rng, int bins) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> d(bins);
  double total = 0.0;
  for (double& v : d) total += (v = u(rng));
  for (double& v : d) v /= total;
  return d;
}

DirField OneCell(const std::vector<double>& d) {
  DirField f({8, 8}, static_cast<int>(d.size()));
  f.Set(0, 0, d);
  return f;
}

GridField AllCells(GridDims dims) { return GridField(dims, 1.0, 1.0); }

TEST(BinsTest, CentersAndWrap) {
  EXPECT_DOUBLE_EQ(BinCenter(0, 4), pi / 4);
  EXPECT_EQ(BinOf(0.0, 4), 0);
  EXPECT_EQ(BinOf(-0.1, 4), 3);
  EXPECT_EQ(BinOf(2 * pi + 0.1, 4), 0);
  EXPECT_NEAR(AngularDistance(0.1, 2 * pi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(WrapAngle(-pi / 2), 1.5 * pi, 1e-12);
}

TEST(VonMisesTest, ZeroKappaIsUniform) {
  for (double mu : {0.0, 1.0, 4.0}) {
    for (double v : EncodeVonMises({mu, 0.0}, 8)) EXPECT_NEAR(v, 0.125, 1e-12);
  }
}

TEST(VonMisesTest, SymmetricAboutBinCenter) {
  const auto d = EncodeVonMises({BinCenter(3, 8), 8.0}, 8);
  EXPECT_EQ(ArgmaxBin(d), 3);
  EXPECT_NEAR(d[2], d[4], 1e-9);
}

TEST(VonMisesTest, MatchesHighPrecisionOracle) {
  const int bins = 16;
  const Big big_pi = boost::math::constants::pi<Big>();
  std::vector<Big> dens(bins);
  Big total = 0;
  for (int m = 0; m < bins; ++m) {
    const Big center = 2 * big_pi * (m + Big(0.5)) / bins;
    dens[m] = exp(Big(4) * cos(center - big_pi / 2));
    total += dens[m];
  }
  const auto d = EncodeVonMises({pi / 2, 4.0}, bins);
  for (int m = 0; m < bins; ++m) {
    EXPECT_NEAR(d[m], static_cast<double>(dens[m] / total), 1e-14) << m;
  }
}

TEST(VonMisesTest, RejectsBadInput) {
  EXPECT_THROW(VonMisesSpec(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(EncodeVonMises({0.0, 1.0}, 3), std::invalid_argument);
}

TEST(SuperimposeTest, IdentityAndEmpty) {
  const std::vector<std::vector<double>> one = {EncodeVonMises({1.0, 2.0}, 8)};
  const std::vector<double> same = *Superimpose(one);
  for (int m = 0; m < 8; ++m) EXPECT_NEAR(same[m], one[0][m], 1e-15);
  EXPECT_FALSE(Superimpose({}).has_value());
}

TEST(SuperimposeTest, OppositeDirectionsAreBimodal) {
  const double mu = BinCenter(1, 8);
  const std::vector<std::vector<double>> two = {EncodeVonMises({mu, 4.0}, 8),
                                                EncodeVonMises({mu + pi, 4.0}, 8)};
  const auto s = *Superimpose(two);
  EXPECT_NEAR(s[1], s[5], 1e-12);
  for (int m = 0; m < 8; ++m) EXPECT_LE(s[m], s[1] + 1e-12);
  const auto modes = FindModes(s);
  ASSERT_GE(modes.size(), 2u);
  EXPECT_NEAR(modes[0].mass, modes[1].mass, 1e-12);
}

TEST(SuperimposeTest, EqualsArithmeticMean) {
  std::mt19937_64 rng(3);
  const std::vector<std::vector<double>> ds = {RandomDist(rng, 8), RandomDist(rng, 8),
                                               RandomDist(rng, 8)};
  const auto s = *Superimpose(ds);
  double total = 0.0;
  for (int m = 0; m < 8; ++m) {
    EXPECT_NEAR(s[m], (ds[0][m] + ds[1][m] + ds[2][m]) / 3.0, 1e-15);
    total += s[m];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(EncodeTrajectoriesTest, TangentAndDefinedCells) {
  const std::vector<Polyline> trajs = {{{1.0, 4.0}, {10.0, 4.0}}};
  const DirField f = EncodeTrajectories(trajs, {12, 12}, 1.0, 16, 4.0);
  EXPECT_TRUE(f.defined(5, 4));
  EXPECT_FALSE(f.defined(5, 6));
  // Eastbound: bins 0 and 15 straddle angle 0.
  EXPECT_NEAR(f.dist(5, 4)[0], f.dist(5, 4)[15], 1e-12);
  EXPECT_LT(f.MaxNormalizationError(), 1e-12);
}

TEST(EncodeTrajectoriesTest, CrossingTrajectoriesSuperimpose) {
  const std::vector<Polyline> trajs = {{{0.0, 5.0}, {11.0, 5.0}}, {{5.0, 0.0}, {5.0, 11.0}}};
  const DirField f = EncodeTrajectories(trajs, {12, 12}, 1.0, 16, 4.0);
  const auto d = f.dist(5, 5);
  const auto east = EncodeVonMises({0.0, 4.0}, 16);
  const auto north = EncodeVonMises({pi / 2, 4.0}, 16);
  for (int m = 0; m < 16; ++m) EXPECT_NEAR(d[m], 0.5 * (east[m] + north[m]), 1e-12);
}

TEST(DpLossTest, IdenticalFieldsGiveZero) {
  std::mt19937_64 rng(9);
  DirField w({8, 8}, 8);
  for (std::size_t c = 0; c < w.cell_count(); c += 3) w.Set(c, RandomDist(rng, 8));
  EXPECT_NEAR(DpLoss(w, w).loss, 0.0, 1e-15);
}

TEST(DpLossTest, OneHotAgainstUniform) {
  const DirField w = OneCell({1, 0, 0, 0});
  const DirField q = OneCell({0.25, 0.25, 0.25, 0.25});
  EXPECT_NEAR(DpLoss(w, q).loss, std::log(4.0), 1e-12);
}

TEST(DpLossTest, RandomFieldMatchesReferenceLoop) {
  std::mt19937_64 rng(21);
  DirField w({8, 8}, 6), q({8, 8}, 6);
  for (std::size_t c = 0; c < q.cell_count(); ++c) q.Set(c, RandomDist(rng, 6));
  const std::size_t cells[] = {3, 17, 40};
  double want = 0.0;
  for (std::size_t c : cells) {
    const auto d = RandomDist(rng, 6);
    w.Set(c, d);
    for (int m = 0; m < 6; ++m) want += d[m] * std::log(d[m] / q.dist(c)[m]);
  }
  const DpLossReport r = DpLoss(w, q);
  EXPECT_EQ(r.defined_cells, 3u);
  EXPECT_NEAR(r.loss, want / 3.0, 1e-12);
}

TEST(DpLossTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  DirField w({8, 8}, 5), q({8, 8}, 5);
  for (std::size_t c = 0; c < q.cell_count(); ++c) q.Set(c, RandomDist(rng, 5));
  for (std::size_t c = 0; c < w.cell_count(); c += 7) w.Set(c, RandomDist(rng, 5));
  const DpLossReport r = DpLoss(w, q);
  const double h = 1e-6;
  for (std::size_t c = 0; c < 20; ++c) {
    for (int m = 0; m < 5; ++m) {
      DirField up = q, down = q;
      up.mutable_dist(c)[m] += h;
      down.mutable_dist(c)[m] -= h;
      const double fd = (DpLoss(w, up).loss - DpLoss(w, down).loss) / (2 * h);
      EXPECT_NEAR(r.grad[c * 5 + m], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(DpLossTest, NoSupervisionThrows) {
  DirField w({8, 8}, 4), q({8, 8}, 4);
  EXPECT_THROW(DpLoss(w, q), std::invalid_argument);
  EXPECT_THROW(DpLoss(w, DirField({8, 8}, 8)), std::invalid_argument);
}

TEST(NllDpTest, ClosedForms) {
  const double eps = 1e-3;
  const DirField w = OneCell({1, 0, 0, 0});
  const DirField q = OneCell({1 - 3 * eps, eps, eps, eps});
  EXPECT_NEAR(NllDp(w, q, AllCells({8, 8})), -std::log(1 - 3 * eps), 1e-12);
  const DirField u = OneCell(std::vector<double>(8, 0.125));
  EXPECT_NEAR(NllDp(u, u, AllCells({8, 8})), std::log(8.0), 1e-12);
}

TEST(NllDpTest, EqualsKlPlusEntropy) {
  std::mt19937_64 rng(77);
  DirField w({8, 8}, 8), q({8, 8}, 8);
  for (std::size_t c = 0; c < q.cell_count(); ++c) q.Set(c, RandomDist(rng, 8));
  double entropy = 0.0;
  for (std::size_t c = 0; c < w.cell_count(); c += 5) {
    const auto d = RandomDist(rng, 8);
    w.Set(c, d);
    for (double v : d) entropy -= v * std::log(v);
  }
  const double nll = NllDp(w, q, AllCells({8, 8}));
  const DpLossReport r = DpLoss(w, q);
  EXPECT_NEAR(nll, r.loss * r.defined_cells + entropy, 1e-9);
  EXPECT_GE(nll, r.loss * r.defined_cells - 1e-12);
}

TEST(DirectionalAccuracyTest, OracleAndOpposite) {
  DirField w({8, 8}, 16), opposite({8, 8}, 16);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2 * pi);
  for (std::size_t c = 0; c < w.cell_count(); ++c) {
    const double mu = BinCenter(BinOf(u(rng), 16), 16);
    w.Set(c, EncodeVonMises({mu, 6.0}, 16));
    opposite.Set(c, EncodeVonMises({mu + pi, 6.0}, 16));
  }
  EXPECT_DOUBLE_EQ(DirectionalAccuracy(w, w, AllCells({8, 8})), 1.0);
  EXPECT_DOUBLE_EQ(DirectionalAccuracy(w, opposite, AllCells({8, 8})), 0.0);
}

TEST(DirectionalAccuracyTest, MixedCellsMatchBruteForce) {
  const int bins = 16;
  DirField w({8, 8}, bins), q({8, 8}, bins);
  GridField mask({8, 8}, 1.0, 0.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 2 * pi);
  int correct = 0;
  for (std::size_t c = 0; c < 10; ++c) {
    const double t = u(rng), p = u(rng);
    w.Set(c, EncodeVonMises({t, 5.0}, bins));
    q.Set(c, EncodeVonMises({p, 5.0}, bins));
    mask[c] = 1.0;
    const double tb = BinCenter(ArgmaxBin(w.dist(c)), bins);
    const double pb = BinCenter(ArgmaxBin(q.dist(c)), bins);
    double diff = std::fmod(std::abs(tb - pb), 2 * pi);
    if (diff > pi) diff = 2 * pi - diff;
    correct += diff <= pi / 4 + 1e-9;
  }
  EXPECT_DOUBLE_EQ(DirectionalAccuracy(w, q, mask), correct / 10.0);
}

TEST(DirectionalAccuracyTest, SecondaryModeCounts) {
  const int bins = 16;
  const std::vector<std::vector<double>> modes = {EncodeVonMises({0.0, 6.0}, bins),
                                                  EncodeVonMises({pi / 2, 6.0}, bins)};
  DirField w({8, 8}, bins), q({8, 8}, bins);
  w.Set(0, *Superimpose(modes));
  q.Set(0, EncodeVonMises({pi / 2, 6.0}, bins));
  GridField mask({8, 8}, 1.0, 0.0);
  mask[0] = 1.0;
  EXPECT_DOUBLE_EQ(DirectionalAccuracy(w, q, mask), 1.0);
}

TEST(CircularStatsTest, VarianceAndMean) {
  EXPECT_NEAR(CircularVariance(std::vector<double>(8, 0.125)), 1.0, 1e-12);
  std::vector<double> spike(8, 0.0);
  spike[2] = 1.0;
  EXPECT_NEAR(CircularVariance(spike), 0.0, 1e-12);
  EXPECT_NEAR(MeanDirection(spike), BinCenter(2, 8), 1e-12);
}

TEST(DirFieldDgfTest, RoundTrip) {
  std::mt19937_64 rng(2);
  DirField w({8, 8}, 4);
  for (std::size_t c = 0; c < w.cell_count(); c += 2) {
    // f32 exact values
    std::vector<double> d = {0.5, 0.25, 0.125, 0.125};
    std::shuffle(d.begin(), d.end(), rng);
    w.Set(c, d);
  }
  DgfFile file;
  file.width = 8;
  file.height = 8;
  AddDirField(file, w, "gt_");
  EXPECT_TRUE(HasDirField(file, "gt_"));
  EXPECT_FALSE(HasDirField(file));
  EXPECT_EQ(GetDirField(file, "gt_"), w);
}

}  // namespace
}  // namespace dslp
