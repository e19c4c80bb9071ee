// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Pass criterion numbers as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dslp/augment.h"
#include "dslp/directional.h"
#include "dslp/evalmetrics.h"
#include "dslp/graphgen.h"
#include "dslp/objective.h"
#include "dslp/pipeline.h"
#include "dslp/synthworld.h"
#include "dslp/trainer.h"

namespace dslp {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances and thresholds.
constexpr double kLossGradRelTol = 1e-4;
constexpr double kParamGradRelTol = 1e-3;
constexpr int kGradInstances = 20;
constexpr int kBoundPairs = 1000;
constexpr int kSeedRuns = 10;
constexpr int kSeedWinsNeeded = 8;
constexpr double kGraphIou = 0.6;
constexpr double kGraphF1 = 0.7;
constexpr double kUniformTol = 1e-9;
constexpr double kNormTol = 1e-6;
constexpr double kBoundaryResidual = 1e-9;
constexpr double kRoundTripCells = 0.5;
constexpr double kContainmentFraction = 0.9;
constexpr int kContainmentWorlds = 100;
constexpr double kJobsTol = 1e-9;

// Shared training setup for the learning criteria.
constexpr int kGrid = 48;
constexpr int kHidden = 8;
constexpr int kKernel = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double RelErr(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

GridField RandomField(GridDims dims, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  GridField f(dims, 1.0);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

ObservationSet RandomObs(GridDims dims, std::mt19937_64& rng, double p_pos, double p_neg) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ObservationSet obs{GridField(dims, 1.0), GridField(dims, 1.0), {}};
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

std::vector<double> RandomDist(std::mt19937_64& rng, int bins) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> d(bins);
  double s = 0.0;
  for (double& v : d) s += v = u(rng);
  for (double& v : d) v /= s;
  return d;
}

DirField RandomDirField(GridDims dims, int bins, std::mt19937_64& rng, double p_defined) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DirField f(dims, bins);
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    if (u(rng) < p_defined) f.Set(c, RandomDist(rng, bins));
  }
  if (f.DefinedCount() == 0) f.Set(0, RandomDist(rng, bins));
  return f;
}

LayeredWorld RandomWorld(GridDims dims, int channels, std::mt19937_64& rng) {
  LayeredWorld w;
  w.observation_mask = GridField(dims, 1.0, 1.0);
  for (int c = 0; c < channels; ++c) {
    w.channels.push_back({"c" + std::to_string(c), RandomField(dims, rng, 0.0, 1.0)});
  }
  return w;
}

// ---- 1. Gradient correctness.
Outcome GradientCorrectness() {
  const GridDims dims{16, 16};
  std::mt19937_64 rng(101);
  double worst_slp = 0.0, worst_dp = 0.0, worst_param = 0.0;
  for (int inst = 0; inst < kGradInstances; ++inst) {
    // SLP objective against y_hat.
    const ObservationSet obs = RandomObs(dims, rng, 0.15, 0.5);
    GridField y = RandomField(dims, rng, 0.05, 0.95);
    const AlphaMode mode = inst % 2 ? AlphaMode::Auto() : AlphaMode::Constant(0.2);
    const SlpLossReport slp = SlpLoss(obs, y, mode);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double h = 1e-6, v = y[k];
      y[k] = v + h;
      const double up = SlpLoss(obs, y, mode).loss;
      y[k] = v - h;
      const double down = SlpLoss(obs, y, mode).loss;
      y[k] = v;
      worst_slp = std::max(worst_slp, RelErr(slp.grad[k], (up - down) / (2 * h), 1e-6));
    }
    // DP objective against w_hat.
    const DirField target = RandomDirField(dims, 8, rng, 0.3);
    DirField pred = RandomDirField(dims, 8, rng, 1.0);
    const DpLossReport dp = DpLoss(target, pred);
    for (std::size_t c = 0; c < pred.cell_count(); c += 3) {
      for (int m = 0; m < 8; ++m) {
        const double h = 1e-6, v = pred.dist(c)[m];
        pred.mutable_dist(c)[m] = v + h;
        const double up = DpLoss(target, pred).loss;
        pred.mutable_dist(c)[m] = v - h;
        const double down = DpLoss(target, pred).loss;
        pred.mutable_dist(c)[m] = v;
        worst_dp = std::max(worst_dp, RelErr(dp.grad[c * 8 + m], (up - down) / (2 * h), 1e-6));
      }
    }
    // Full predictor backprop against parameters.
    ArchSpec arch;
    arch.in_channels = 3;
    arch.layers = {{3, 4}, {3, 4}};
    arch.bins = 8;
    Predictor p = Predictor::Random(arch, 200 + inst);
    const LayeredWorld world = RandomWorld(dims, 3, rng);
    const ObservationSet pobs = RandomObs(dims, rng, 0.2, 0.5);
    const DirField ptarget = RandomDirField(dims, 8, rng, 0.3);
    const LossWeights weights{mode, 1.0};
    const LossAndGradient g = Backward(p, world, pobs, ptarget, weights);
    for (std::size_t k = 0; k < p.params().size(); ++k) {
      const double h = 1e-5, v = p.params()[k];
      p.mutable_params()[k] = v + h;
      const double up = EvaluateLoss(p, world, pobs, ptarget, weights);
      p.mutable_params()[k] = v - h;
      const double down = EvaluateLoss(p, world, pobs, ptarget, weights);
      p.mutable_params()[k] = v;
      worst_param = std::max(worst_param, RelErr(g.grad[k], (up - down) / (2 * h), 1e-4));
    }
  }
  return {worst_slp <= kLossGradRelTol && worst_dp <= kLossGradRelTol &&
              worst_param <= kParamGradRelTol,
          Fmt("%d instances, worst rel err slp %.2e dp %.2e params %.2e", kGradInstances,
              worst_slp, worst_dp, worst_param)};
}

// ---- 2. Information-balance bound.
Outcome InformationBound() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, checked = 0;
  while (checked < kBoundPairs) {
    const ObservationSet obs = RandomObs({12, 12}, rng, 0.5 * u(rng), 0.5 * u(rng));
    if (obs.pos_count() + obs.neg_count() == 0) continue;
    const GridField y = RandomField({12, 12}, rng, 0.0, 1.0);
    const double hp = InfoContribPos(obs, y), hn = InfoContribNeg(obs, y);
    const double h = BalancedInfo(hp, hn, AlphaIB(obs));
    violations += !(h >= 0.0 && h <= std::max(hp, hn) * (1.0 + 1e-12));
    ++checked;
  }
  return {violations == 0, Fmt("%d pairs, %d violations", checked, violations)};
}

ArchSpec LearningArch(const Suite& suite) {
  ArchSpec arch;
  arch.in_channels = static_cast<int>(suite.train.front().input.channels.size());
  arch.layers = {{kKernel, kHidden}, {kKernel, kHidden}};
  return arch;
}

// ---- 3. Unbiasedness ordering.
Outcome Unbiasedness() {
  const std::vector<std::string> alphas = {"auto", "0.5", "0.05", "0.1", "0.2", "mean"};
  int wins_a = 0, wins_b = 0;
  for (int r = 0; r < kSeedRuns; ++r) {
    SuiteConfig sc;
    sc.grid_size = kGrid;
    sc.templates = {TemplateKind::kCurve, TemplateKind::kTIntersection, TemplateKind::kFourWay,
                    TemplateKind::kFork, TemplateKind::kMerge};
    sc.train_worlds = 20;
    sc.heldout_worlds = 10;
    sc.observation.route_coverage = 0.3;
    sc.augment = false;
    sc.seed = 100 + r;
    const Suite suite = BuildSuite(sc);
    std::vector<double> nll, err;
    for (const std::string& a : alphas) {
      TrainConfig tc;
      tc.steps = 200;
      tc.seed = r;
      ParseAlpha(a, tc);
      const TrainResult tr = Train(suite.train, {}, LearningArch(suite), tc);
      const auto [ns, nd] = HeldoutNll(tr.predictor, suite.heldout_eval);
      double e = 0.0;
      int n = 0;
      for (const HeldoutWorld& h : suite.heldout) {
        const PredictorOutput out = Forward(tr.predictor, h.input);
        if (auto u = UnobservedLaneError(out.y_hat, h.world.truth, h.observations.observed_routes)) {
          e += *u;
          ++n;
        }
      }
      nll.push_back(ns + nd);
      err.push_back(n ? e / n : 0.0);
    }
    wins_a += err[0] < err[1];
    wins_b += std::all_of(nll.begin() + 1, nll.end(), [&](double v) { return nll[0] < v; });
    std::printf("  [3] seed %d  unobserved err auto %.4f vs 0.5 %.4f | NLL auto %.1f, 0.5 %.1f, "
                "0.05 %.1f, 0.1 %.1f, 0.2 %.1f, mean %.1f\n",
                r, err[0], err[1], nll[0], nll[1], nll[2], nll[3], nll[4], nll[5]);
    std::fflush(stdout);
  }
  return {wins_a >= kSeedWinsNeeded && wins_b >= kSeedWinsNeeded,
          Fmt("(a) auto beats 0.5 on unobserved lanes in %d/%d, (b) auto has lowest NLL in %d/%d "
              "(need %d)",
              wins_a, kSeedRuns, wins_b, kSeedRuns, kSeedWinsNeeded)};
}

std::pair<double, double> TrainAndScore(const SuiteConfig& sc, int steps, std::uint64_t seed) {
  const Suite suite = BuildSuite(sc);
  TrainConfig tc;
  tc.steps = steps;
  tc.seed = seed;
  const TrainResult tr = Train(suite.train, {}, LearningArch(suite), tc);
  return HeldoutNll(tr.predictor, suite.heldout_eval);
}

// ---- 4. Data scaling.
// Every size gets at least kMinSteps; larger sets get a fixed number of passes.
constexpr int kMinSteps = 300;
constexpr int kScalingEpochs = 24;
int ScalingSteps(int worlds) {
  return std::max(kMinSteps, kScalingEpochs * worlds / TrainConfig{}.batch_size);
}

Outcome DataScaling() {
  const int sizes[] = {10, 30, 100};
  int wins = 0;
  for (int r = 0; r < kSeedRuns; ++r) {
    std::vector<double> nll;
    for (int n : sizes) {
      SuiteConfig sc;
      sc.grid_size = kGrid;
      sc.train_worlds = n;
      sc.heldout_worlds = 12;
      sc.augment = false;
      sc.seed = 500 + r;  // nested training sets, shared held-out worlds
      const auto [ns, nd] = TrainAndScore(sc, ScalingSteps(n), r);
      nll.push_back(ns + nd);
    }
    const bool ok = nll[0] > nll[1] && nll[1] > nll[2];
    wins += ok;
    std::printf("  [4] rep %d  NLL 10: %.1f  30: %.1f  100: %.1f  %s\n", r, nll[0], nll[1], nll[2],
                ok ? "decreasing" : "not decreasing");
    std::fflush(stdout);
  }
  return {wins >= kSeedWinsNeeded,
          Fmt("strictly decreasing in %d/%d repetitions (need %d)", wins, kSeedRuns,
              kSeedWinsNeeded)};
}

// ---- 5. Ablation trend.
Outcome AblationTrend() {
  int wins_wm = 0, wins_aug = 0;
  for (int r = 0; r < kSeedRuns; ++r) {
    SuiteConfig sc;
    sc.grid_size = kGrid;
    sc.train_worlds = 20;
    sc.heldout_worlds = 12;
    sc.seed = 500 + r;
    const double base = TrainAndScore(sc, 300, r).second;
    sc.completion = CompletionMode::kPassthrough;
    const double pass = TrainAndScore(sc, 300, r).second;
    sc.completion = CompletionMode::kOracle;
    sc.augment = false;
    const double noaug = TrainAndScore(sc, 300, r).second;
    wins_wm += base < pass;
    wins_aug += base < noaug;
    std::printf("  [5] seed %d  dir NLL oracle+aug %.1f  passthrough %.1f  no-aug %.1f\n", r, base,
                pass, noaug);
    std::fflush(stdout);
  }
  return {wins_wm >= kSeedWinsNeeded && wins_aug >= kSeedWinsNeeded,
          Fmt("oracle beats passthrough %d/%d, augmentation beats none %d/%d (need %d)", wins_wm,
              kSeedRuns, wins_aug, kSeedRuns, kSeedWinsNeeded)};
}

// ---- 6. Graph fitting on oracle fields.
Outcome OracleGraphs() {
  double worst_iou = 1.0, worst_f1 = 1.0;
  std::string worst;
  for (TemplateKind k : AllTemplates()) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const GeneratedWorld gw = GenerateWorld(WorldTemplate::For(k, 64), seed);
      GraphConfig cfg;
      cfg.uturn_distance = 2 * gw.truth.lane_width;
      const LaneGraph g = FitLaneGraph(gw.truth.p_true, gw.truth.dir_true, cfg);
      const SampleMetrics m =
          EvaluateSample(gw.truth.p_true, gw.truth.dir_true, g, EvalTruth::From(gw.truth));
      if (m.iou < worst_iou || m.f1 < worst_f1) worst = TemplateName(k);
      worst_iou = std::min(worst_iou, m.iou);
      worst_f1 = std::min(worst_f1, m.f1);
    }
  }
  // Two parallel opposite lanes.
  WorldTemplate t = WorldTemplate::For(TemplateKind::kStraight, 64);
  t.lane_count = 2;
  int uturns = 0;
  std::size_t edges = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const GeneratedWorld gw = GenerateWorld(t, seed);
    GraphConfig cfg;
    cfg.uturn_distance = 2 * gw.truth.lane_width;
    const LaneGraph g = FitLaneGraph(gw.truth.p_true, gw.truth.dir_true, cfg);
    edges += g.edges.size();
    for (const LaneEdge& e : g.edges) {
      const Point a = g.nodes[e.from].position, b = g.nodes[e.to].position;
      uturns += std::hypot(a.x - b.x, a.y - b.y) < cfg.uturn_distance;
    }
  }
  return {worst_iou >= kGraphIou && worst_f1 >= kGraphF1 && uturns == 0 && edges > 0,
          Fmt("min IoU %.3f, min F1 %.3f (%s); two-lane template: %zu edges, %d u-turns",
              worst_iou, worst_f1, worst.c_str(), edges, uturns)};
}

// ---- 7. Distribution machinery.
Outcome Distributions() {
  std::mt19937_64 rng(707);
  const DirField w = RandomDirField({16, 16}, 16, rng, 0.5);
  const double kl = DpLoss(w, w).loss;
  double uniform_dev = 0.0;
  for (int bins : {4, 8, 16, 36}) {
    for (double mu : {0.0, 1.0, 4.0}) {
      for (double v : EncodeVonMises({mu, 0.0}, bins)) {
        uniform_dev = std::max(uniform_dev, std::abs(v - 1.0 / bins));
      }
    }
  }
  std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
  double norm_dev = 0.0;
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<double>> parts;
    for (int k = 0; k <= t % 5; ++k) parts.push_back(EncodeVonMises({u(rng), 1.0 + t % 7}, 16));
    const auto sum = Superimpose(parts);
    double s = 0.0;
    for (double v : *sum) s += v;
    norm_dev = std::max(norm_dev, std::abs(s - 1.0));
  }
  double min_acc = 1.0;
  for (TemplateKind k : AllTemplates()) {
    const GeneratedWorld gw = GenerateWorld(WorldTemplate::For(k, 64), 7);
    min_acc = std::min(min_acc, DirectionalAccuracy(gw.truth.dir_true, gw.truth.dir_true,
                                                    gw.truth.lane_raster_true));
  }
  return {kl == 0.0 && uniform_dev < kUniformTol && norm_dev < kNormTol && min_acc == 1.0,
          Fmt("KL(w||w) = %.1e, kappa 0 deviation %.1e, superposition norm error %.1e, "
              "oracle dir acc %.3f",
              kl, uniform_dev, norm_dev, min_acc)};
}

// ---- 8. Warp correctness.
Outcome Warps() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double residual = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double extent = 16.0 + 240.0 * (u(rng) + 1.0) / 2.0;
    const double disp = u(rng) * extent / 8.0;
    const AxisWarp w = AxisWarp::FromDisplacement(disp, extent);
    residual = std::max({residual, std::abs(w.Forward(0.0)), std::abs(w.Forward(extent) - extent),
                         std::abs(w.Forward(extent / 2) - extent / 2 - disp)});
  }
  double round_trip = 0.0;
  const GridDims dims{kGrid, kGrid};
  for (int t = 0; t < 50; ++t) {
    const WarpSpec spec = SampleWarp(rng, WarpLimits::Defaults(dims), dims);
    for (int j = 0; j < kGrid; j += 3) {
      for (int i = 0; i < kGrid; i += 3) {
        const Point p{static_cast<double>(i), static_cast<double>(j)};
        const auto back = spec.Inverse(spec.Forward(p));
        round_trip = std::max(round_trip, back ? std::hypot(back->x - p.x, back->y - p.y) : 1e9);
      }
    }
  }
  // Identity spec reproduces the world bit for bit.
  const GeneratedWorld gw = GenerateWorld(WorldTemplate::For(TemplateKind::kFork, kGrid), 8);
  const SampledObservations so = SampleObservations(gw.truth, {}, 9);
  const auto [iw, iobs] = WarpWorld(gw.truth.complete_world, so.obs, WarpSpec::Identity(dims));
  bool identity = iobs.pos_mask == so.obs.pos_mask && iobs.neg_mask == so.obs.neg_mask;
  for (std::size_t c = 0; c < iw.channels.size(); ++c) {
    identity = identity && iw.channels[c].field == gw.truth.complete_world.channels[c].field;
  }
  // Warped trajectory cells must land inside the warped road layer:
  // |traj & road| / |traj|.
  double min_inside = 1.0;
  for (int t = 0; t < kContainmentWorlds; ++t) {
    const TemplateKind k = AllTemplates()[t % AllTemplates().size()];
    const GeneratedWorld w = GenerateWorld(WorldTemplate::For(k, kGrid), 1000 + t);
    const SampledObservations o = SampleObservations(w.truth, {}, 2000 + t);
    const WarpSpec spec = SampleWarp(3000 + t, WarpLimits::Defaults(dims), dims);
    const auto [ww, wo] = WarpWorld(w.truth.complete_world, o.obs, spec);
    const GridField& road = ww.channel("road");
    double inside = 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < road.size(); ++c) {
      if (wo.pos_mask[c] < 0.5) continue;
      total += 1.0;
      inside += road[c] >= 0.5 ? 1.0 : 0.0;
    }
    if (total > 0.0) min_inside = std::min(min_inside, inside / total);
  }
  return {residual < kBoundaryResidual && round_trip <= kRoundTripCells && identity &&
              min_inside >= kContainmentFraction,
          Fmt("boundary residual %.1e, round trip %.2e cells, identity %s, min trajectory-in-road "
              "containment %.3f over %d worlds",
              residual, round_trip, identity ? "bit-exact" : "differs", min_inside,
              kContainmentWorlds)};
}

// ---- 9. Reproducibility.
std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome Reproducibility() {
  PipelineConfig c = PipelineConfig::FromJson(nlohmann::json::parse(R"({
    "seed": 11,
    "suite": {"grid_size": 32, "train_worlds": 6, "heldout_worlds": 3},
    "arch": {"layers": [{"kernel": 5, "hidden": 6}, {"kernel": 5, "hidden": 6}]},
    "train": {"steps": 40}
  })"));
  const fs::path root = fs::temp_directory_path() / "dslp_acceptance_repro";
  fs::remove_all(root);
  RunPipeline(c, (root / "a").string());
  RunPipeline(c, (root / "b").string());
  int files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root / "a");
    if (rel == "manifest.json") continue;  // carries the wall clock
    ++files;
    differing += Slurp(e.path()) != Slurp(root / "b" / rel);
  }
  c.jobs = 1;
  const PipelineOutcome one = RunExperiment(c, BuildSuite(c.suite, 1));
  c.jobs = 4;
  const PipelineOutcome four = RunExperiment(c, BuildSuite(c.suite, 4));
  double diff = 0.0;
  for (std::size_t k = 0; k < one.report.samples.size(); ++k) {
    const SampleMetrics& x = one.report.samples[k];
    const SampleMetrics& y = four.report.samples[k];
    diff = std::max({diff, std::abs(x.nll_slp - y.nll_slp), std::abs(x.nll_dp - y.nll_dp),
                     std::abs(x.dir_acc - y.dir_acc), std::abs(x.iou - y.iou),
                     std::abs(x.f1 - y.f1)});
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0 && diff <= kJobsTol,
          Fmt("%d artifacts compared, %d differ; max |jobs 4 - jobs 1| metric diff %.1e", files,
              differing, diff)};
}

}  // namespace
}  // namespace dslp

int main(int argc, char** argv) {
  using namespace dslp;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", GradientCorrectness},
      {"information-balance bound", InformationBound},
      {"unbiasedness ordering", Unbiasedness},
      {"data-scaling trend", DataScaling},
      {"ablation trend", AblationTrend},
      {"graph fitting on oracle fields", OracleGraphs},
      {"distribution machinery", Distributions},
      {"warp correctness", Warps},
      {"reproducibility", Reproducibility},
  };
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
