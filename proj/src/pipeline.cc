/* Copyright 2026 The DSLP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dslp/pipeline.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dslp/parallel.h"

namespace dslp {
namespace fs = std::filesystem;
namespace {

// Seed stream tags.
enum : std::uint64_t {
  kTrainWorldStream = 1,
  kTrainObsStream,
  kTrainCompleteStream,
  kAugmentStream,
  kHeldWorldStream,
  kHeldObsStream,
  kHeldCompleteStream,
  kTrainerStream,
  kGraphStream,
};

std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return MixSeed(MixSeed(seed, stream), index);
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string Indexed(const std::string& prefix, std::size_t k) {
  std::ostringstream os;
  os << prefix << std::setw(3) << std::setfill('0') << k;
  return os.str();
}

nlohmann::json PolylineJson(const Polyline& line) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point& p : line) arr.push_back({p.x, p.y});
  return arr;
}

Polyline PolylineFromJson(const nlohmann::json& arr) {
  Polyline line;
  for (const auto& p : arr) line.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return line;
}

// HSV with s, v in [0, 1] and h in [0, 1) to 8-bit RGB.
std::array<std::uint8_t, 3> HsvToRgb(double h, double s, double v) {
  const double h6 = h * 6.0;
  const int sector = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = v, g = t, b = p;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto byte = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  return {byte(r), byte(g), byte(b)};
}

}  // namespace

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Fnv1a64(const std::string& text) {
  return Fnv1a64(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string Hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

nlohmann::json RunManifest::ToJson() const {
  return {{"command", command},   {"config", config},
          {"seeds", seeds},       {"inputs", inputs},
          {"outputs", outputs},   {"tool_version", tool_version},
          {"wall_clock", wall_clock}, {"manifest_hash", Hash()}};
}

std::string RunManifest::Hash() const {
  const nlohmann::json canonical = {{"command", command}, {"config", config},
                                    {"seeds", seeds},     {"inputs", inputs},
                                    {"outputs", outputs}, {"tool_version", tool_version}};
  return Hex64(Fnv1a64(canonical.dump()));
}

std::string CurrentWallClock() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// ---- Sample files.

DgfFile SampleToDgf(const StoredSample& sample) {
  sample.world.Validate();
  DgfFile file;
  file.width = sample.world.dims().width;
  file.height = sample.world.dims().height;
  file.cell_size = static_cast<float>(sample.world.cell_size());
  for (const auto& c : sample.world.channels) file.Add(c.name, c.field);
  file.Add("observation_mask", sample.world.observation_mask);
  if (sample.obs) {
    file.Add("pos_mask", sample.obs->pos_mask);
    file.Add("neg_mask", sample.obs->neg_mask);
  }
  if (sample.truth) {
    const GroundTruth& gt = *sample.truth;
    file.Add("gt_p_true", gt.p_true);
    file.Add("gt_lane_raster", gt.lane_raster_true);
    file.Add("gt_road_region", gt.road_region);
    file.Add("gt_lane_width", GridField(gt.p_true.dims(), gt.p_true.cell_size(), gt.lane_width));
    AddDirField(file, gt.dir_true, "gt_");
    for (const auto& c : gt.complete_world.channels) file.Add("gt_world_" + c.name, c.field);
  }
  return file;
}

nlohmann::json SampleSidecar(const StoredSample& sample, const std::string& manifest_hash) {
  nlohmann::json j;
  j["format"] = "dslp-sample";
  j["manifest_hash"] = manifest_hash;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& c : sample.world.channels) names.push_back(c.name);
  j["channels"] = names;
  if (sample.obs) {
    nlohmann::json trajs = nlohmann::json::array();
    for (const auto& t : sample.obs->trajectories) trajs.push_back(PolylineJson(t));
    j["trajectories"] = trajs;
  }
  if (sample.truth) {
    j["lane_graph"] = sample.truth->lane_graph_true.ToJson();
    j["lane_width"] = sample.truth->lane_width;
    j["sigma"] = sample.truth->sigma;
  }
  j["meta"] = sample.meta;
  return j;
}

StoredSample SampleFromFiles(const DgfFile& file, const nlohmann::json& sidecar) {
  StoredSample s;
  for (const auto& name : sidecar.at("channels")) {
    s.world.channels.push_back({name.get<std::string>(), file.Get(name.get<std::string>())});
  }
  s.world.observation_mask = file.Get("observation_mask");
  s.world.Validate();
  if (file.Has("pos_mask") && sidecar.contains("trajectories")) {
    ObservationSet obs;
    obs.pos_mask = file.Get("pos_mask");
    obs.neg_mask = file.Get("neg_mask");
    for (const auto& t : sidecar.at("trajectories")) obs.trajectories.push_back(PolylineFromJson(t));
    s.obs = std::move(obs);
  }
  if (file.Has("gt_p_true")) {
    GroundTruth gt;
    gt.p_true = file.Get("gt_p_true");
    gt.lane_raster_true = file.Get("gt_lane_raster");
    gt.road_region = file.Get("gt_road_region");
    gt.dir_true = GetDirField(file, "gt_");
    gt.lane_width = sidecar.value("lane_width", 0.0);
    gt.sigma = sidecar.value("sigma", 0.0);
    if (sidecar.contains("lane_graph")) gt.lane_graph_true = LaneGraph::FromJson(sidecar["lane_graph"]);
    for (const auto& c : s.world.channels) {
      const std::string key = "gt_world_" + c.name;
      if (file.Has(key)) gt.complete_world.channels.push_back({c.name, file.Get(key)});
    }
    gt.complete_world.observation_mask = GridField(gt.p_true.dims(), gt.p_true.cell_size(), 1.0);
    s.truth = std::move(gt);
  }
  s.meta = sidecar.value("meta", nlohmann::json::object());
  return s;
}

std::string SidecarPath(const std::string& dgf_path) {
  fs::path p(dgf_path);
  p.replace_extension(".json");
  return p.string();
}

void SaveSample(const std::string& path, const StoredSample& sample,
                const std::string& manifest_hash) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  WriteDgf(path, SampleToDgf(sample));
  WriteText(fs::absolute(SidecarPath(path)), Dump(SampleSidecar(sample, manifest_hash)));
}

StoredSample LoadSample(const std::string& path) {
  const DgfFile file = ReadDgf(path);
  const std::string side = SidecarPath(path);
  if (!fs::exists(side)) throw std::runtime_error("missing sidecar " + side);
  return SampleFromFiles(file, nlohmann::json::parse(ReadText(side)));
}

LayeredWorld CompleteStored(const StoredSample& sample, CompletionMode mode,
                            double noise_sigma, std::uint64_t seed) {
  if (mode == CompletionMode::kPassthrough) return sample.world;
  if (!sample.truth || sample.truth->complete_world.channels.size() != sample.world.channels.size()) {
    throw std::runtime_error("world completion needs the complete world channels");
  }
  return CompleteWorld(sample.world, *sample.truth, mode, noise_sigma, seed);
}

// ---- Predictions.

DgfFile PredictionToDgf(const PredictorOutput& out) {
  DgfFile file;
  file.width = out.y_hat.width();
  file.height = out.y_hat.height();
  file.cell_size = static_cast<float>(out.y_hat.cell_size());
  file.Add("slp", out.y_hat);
  AddDirField(file, out.w_hat);
  return file;
}

PredictorOutput PredictionFromDgf(const DgfFile& file) {
  if (!file.Has("slp") || !HasDirField(file)) {
    throw std::runtime_error("not a prediction file (needs slp and dir_* channels)");
  }
  return {file.Get("slp"), GetDirField(file)};
}

// ---- Rendering.

std::vector<std::uint8_t> RenderPpm(GridDims dims, const GridField* y_hat,
                                    const DirField* w_hat, const LaneGraph* graph,
                                    const std::string& comment) {
  if (dims.width <= 0 || dims.height <= 0) throw std::invalid_argument("empty image");
  if ((y_hat && y_hat->dims() != dims) || (w_hat && w_hat->dims() != dims)) {
    throw std::invalid_argument("render dims differ");
  }
  std::vector<std::uint8_t> rgb(dims.size() * 3, 0);
  auto pixel = [&](int i, int j) {
    const std::size_t row = static_cast<std::size_t>(dims.height - 1 - j);
    return (row * dims.width + i) * 3;
  };
  for (int j = 0; j < dims.height; ++j) {
    for (int i = 0; i < dims.width; ++i) {
      const double v = y_hat ? std::clamp(y_hat->at(i, j), 0.0, 1.0) : (w_hat ? 1.0 : 0.0);
      double hue = 0.0, sat = 0.0;
      if (w_hat && w_hat->defined(i, j)) {
        const int m = ArgmaxBin(w_hat->dist(i, j));
        hue = BinCenter(m, w_hat->bins()) / (2.0 * 3.14159265358979323846);
        sat = 1.0;
      }
      const auto c = HsvToRgb(hue, sat, v);
      std::copy(c.begin(), c.end(), rgb.begin() + pixel(i, j));
    }
  }
  if (graph) {
    GridField edges(dims, 1.0, 0.0);
    for (const LaneEdge& e : graph->edges) BurnPolyline(e.polyline, 0.5, edges);
    for (int j = 0; j < dims.height; ++j) {
      for (int i = 0; i < dims.width; ++i) {
        if (edges.at(i, j) < 0.5) continue;
        std::fill_n(rgb.begin() + pixel(i, j), 3, std::uint8_t{255});
      }
    }
  }
  std::ostringstream header;
  header << "P6\n";
  if (!comment.empty()) header << "# " << comment << "\n";
  header << dims.width << " " << dims.height << "\n255\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.insert(out.end(), rgb.begin(), rgb.end());
  return out;
}

// ---- Suites.

SuiteConfig SuiteConfig::FromJson(const nlohmann::json& j) {
  SuiteConfig c;
  c.grid_size = j.value("grid_size", c.grid_size);
  if (j.contains("templates")) {
    c.templates.clear();
    for (const auto& t : j["templates"]) c.templates.push_back(ParseTemplate(t.get<std::string>()));
  }
  c.train_worlds = j.value("train_worlds", c.train_worlds);
  c.heldout_worlds = j.value("heldout_worlds", c.heldout_worlds);
  c.observation.route_coverage = j.value("route_coverage", c.observation.route_coverage);
  c.observation.trajectories_per_route =
      j.value("trajectories_per_route", c.observation.trajectories_per_route);
  c.observation.lateral_noise = j.value("lateral_noise", c.observation.lateral_noise);
  if (j.contains("completion")) c.completion = ParseCompletionMode(j["completion"].get<std::string>());
  c.completion_noise = j.value("completion_noise", c.completion_noise);
  c.augment = j.value("augment", c.augment);
  c.augment_copies = j.value("augment_copies", c.augment_copies);
  return c;
}

nlohmann::json SuiteConfig::ToJson() const {
  nlohmann::json names = nlohmann::json::array();
  for (TemplateKind k : templates) names.push_back(TemplateName(k));
  return {{"grid_size", grid_size},
          {"templates", names},
          {"train_worlds", train_worlds},
          {"heldout_worlds", heldout_worlds},
          {"route_coverage", observation.route_coverage},
          {"trajectories_per_route", observation.trajectories_per_route},
          {"lateral_noise", observation.lateral_noise},
          {"completion", CompletionModeName(completion)},
          {"completion_noise", completion_noise},
          {"augment", augment},
          {"augment_copies", augment_copies}};
}

Suite BuildSuite(const SuiteConfig& config, int jobs) {
  if (config.templates.empty()) throw std::invalid_argument("suite needs at least one template");
  if (config.train_worlds < 1 || config.heldout_worlds < 0 || config.augment_copies < 0) {
    throw std::invalid_argument("bad suite sizes");
  }
  const std::size_t n_train = config.train_worlds;
  const std::size_t n_held = config.heldout_worlds;
  const std::size_t copies = config.augment ? config.augment_copies : 0;
  Suite suite;
  suite.train_worlds.resize(n_train);
  suite.train_observations.resize(n_train);
  std::vector<TrainingSample> originals(n_train);
  std::vector<std::vector<TrainingSample>> augmented(n_train);
  auto kind_of = [&](std::size_t k) { return config.templates[k % config.templates.size()]; };

  ParallelFor(n_train, jobs, [&](std::size_t k) {
    const WorldTemplate tmpl = WorldTemplate::For(kind_of(k), config.grid_size);
    GeneratedWorld world = GenerateWorld(tmpl, StreamSeed(config.seed, kTrainWorldStream, k));
    SampledObservations obs =
        SampleObservations(world.truth, config.observation, StreamSeed(config.seed, kTrainObsStream, k));
    LayeredWorld input = CompleteWorld(world.partial, world.truth, config.completion,
                                       config.completion_noise,
                                       StreamSeed(config.seed, kTrainCompleteStream, k));
    const GridDims dims = input.dims();
    TrainingSample sample{input, obs.obs,
                          EncodeTrajectories(obs.obs.trajectories, dims, input.cell_size(),
                                             tmpl.direction_bins, tmpl.kappa)};
    for (std::size_t c = 0; c < copies; ++c) {
      const WarpSpec spec = SampleWarp(StreamSeed(config.seed, kAugmentStream, k * 1024 + c),
                                       WarpLimits::Defaults(dims), dims);
      auto [w, o] = WarpWorld(input, obs.obs, spec);
      DirField target = EncodeTrajectories(o.trajectories, dims, w.cell_size(),
                                           tmpl.direction_bins, tmpl.kappa);
      augmented[k].push_back({std::move(w), std::move(o), std::move(target)});
    }
    originals[k] = std::move(sample);
    suite.train_worlds[k] = std::move(world);
    suite.train_observations[k] = std::move(obs);
  });
  suite.train = std::move(originals);
  for (auto& list : augmented) {
    for (auto& s : list) suite.train.push_back(std::move(s));
  }

  suite.heldout.resize(n_held);
  ParallelFor(n_held, jobs, [&](std::size_t k) {
    const WorldTemplate tmpl = WorldTemplate::For(kind_of(k), config.grid_size);
    HeldoutWorld h;
    h.world = GenerateWorld(tmpl, StreamSeed(config.seed, kHeldWorldStream, k));
    h.observations = SampleObservations(h.world.truth, config.observation,
                                        StreamSeed(config.seed, kHeldObsStream, k));
    h.input = CompleteWorld(h.world.partial, h.world.truth, config.completion,
                            config.completion_noise, StreamSeed(config.seed, kHeldCompleteStream, k));
    suite.heldout[k] = std::move(h);
  });
  for (const HeldoutWorld& h : suite.heldout) {
    suite.heldout_eval.push_back({h.input, h.world.truth.lane_raster_true,
                                  h.world.truth.road_region, h.world.truth.dir_true});
  }
  return suite;
}

std::optional<double> UnobservedLaneError(const GridField& y_hat,
                                          const GroundTruth& truth,
                                          const std::vector<int>& observed_routes) {
  const double lane_radius = truth.sigma * std::sqrt(2.0 * std::log(0.95 / 0.5));
  std::vector<bool> observed(truth.routes.size(), false);
  for (int r : observed_routes) observed.at(r) = true;
  double sum = 0.0;
  std::size_t count = 0;
  for (int j = 0; j < y_hat.height(); ++j) {
    for (int i = 0; i < y_hat.width(); ++i) {
      if (truth.lane_raster_true.at(i, j) < 0.5) continue;
      const Point p{static_cast<double>(i), static_cast<double>(j)};
      bool on_observed = false, on_unobserved = false;
      for (std::size_t r = 0; r < truth.routes.size(); ++r) {
        if (PointPolylineDistance(p, truth.routes[r].centerline) >= lane_radius) continue;
        (observed[r] ? on_observed : on_unobserved) = true;
      }
      if (on_unobserved && !on_observed) {
        sum += std::fabs(y_hat.at(i, j) - truth.p_true.at(i, j));
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

// ---- Pipeline.

PipelineConfig PipelineConfig::FromJson(const nlohmann::json& j) {
  PipelineConfig c;
  c.seed = j.value("seed", c.seed);
  c.jobs = j.value("jobs", c.jobs);
  c.render = j.value("render", c.render);
  if (j.contains("suite")) c.suite = SuiteConfig::FromJson(j["suite"]);
  if (j.contains("arch")) {
    const auto& a = j["arch"];
    c.arch.bins = a.value("bins", c.arch.bins);
    if (a.contains("layers")) {
      c.arch.layers.clear();
      for (const auto& l : a["layers"]) {
        c.arch.layers.push_back({l.value("kernel", 5), l.value("hidden", 8)});
      }
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.steps = t.value("steps", c.train.steps);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.lambda = t.value("lambda", c.train.lambda);
    c.train.momentum = t.value("momentum", c.train.momentum);
    c.train.cosine_decay = t.value("cosine_decay", c.train.cosine_decay);
    c.train.eval_every = t.value("eval_every", c.train.eval_every);
    if (t.contains("alpha")) {
      const auto& a = t["alpha"];
      ParseAlpha(a.is_string() ? a.get<std::string>() : a.dump(), c.train);
    }
  }
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    c.graph.nms_window = g.value("nms_window", c.graph.nms_window);
    c.graph.slp_threshold = g.value("slp_threshold", c.graph.slp_threshold);
    c.graph.boundary_band = g.value("boundary_band", c.graph.boundary_band);
    c.graph.coherence_variance = g.value("coherence_variance", c.graph.coherence_variance);
    c.graph.n_samples = g.value("n_samples", c.graph.n_samples);
    c.graph.eval_points = g.value("eval_points", c.graph.eval_points);
    c.graph.min_slp = g.value("min_slp", c.graph.min_slp);
    c.graph.nll_accept_threshold = g.value("nll_accept_threshold", c.graph.nll_accept_threshold);
    if (g.contains("uturn_distance")) {
      c.graph.uturn_distance = g["uturn_distance"].get<double>();
      c.graph_uturn_from_lane_width = false;
    }
  }
  if (j.contains("ablation")) {
    const auto& a = j["ablation"];
    for (const auto& v : a.value("alpha", nlohmann::json::array())) {
      TrainConfig probe;
      const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
      ParseAlpha(s, probe);
      c.ablation_alpha.push_back(s);
    }
    for (const auto& v : a.value("completion", nlohmann::json::array())) {
      c.ablation_completion.push_back(ParseCompletionMode(v.get<std::string>()));
    }
    for (const auto& v : a.value("augment", nlohmann::json::array())) {
      c.ablation_augment.push_back(v.get<bool>());
    }
  }
  c.train.Validate();
  c.arch.Validate();
  if (c.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  return c;
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json train_json = train.ToJson();
  train_json.erase("seed");
  nlohmann::json graph_json = graph.ToJson();
  graph_json.erase("seed");
  if (graph_uturn_from_lane_width) graph_json["uturn_distance"] = "2*lane_width";
  nlohmann::json j = {{"seed", seed},
                      {"suite", suite.ToJson()},
                      {"arch", arch.ToJson()},
                      {"train", train_json},
                      {"graph", graph_json},
                      {"render", render}};
  if (has_ablation()) {
    nlohmann::json modes = nlohmann::json::array();
    for (CompletionMode m : ablation_completion) modes.push_back(CompletionModeName(m));
    j["ablation"] = {{"alpha", ablation_alpha}, {"completion", modes}, {"augment", ablation_augment}};
  }
  return j;
}

PipelineOutcome RunExperiment(const PipelineConfig& config, const Suite& suite) {
  if (suite.train.empty()) throw std::invalid_argument("empty training set");
  ArchSpec arch = config.arch;
  arch.in_channels = static_cast<int>(suite.train.front().input.channels.size());
  arch.bins = suite.train.front().dir_target.bins();
  TrainConfig tc = config.train;
  tc.seed = StreamSeed(config.seed, kTrainerStream, 0);
  tc.jobs = config.jobs;

  PipelineOutcome outcome;
  outcome.training = Train(suite.train, suite.heldout_eval, arch, tc);
  const Predictor& pred = outcome.training.predictor;

  const std::size_t n = suite.heldout.size();
  std::vector<SampleMetrics> metrics(n);
  outcome.graphs.resize(n);
  ParallelFor(n, config.jobs, [&](std::size_t k) {
    const HeldoutWorld& h = suite.heldout[k];
    const PredictorOutput out = Forward(pred, h.input);
    GraphConfig gc = config.graph;
    gc.seed = StreamSeed(config.seed, kGraphStream, k);
    gc.jobs = 1;
    if (config.graph_uturn_from_lane_width) gc.uturn_distance = 2.0 * h.world.truth.lane_width;
    outcome.graphs[k] = FitLaneGraph(out.y_hat, out.w_hat, gc);
    metrics[k] = EvaluateSample(out.y_hat, out.w_hat, outcome.graphs[k], EvalTruth::From(h.world.truth));
  });
  outcome.report = EvalReport::Aggregate(std::move(metrics));
  return outcome;
}

nlohmann::json AblationToJson(const std::vector<AblationRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const AblationRow& r : rows) {
    nlohmann::json row = r.report.mean.ToJson();
    row["alpha"] = r.alpha;
    row["completion"] = CompletionModeName(r.completion);
    row["augment"] = r.augment;
    row["stddev"] = r.report.stddev.ToJson();
    arr.push_back(row);
  }
  return arr;
}

std::string AblationTable(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "alpha" << std::setw(13) << "completion" << std::setw(6)
     << "aug" << std::right << std::setw(12) << "nll_slp" << std::setw(12) << "nll_dp"
     << std::setw(12) << "nll_total" << std::setw(9) << "dir_acc" << std::setw(8) << "iou"
     << std::setw(8) << "f1" << "\n";
  os << std::fixed;
  for (const AblationRow& r : rows) {
    const SampleMetrics& m = r.report.mean;
    os << std::left << std::setw(8) << r.alpha << std::setw(13) << CompletionModeName(r.completion)
       << std::setw(6) << (r.augment ? "on" : "off") << std::right << std::setprecision(2)
       << std::setw(12) << m.nll_slp << std::setw(12) << m.nll_dp << std::setw(12) << m.nll_total
       << std::setprecision(3) << std::setw(9) << m.dir_acc << std::setw(8) << m.iou
       << std::setw(8) << m.f1 << "\n";
  }
  return os.str();
}

namespace {

std::vector<AblationRow> RunAblation(const PipelineConfig& base) {
  const std::vector<std::string> alphas =
      base.ablation_alpha.empty() ? std::vector<std::string>{AlphaLabel(base.train)} : base.ablation_alpha;
  const std::vector<CompletionMode> modes =
      base.ablation_completion.empty() ? std::vector<CompletionMode>{base.suite.completion}
                                       : base.ablation_completion;
  const std::vector<bool> augs =
      base.ablation_augment.empty() ? std::vector<bool>{base.suite.augment} : base.ablation_augment;
  std::vector<AblationRow> rows;
  for (CompletionMode mode : modes) {
    for (bool aug : augs) {
      PipelineConfig cfg = base;
      cfg.suite.completion = mode;
      cfg.suite.augment = aug;
      cfg.suite.seed = base.seed;
      const Suite suite = BuildSuite(cfg.suite, cfg.jobs);
      for (const std::string& alpha : alphas) {
        ParseAlpha(alpha, cfg.train);
        AblationRow row;
        row.alpha = alpha;
        row.completion = mode;
        row.augment = aug;
        row.report = RunExperiment(cfg, suite).report;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace

PipelineOutcome RunPipeline(const PipelineConfig& config, const std::string& out_dir) {
  RunManifest manifest;
  manifest.command = "pipeline";
  manifest.config = config.ToJson();
  manifest.seeds = {{"global", config.seed}};
  // Relative names only; the destination directory is not part of the run identity.
  manifest.outputs = {"worlds", "augmented", "model.bin", "trace.json", "predictions",
                      "graphs", "report.json"};
  manifest.wall_clock = CurrentWallClock();
  const std::string hash = manifest.Hash();

  const fs::path final_dir = fs::absolute(out_dir);
  const fs::path staging = final_dir.string() + ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  PipelineOutcome outcome;
  try {
    PipelineConfig cfg = config;
    cfg.suite.seed = config.seed;
    const Suite suite = BuildSuite(cfg.suite, cfg.jobs);

    // gen + augment
    const std::size_t n_train = suite.train_worlds.size();
    for (std::size_t k = 0; k < suite.train.size(); ++k) {
      StoredSample s;
      s.world = suite.train[k].input;
      s.obs = suite.train[k].obs;
      if (k < n_train) {
        s.truth = suite.train_worlds[k].truth;
        s.meta = {{"split", "train"}, {"world", k}};
        SaveSample((staging / "worlds" / (Indexed("train_", k) + ".dgf")).string(), s, hash);
      } else {
        s.meta = {{"split", "train"}, {"augmented", true}};
        SaveSample((staging / "augmented" / (Indexed("aug_", k - n_train) + ".dgf")).string(), s, hash);
      }
    }
    for (std::size_t k = 0; k < suite.heldout.size(); ++k) {
      StoredSample s;
      s.world = suite.heldout[k].input;
      s.obs = suite.heldout[k].observations.obs;
      s.truth = suite.heldout[k].world.truth;
      s.meta = {{"split", "heldout"}, {"world", k}};
      SaveSample((staging / "worlds" / (Indexed("heldout_", k) + ".dgf")).string(), s, hash);
    }

    // train + infer + graph + eval
    outcome = RunExperiment(cfg, suite);
    outcome.manifest_hash = hash;
    WriteBytes((staging / "model.bin").string(), EncodeModel(outcome.training.predictor));
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& tp : outcome.training.trace) trace.push_back(tp.ToJson());
    WriteText(staging / "trace.json",
              Dump({{"manifest_hash", hash},
                    {"alpha_dataset_mean", outcome.training.alpha_dataset_mean},
                    {"trace", trace}}));
    fs::create_directories(staging / "predictions");
    for (std::size_t k = 0; k < suite.heldout.size(); ++k) {
      const PredictorOutput out = Forward(outcome.training.predictor, suite.heldout[k].input);
      WriteDgf((staging / "predictions" / (Indexed("heldout_", k) + ".dgf")).string(),
               PredictionToDgf(out));
      nlohmann::json g = outcome.graphs[k].ToJson();
      g["manifest_hash"] = hash;
      WriteText(staging / "graphs" / (Indexed("heldout_", k) + ".json"), Dump(g));
      if (config.render) {
        fs::create_directories(staging / "renders");
        WriteBytes((staging / "renders" / (Indexed("heldout_", k) + ".ppm")).string(),
                   RenderPpm(out.y_hat.dims(), &out.y_hat, &out.w_hat, &outcome.graphs[k],
                             "manifest " + hash));
      }
    }
    nlohmann::json report = outcome.report.ToJson();
    report["manifest_hash"] = hash;
    WriteText(staging / "report.json", Dump(report));

    if (config.has_ablation()) {
      outcome.ablation = RunAblation(cfg);
      WriteText(staging / "ablation.json",
                Dump({{"manifest_hash", hash}, {"rows", AblationToJson(outcome.ablation)}}));
      WriteText(staging / "ablation.txt", AblationTable(outcome.ablation));
    }

    std::map<std::string, nlohmann::json> files;
    for (const auto& entry : fs::recursive_directory_iterator(staging)) {
      if (!entry.is_regular_file()) continue;
      const std::vector<std::uint8_t> bytes = ReadBytes(entry.path().string());
      files[fs::relative(entry.path(), staging).generic_string()] = {
          {"fnv1a", Hex64(Fnv1a64(bytes))}, {"bytes", bytes.size()}};
    }
    WriteText(staging / "artifacts.json", Dump({{"manifest_hash", hash}, {"files", files}}));
    WriteText(staging / "manifest.json", Dump(manifest.ToJson()));
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(final_dir);
  fs::rename(staging, final_dir);
  return outcome;
}

}  // namespace dslp
