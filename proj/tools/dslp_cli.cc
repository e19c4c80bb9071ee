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

// dslp: generate synthetic worlds, train the field predictor, fit lane graphs
// and evaluate them.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dslp/pipeline.h"

namespace fs = std::filesystem;
using namespace dslp;

namespace {

std::uint64_t DefaultSeed() {
  if (const char* env = std::getenv("DSLP_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("DSLP_SEED is not an integer: ") + env);
    }
  }
  return 0;
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return nlohmann::json::parse(in);
}

void WriteJson(const std::string& path, const nlohmann::json& j) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<std::string> SampleFiles(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".dgf") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .dgf samples in " + dir);
  return files;
}

struct Options {
  // gen
  std::string template_name = "fourway";
  int grid = 128;
  double rho = 0.3;
  int trajectories = 5;
  // shared
  std::uint64_t seed = 0;
  std::string in, out, data, heldout, model, field, graph, gt, pred, config;
  std::string completion = "oracle";
  double completion_noise = 0.05;
  int jobs = 1;
  // augment
  int count = 20;
  // train
  std::string alpha = "auto";
  double lambda = 1.0;
  int steps = 300;
  double learning_rate = 0.05;
  int batch = 4;
  int hidden = 32;
  // graph
  double uturn_distance = -1.0;
  int n_samples = 64;
  double accept = 3.0;
  // eval
  double raster_width = 0.0;
};

RunManifest Manifest(const std::string& command, nlohmann::json config,
                     std::vector<std::string> inputs, std::vector<std::string> outputs,
                     std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config = std::move(config);
  m.seeds = {{"global", seed}};
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.wall_clock = CurrentWallClock();
  return m;
}

void CmdGen(const Options& o) {
  const WorldTemplate tmpl = WorldTemplate::For(ParseTemplate(o.template_name), o.grid);
  ObservationConfig oc;
  oc.route_coverage = o.rho;
  oc.trajectories_per_route = o.trajectories;
  const RunManifest m = Manifest("gen",
                                 {{"template", TemplateName(tmpl.kind)}, {"grid", o.grid},
                                  {"rho", o.rho}, {"trajectories", o.trajectories}},
                                 {}, {o.out}, o.seed);
  const GeneratedWorld world = GenerateWorld(tmpl, o.seed);
  const SampledObservations obs = SampleObservations(world.truth, oc, MixSeed(o.seed, 1));
  StoredSample s;
  s.world = world.partial;
  s.obs = obs.obs;
  s.truth = world.truth;
  s.meta = {{"template", TemplateName(tmpl.kind)}, {"seed", o.seed},
            {"observed_routes", obs.observed_routes}};
  SaveSample(o.out, s, m.Hash());
  std::cout << "wrote " << o.out << " (" << world.truth.routes.size() << " routes, "
            << obs.observed_routes.size() << " observed)\n";
}

void CmdAugment(const Options& o) {
  const StoredSample src = LoadSample(o.in);
  if (!src.obs) throw std::runtime_error("augment needs a sample with observations");
  const RunManifest m = Manifest("augment", {{"count", o.count}, {"completion", o.completion}},
                                 {o.in}, {o.out}, o.seed);
  // Copies carry no ground truth, so the world is completed before warping.
  const LayeredWorld input =
      src.truth ? CompleteStored(src, ParseCompletionMode(o.completion), o.completion_noise,
                                 MixSeed(o.seed, 0x5eed))
                : src.world;
  const GridDims dims = input.dims();
  const std::string stem = fs::path(o.in).stem().string();
  for (int k = 0; k < o.count; ++k) {
    const WarpSpec spec = SampleWarp(MixSeed(o.seed, k), WarpLimits::Defaults(dims), dims);
    auto [world, obs] = WarpWorld(input, *src.obs, spec);
    StoredSample s;
    s.world = std::move(world);
    s.obs = std::move(obs);
    s.meta = {{"source", o.in}, {"augmentation", k},
              {"warp", {{"rotation", spec.rotation}, {"translate_x", spec.translate_x},
                        {"translate_y", spec.translate_y},
                        {"displacement_x", spec.x.displacement},
                        {"displacement_y", spec.y.displacement}}}};
    std::ostringstream name;
    name << stem << "_aug" << std::setw(2) << std::setfill('0') << k << ".dgf";
    SaveSample((fs::path(o.out) / name.str()).string(), s, m.Hash());
  }
  std::cout << "wrote " << o.count << " augmented samples to " << o.out << "\n";
}

void CmdTrain(const Options& o) {
  TrainConfig tc;
  ParseAlpha(o.alpha, tc);
  tc.lambda = o.lambda;
  tc.steps = o.steps;
  tc.learning_rate = o.learning_rate;
  tc.batch_size = o.batch;
  tc.seed = o.seed;
  tc.jobs = o.jobs;
  tc.eval_every = std::max(1, o.steps / 10);
  tc.Validate();
  const CompletionMode mode = ParseCompletionMode(o.completion);

  std::vector<TrainingSample> data;
  const std::vector<std::string> files = SampleFiles(o.data);
  for (std::size_t k = 0; k < files.size(); ++k) {
    const StoredSample s = LoadSample(files[k]);
    if (!s.obs) continue;
    const LayeredWorld input =
        s.truth ? CompleteStored(s, mode, o.completion_noise, MixSeed(o.seed, k)) : s.world;
    data.push_back({input, *s.obs,
                    EncodeTrajectories(s.obs->trajectories, input.dims(), input.cell_size(),
                                       kDefaultDirectionBins, kDefaultVonMisesKappa)});
  }
  if (data.empty()) throw std::runtime_error("no training samples with observations");
  std::vector<EvalSample> heldout;
  if (!o.heldout.empty()) {
    const std::vector<std::string> hfiles = SampleFiles(o.heldout);
    for (std::size_t k = 0; k < hfiles.size(); ++k) {
      const StoredSample s = LoadSample(hfiles[k]);
      if (!s.truth) continue;
      heldout.push_back({CompleteStored(s, mode, o.completion_noise, MixSeed(o.seed, 1000 + k)),
                         s.truth->lane_raster_true, s.truth->road_region, s.truth->dir_true});
    }
  }
  ArchSpec arch;
  arch.in_channels = static_cast<int>(data.front().input.channels.size());
  arch.layers = {{5, o.hidden}, {5, o.hidden}};
  nlohmann::json cfg = tc.ToJson();
  cfg["arch"] = arch.ToJson();
  cfg["completion"] = o.completion;
  const RunManifest m = Manifest("train", cfg, {o.data, o.heldout}, {o.out}, o.seed);
  const TrainResult r = Train(data, heldout, arch, tc);
  const fs::path out(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteBytes(o.out, EncodeModel(r.predictor));
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& tp : r.trace) trace.push_back(tp.ToJson());
  WriteJson(o.out + ".json", {{"manifest", m.ToJson()},
                              {"alpha_dataset_mean", r.alpha_dataset_mean},
                              {"trace", trace}});
  const TracePoint& last = r.trace.back();
  std::cout << "trained on " << data.size() << " samples, final loss " << last.train_loss;
  if (!heldout.empty()) {
    std::cout << ", held-out NLL slp " << last.heldout_nll_slp << " dp " << last.heldout_nll_dp;
  }
  std::cout << "\n";
}

void CmdInfer(const Options& o) {
  const Predictor pred = DecodeModel(ReadBytes(o.model));
  const StoredSample s = LoadSample(o.in);
  const CompletionMode mode = ParseCompletionMode(o.completion);
  const LayeredWorld input =
      s.truth ? CompleteStored(s, mode, o.completion_noise, o.seed) : s.world;
  const PredictorOutput out = Forward(pred, input);
  const fs::path p(o.out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  WriteDgf(o.out, PredictionToDgf(out));
  std::cout << "wrote " << o.out << "\n";
}

void CmdGraph(const Options& o) {
  const PredictorOutput f = PredictionFromDgf(ReadDgf(o.field));
  GraphConfig gc;
  gc.seed = o.seed;
  gc.jobs = o.jobs;
  gc.n_samples = o.n_samples;
  gc.nll_accept_threshold = o.accept;
  gc.uturn_distance = o.uturn_distance > 0.0
                          ? o.uturn_distance
                          : 2.0 * std::max(4.0, std::round(f.y_hat.width() * 6.0 / 128.0));
  const RunManifest m = Manifest("graph", gc.ToJson(), {o.field}, {o.out}, o.seed);
  const LaneGraph g = FitLaneGraph(f.y_hat, f.w_hat, gc);
  nlohmann::json j = g.ToJson();
  j["manifest_hash"] = m.Hash();
  WriteJson(o.out, j);
  std::cout << "wrote " << o.out << " (" << g.nodes.size() << " nodes, " << g.edges.size()
            << " edges)\n";
}

void CmdEval(const Options& o) {
  const PredictorOutput f = PredictionFromDgf(ReadDgf(o.pred));
  const LaneGraph g = LaneGraph::FromJson(ReadJson(o.graph));
  const StoredSample gt = LoadSample(o.gt);
  if (!gt.truth) throw std::runtime_error("missing ground truth in " + o.gt);
  EvalConfig ec;
  ec.raster_width = o.raster_width;
  const RunManifest m = Manifest("eval", {{"raster_width", o.raster_width}},
                                 {o.pred, o.graph, o.gt}, {o.out}, o.seed);
  const EvalReport r =
      EvalReport::Aggregate({EvaluateSample(f.y_hat, f.w_hat, g, EvalTruth::From(*gt.truth), ec)});
  nlohmann::json j = r.ToJson();
  j["manifest_hash"] = m.Hash();
  WriteJson(o.out, j);
  std::cout << r.mean.ToJson().dump() << "\n";
}

void CmdRender(const Options& o) {
  std::optional<PredictorOutput> f;
  std::optional<LaneGraph> g;
  GridDims dims;
  if (!o.field.empty()) {
    const DgfFile file = ReadDgf(o.field);
    if (file.Has("slp") && HasDirField(file)) {
      f = PredictionFromDgf(file);
    } else if (file.Has("gt_p_true")) {
      f = PredictorOutput{file.Get("gt_p_true"), GetDirField(file, "gt_")};
    } else {
      throw std::runtime_error("unknown artifact: " + o.field);
    }
    dims = f->y_hat.dims();
  }
  if (!o.graph.empty()) {
    const nlohmann::json j = ReadJson(o.graph);
    if (!j.contains("nodes") || !j.contains("edges")) {
      throw std::runtime_error("unknown artifact: " + o.graph);
    }
    g = LaneGraph::FromJson(j);
    if (!f) {
      if (o.grid <= 0) throw std::runtime_error("render of a bare graph needs --grid");
      dims = {o.grid, o.grid};
    }
  }
  if (!f && !g) throw std::runtime_error("render needs --field and/or --graph");
  const std::vector<std::uint8_t> bytes =
      RenderPpm(dims, f ? &f->y_hat : nullptr, f ? &f->w_hat : nullptr, g ? &*g : nullptr);
  WriteBytes(o.out, bytes);
  std::cout << "wrote " << o.out << " (" << dims.width << "x" << dims.height << ")\n";
}

void CmdPipeline(const Options& o, const CLI::App& sub) {
  nlohmann::json j = o.config.empty() ? nlohmann::json::object() : ReadJson(o.config);
  // Flags override the config file.
  if (sub.count("--seed") > 0 || !j.contains("seed")) j["seed"] = o.seed;
  if (sub.count("--jobs") > 0) j["jobs"] = o.jobs;
  if (sub.count("--steps") > 0) j["train"]["steps"] = o.steps;
  const PipelineConfig cfg = PipelineConfig::FromJson(j);
  const PipelineOutcome r = RunPipeline(cfg, o.out);
  std::cout << "pipeline " << r.manifest_hash << ": " << r.report.mean.ToJson().dump() << "\n";
  if (!r.ablation.empty()) std::cout << AblationTable(r.ablation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional soft lane probability: synthetic worlds, training, lane graphs"};
  app.require_subcommand(1);
  Options o;
  try {
    o.seed = DefaultSeed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  auto* gen = app.add_subcommand("gen", "generate a synthetic world with observations");
  gen->add_option("--template", o.template_name, "straight|curve|tjunction|fourway|fork|merge");
  gen->add_option("--grid", o.grid, "grid size in cells")->check(CLI::Range(8, 4096));
  gen->add_option("--seed", o.seed, "world seed (default $DSLP_SEED)");
  gen->add_option("--rho", o.rho, "route coverage")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--trajectories", o.trajectories, "trajectories per observed route");
  gen->add_option("--out", o.out, "output .dgf")->required();

  auto* aug = app.add_subcommand("augment", "write warped copies of a sample");
  aug->add_option("--in", o.in, "input sample")->required()->check(CLI::ExistingFile);
  aug->add_option("--seed", o.seed, "warp seed");
  aug->add_option("--completion", o.completion, "oracle | noisy | passthrough");
  aug->add_option("--count", o.count, "number of copies")->check(CLI::Range(1, 10000));
  aug->add_option("--out", o.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train the field predictor");
  train->add_option("--data", o.data, "directory of training samples")->required();
  train->add_option("--heldout", o.heldout, "directory of held-out samples with ground truth");
  train->add_option("--alpha", o.alpha, "auto | mean | constant in [0,1]");
  train->add_option("--lambda", o.lambda, "directional loss weight");
  train->add_option("--steps", o.steps, "gradient steps");
  train->add_option("--lr", o.learning_rate, "learning rate");
  train->add_option("--batch", o.batch, "batch size");
  train->add_option("--hidden", o.hidden, "hidden channels per layer");
  train->add_option("--completion", o.completion, "oracle | noisy | passthrough");
  train->add_option("--seed", o.seed, "training seed");
  train->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
  train->add_option("--out", o.out, "output model file")->required();

  auto* infer = app.add_subcommand("infer", "predict SLP and DP fields for a sample");
  infer->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  infer->add_option("--in", o.in, "input sample")->required()->check(CLI::ExistingFile);
  infer->add_option("--completion", o.completion, "oracle | noisy | passthrough");
  infer->add_option("--seed", o.seed, "completion noise seed");
  infer->add_option("--out", o.out, "output prediction .dgf")->required();

  auto* graph = app.add_subcommand("graph", "fit the maximum likelihood lane graph");
  graph->add_option("--field", o.field, "prediction .dgf")->required()->check(CLI::ExistingFile);
  graph->add_option("--seed", o.seed, "sampling seed");
  graph->add_option("--samples", o.n_samples, "control points per endpoint pair");
  graph->add_option("--accept", o.accept, "mean per-point NLL acceptance threshold");
  graph->add_option("--uturn-distance", o.uturn_distance, "cells (default 2 lane widths)");
  graph->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
  graph->add_option("--out", o.out, "output graph .json")->required();

  auto* eval = app.add_subcommand("eval", "evaluate predictions and a graph");
  eval->add_option("--pred", o.pred, "prediction .dgf")->required()->check(CLI::ExistingFile);
  eval->add_option("--graph", o.graph, "graph .json")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", o.gt, "sample with ground truth")->required()->check(CLI::ExistingFile);
  eval->add_option("--raster-width", o.raster_width, "graph raster width (default lane width)");
  eval->add_option("--out", o.out, "output report .json")->required();

  auto* render = app.add_subcommand("render", "render a field and/or graph as PPM");
  render->add_option("--field", o.field, "prediction or ground-truth .dgf")->check(CLI::ExistingFile);
  render->add_option("--graph", o.graph, "graph .json")->check(CLI::ExistingFile);
  render->add_option("--grid", o.grid, "image size for a bare graph");
  render->add_option("--out", o.out, "output .ppm")->required();

  auto* pipe = app.add_subcommand("pipeline", "run gen, augment, train, infer, graph, eval, render");
  pipe->add_option("--config", o.config, "JSON config")->check(CLI::ExistingFile);
  pipe->add_option("--seed", o.seed, "global seed (default $DSLP_SEED)");
  pipe->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
  pipe->add_option("--steps", o.steps, "override training steps");
  pipe->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*gen) CmdGen(o);
    if (*aug) CmdAugment(o);
    if (*train) CmdTrain(o);
    if (*infer) CmdInfer(o);
    if (*graph) CmdGraph(o);
    if (*eval) CmdEval(o);
    if (*render) CmdRender(o);
    if (*pipe) CmdPipeline(o, *pipe);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
