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

#include "dslp/trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dslp/parallel.h"

namespace dslp {
namespace {

// Offsets of each parameter block inside the flat vector.
struct ParamLayout {
  std::vector<std::size_t> weight;  // per conv layer
  std::vector<std::size_t> bias;
  std::size_t slp_w = 0, slp_b = 0, dp_w = 0, dp_b = 0, total = 0;
};

ParamLayout LayoutOf(const ArchSpec& arch) {
  ParamLayout l;
  std::size_t off = 0;
  int c_in = arch.in_channels;
  for (const auto& layer : arch.layers) {
    l.weight.push_back(off);
    off += static_cast<std::size_t>(layer.hidden) * c_in * layer.kernel * layer.kernel;
    l.bias.push_back(off);
    off += layer.hidden;
    c_in = layer.hidden;
  }
  l.slp_w = off;
  off += c_in;
  l.slp_b = off;
  off += 1;
  l.dp_w = off;
  off += static_cast<std::size_t>(arch.bins) * c_in;
  l.dp_b = off;
  off += arch.bins;
  l.total = off;
  return l;
}

int TrunkWidth(const ArchSpec& arch) {
  return arch.layers.empty() ? arch.in_channels : arch.layers.back().hidden;
}

// out[o] += sum_c W[o][c] (*) in[c], zero padding, "same" size.
void ConvAccumulate(const double* in, int c_in, const double* weight,
                    const double* bias, double* out, int c_out, int kernel,
                    int width, int height) {
  const int r = kernel / 2;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (int o = 0; o < c_out; ++o) {
    double* dst = out + o * n;
    std::fill(dst, dst + n, bias[o]);
    for (int c = 0; c < c_in; ++c) {
      const double* src = in + c * n;
      const double* w = weight + (static_cast<std::size_t>(o) * c_in + c) * kernel * kernel;
      for (int dy = 0; dy < kernel; ++dy) {
        for (int dx = 0; dx < kernel; ++dx) {
          const double wv = w[dy * kernel + dx];
          const int oy = dy - r, ox = dx - r;
          const int i0 = std::max(0, -ox), i1 = std::min(width, width - ox);
          const int j0 = std::max(0, -oy), j1 = std::min(height, height - oy);
          for (int j = j0; j < j1; ++j) {
            double* drow = dst + static_cast<std::size_t>(j) * width;
            const double* srow = src + static_cast<std::size_t>(j + oy) * width + ox;
            for (int i = i0; i < i1; ++i) drow[i] += wv * srow[i];
          }
        }
      }
    }
  }
}

// Given d/d(pre-activation) of a conv layer, accumulates weight/bias grads and
// (optionally) d/d(input).
void ConvBackward(const double* in, int c_in, const double* weight,
                  const double* dpre, int c_out, int kernel, int width,
                  int height, double* dweight, double* dbias, double* din) {
  const int r = kernel / 2;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (int o = 0; o < c_out; ++o) {
    const double* g = dpre + o * n;
    double b = 0.0;
    for (std::size_t p = 0; p < n; ++p) b += g[p];
    dbias[o] += b;
    for (int c = 0; c < c_in; ++c) {
      const double* src = in + c * n;
      const std::size_t woff = (static_cast<std::size_t>(o) * c_in + c) * kernel * kernel;
      for (int dy = 0; dy < kernel; ++dy) {
        for (int dx = 0; dx < kernel; ++dx) {
          const int oy = dy - r, ox = dx - r;
          const int i0 = std::max(0, -ox), i1 = std::min(width, width - ox);
          const int j0 = std::max(0, -oy), j1 = std::min(height, height - oy);
          const double wv = weight[woff + dy * kernel + dx];
          double acc = 0.0;
          for (int j = j0; j < j1; ++j) {
            const double* grow = g + static_cast<std::size_t>(j) * width;
            const double* srow = src + static_cast<std::size_t>(j + oy) * width + ox;
            for (int i = i0; i < i1; ++i) acc += grow[i] * srow[i];
            if (din != nullptr) {
              double* drow = din + c * n + static_cast<std::size_t>(j + oy) * width + ox;
              for (int i = i0; i < i1; ++i) drow[i] += wv * grow[i];
            }
          }
          dweight[woff + dy * kernel + dx] += acc;
        }
      }
    }
  }
}

struct ForwardCache {
  int width = 0, height = 0;
  std::vector<double> input;                    // C x n
  std::vector<std::vector<double>> activations;  // per layer, post-tanh
  std::vector<double> y_hat;                     // n
  std::vector<double> w_hat;                     // n x M, cell-major
};

ForwardCache RunForward(const Predictor& pred, const LayeredWorld& world) {
  const ArchSpec& arch = pred.arch();
  if (static_cast<int>(world.channels.size()) != arch.in_channels) {
    throw std::invalid_argument("channel mismatch");
  }
  world.Validate();
  const ParamLayout layout = LayoutOf(arch);
  const double* p = pred.params().data();
  ForwardCache cache;
  cache.width = world.dims().width;
  cache.height = world.dims().height;
  const std::size_t n = world.dims().size();
  cache.input.resize(n * arch.in_channels);
  for (int c = 0; c < arch.in_channels; ++c) {
    const auto v = world.channels[c].field.values();
    std::copy(v.begin(), v.end(), cache.input.begin() + c * n);
  }
  const double* in = cache.input.data();
  int c_in = arch.in_channels;
  for (std::size_t l = 0; l < arch.layers.size(); ++l) {
    const auto& spec = arch.layers[l];
    std::vector<double> out(n * spec.hidden);
    ConvAccumulate(in, c_in, p + layout.weight[l], p + layout.bias[l], out.data(),
                   spec.hidden, spec.kernel, cache.width, cache.height);
    for (double& v : out) v = std::tanh(v);
    cache.activations.push_back(std::move(out));
    in = cache.activations.back().data();
    c_in = spec.hidden;
  }
  const int m_bins = arch.bins;
  cache.y_hat.resize(n);
  cache.w_hat.resize(n * m_bins);
  std::vector<double> z(m_bins);
  for (std::size_t q = 0; q < n; ++q) {
    double s = p[layout.slp_b];
    for (int h = 0; h < c_in; ++h) s += p[layout.slp_w + h] * in[h * n + q];
    cache.y_hat[q] = 1.0 / (1.0 + std::exp(-s));
    double zmax = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_bins; ++m) {
      double a = p[layout.dp_b + m];
      const double* w = p + layout.dp_w + static_cast<std::size_t>(m) * c_in;
      for (int h = 0; h < c_in; ++h) a += w[h] * in[h * n + q];
      z[m] = a;
      zmax = std::max(zmax, a);
    }
    double total = 0.0;
    for (int m = 0; m < m_bins; ++m) {
      z[m] = std::exp(z[m] - zmax);
      total += z[m];
    }
    for (int m = 0; m < m_bins; ++m) cache.w_hat[q * m_bins + m] = z[m] / total;
  }
  return cache;
}

PredictorOutput ToOutput(const ForwardCache& cache, const LayeredWorld& world,
                         int bins) {
  PredictorOutput out;
  out.y_hat = GridField(world.dims().width, world.dims().height, world.cell_size(), cache.y_hat);
  out.w_hat = DirField(world.dims(), bins, world.cell_size());
  for (std::size_t q = 0; q < cache.y_hat.size(); ++q) {
    out.w_hat.Set(q, std::span<const double>(cache.w_hat.data() + q * bins, bins));
  }
  return out;
}

struct SampleLoss {
  double slp = 0.0;
  double dp = 0.0;
  double alpha = 0.0;
  std::vector<double> d_y;  // d loss / d y_hat
  std::vector<double> d_w;  // d loss / d w_hat
  bool has_slp = false;
  bool has_dp = false;
};

SampleLoss ComputeLoss(const PredictorOutput& out, const ObservationSet& obs,
                       const DirField& w_target, const LossWeights& weights) {
  SampleLoss s;
  if (obs.pos_count() + obs.neg_count() > 0) {
    const SlpLossReport r = SlpLoss(obs, out.y_hat, weights.alpha);
    s.slp = r.loss;
    s.alpha = r.alpha_used;
    s.d_y.assign(r.grad.values().begin(), r.grad.values().end());
    s.has_slp = true;
  }
  if (weights.lambda != 0.0 && w_target.cell_count() > 0 && w_target.DefinedCount() > 0) {
    DpLossReport r = DpLoss(w_target, out.w_hat);
    s.dp = r.loss;
    s.d_w = std::move(r.grad);
    s.has_dp = true;
  }
  return s;
}

}  // namespace

std::size_t ArchSpec::ParameterCount() const { return LayoutOf(*this).total; }

void ArchSpec::Validate() const {
  if (in_channels < 1) throw std::invalid_argument("in_channels must be positive");
  if (bins < 4) throw std::invalid_argument("insufficient angular resolution");
  for (const auto& l : layers) {
    if (l.kernel < 1 || l.kernel % 2 == 0) throw std::invalid_argument("kernel must be odd");
    if (l.hidden < 1) throw std::invalid_argument("hidden width must be positive");
  }
}

nlohmann::json ArchSpec::ToJson() const {
  nlohmann::json layers_json = nlohmann::json::array();
  for (const auto& l : layers) layers_json.push_back({{"kernel", l.kernel}, {"hidden", l.hidden}});
  return {{"in_channels", in_channels}, {"bins", bins}, {"layers", layers_json}};
}

Predictor::Predictor(ArchSpec arch)
    : arch_(std::move(arch)), params_(arch_.ParameterCount(), 0.0) {
  arch_.Validate();
}

Predictor::Predictor(ArchSpec arch, std::vector<double> params)
    : arch_(std::move(arch)), params_(std::move(params)) {
  arch_.Validate();
  if (params_.size() != arch_.ParameterCount()) {
    throw std::invalid_argument("parameter count does not match architecture");
  }
}

Predictor Predictor::Random(ArchSpec arch, std::uint64_t seed) {
  Predictor pred(std::move(arch));
  const ArchSpec& a = pred.arch();
  const ParamLayout layout = LayoutOf(a);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto& p = pred.mutable_params();
  int c_in = a.in_channels;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const int fan_in = c_in * a.layers[l].kernel * a.layers[l].kernel;
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t k = layout.weight[l]; k < layout.bias[l]; ++k) p[k] = scale * unit(rng);
    c_in = a.layers[l].hidden;
  }
  const double head = 1.0 / std::sqrt(static_cast<double>(c_in));
  for (std::size_t k = layout.slp_w; k < layout.slp_b; ++k) p[k] = head * unit(rng);
  for (std::size_t k = layout.dp_w; k < layout.dp_b; ++k) p[k] = head * unit(rng);
  return pred;
}

PredictorOutput Forward(const Predictor& pred, const LayeredWorld& world) {
  return ToOutput(RunForward(pred, world), world, pred.arch().bins);
}

double EvaluateLoss(const Predictor& pred, const LayeredWorld& world,
                    const ObservationSet& obs, const DirField& w_target,
                    const LossWeights& weights) {
  const SampleLoss s = ComputeLoss(Forward(pred, world), obs, w_target, weights);
  return s.slp + weights.lambda * s.dp;
}

LossAndGradient Backward(const Predictor& pred, const LayeredWorld& world,
                         const ObservationSet& obs, const DirField& w_target,
                         const LossWeights& weights) {
  const ArchSpec& arch = pred.arch();
  const ParamLayout layout = LayoutOf(arch);
  const ForwardCache cache = RunForward(pred, world);
  const PredictorOutput out = ToOutput(cache, world, arch.bins);
  const SampleLoss s = ComputeLoss(out, obs, w_target, weights);

  LossAndGradient result;
  result.slp_loss = s.slp;
  result.dp_loss = s.dp;
  result.alpha_used = s.alpha;
  result.loss = s.slp + weights.lambda * s.dp;
  result.grad.assign(layout.total, 0.0);
  double* g = result.grad.data();
  const double* p = pred.params().data();

  const std::size_t n = cache.y_hat.size();
  const int m_bins = arch.bins;
  const int width = TrunkWidth(arch);
  const double* trunk = arch.layers.empty() ? cache.input.data()
                                            : cache.activations.back().data();

  // Head logits.
  std::vector<double> dz_slp(n, 0.0);
  std::vector<double> dz_dp(n * m_bins, 0.0);
  if (s.has_slp) {
    for (std::size_t q = 0; q < n; ++q) {
      const double y = cache.y_hat[q];
      dz_slp[q] = s.d_y[q] * y * (1.0 - y);
    }
  }
  if (s.has_dp) {
    for (std::size_t q = 0; q < n; ++q) {
      const double* w = cache.w_hat.data() + q * m_bins;
      const double* gw = s.d_w.data() + q * m_bins;
      double dot = 0.0;
      for (int m = 0; m < m_bins; ++m) dot += w[m] * gw[m];
      for (int m = 0; m < m_bins; ++m) {
        dz_dp[q * m_bins + m] = weights.lambda * w[m] * (gw[m] - dot);
      }
    }
  }

  std::vector<double> d_trunk(n * width, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    const double dzs = dz_slp[q];
    g[layout.slp_b] += dzs;
    for (int m = 0; m < m_bins; ++m) g[layout.dp_b + m] += dz_dp[q * m_bins + m];
    for (int h = 0; h < width; ++h) {
      const double a = trunk[h * n + q];
      double acc = p[layout.slp_w + h] * dzs;
      g[layout.slp_w + h] += dzs * a;
      for (int m = 0; m < m_bins; ++m) {
        const double dz = dz_dp[q * m_bins + m];
        g[layout.dp_w + static_cast<std::size_t>(m) * width + h] += dz * a;
        acc += p[layout.dp_w + static_cast<std::size_t>(m) * width + h] * dz;
      }
      d_trunk[h * n + q] = acc;
    }
  }

  // Back through the conv trunk.
  std::vector<double> d_act = std::move(d_trunk);
  for (int l = static_cast<int>(arch.layers.size()) - 1; l >= 0; --l) {
    const auto& spec = arch.layers[l];
    const std::vector<double>& act = cache.activations[l];
    for (std::size_t k = 0; k < d_act.size(); ++k) d_act[k] *= 1.0 - act[k] * act[k];
    const double* in = l == 0 ? cache.input.data() : cache.activations[l - 1].data();
    const int c_in = l == 0 ? arch.in_channels : arch.layers[l - 1].hidden;
    std::vector<double> d_in;
    if (l > 0) d_in.assign(n * c_in, 0.0);
    ConvBackward(in, c_in, p + layout.weight[l], d_act.data(), spec.hidden,
                 spec.kernel, cache.width, cache.height, g + layout.weight[l],
                 g + layout.bias[l], l > 0 ? d_in.data() : nullptr);
    d_act = std::move(d_in);
  }
  return result;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (steps < 0 || batch_size < 1) throw std::invalid_argument("bad step or batch count");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (alpha_strategy == AlphaStrategy::kConstant &&
      !(alpha_constant >= 0.0 && alpha_constant <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
}

void ParseAlpha(const std::string& text, TrainConfig& config) {
  if (text == "auto") {
    config.alpha_strategy = AlphaStrategy::kAuto;
  } else if (text == "mean") {
    config.alpha_strategy = AlphaStrategy::kDatasetMean;
  } else {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || !(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("alpha must be 'auto', 'mean' or a number in [0, 1]");
    }
    config.alpha_strategy = AlphaStrategy::kConstant;
    config.alpha_constant = v;
  }
}

std::string AlphaLabel(const TrainConfig& config) {
  switch (config.alpha_strategy) {
    case AlphaStrategy::kAuto: return "auto";
    case AlphaStrategy::kDatasetMean: return "mean";
    case AlphaStrategy::kConstant: {
      std::ostringstream os;
      os << config.alpha_constant;
      return os.str();
    }
  }
  return "auto";
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"learning_rate", learning_rate}, {"steps", steps},
          {"batch_size", batch_size},       {"lambda", lambda},
          {"momentum", momentum},           {"alpha", AlphaLabel(*this)},
          {"seed", seed},                   {"eval_every", eval_every},
          {"cosine_decay", cosine_decay}};
}

nlohmann::json TracePoint::ToJson() const {
  return {{"step", step},
          {"train_loss", train_loss},
          {"heldout_nll_slp", heldout_nll_slp},
          {"heldout_nll_dp", heldout_nll_dp}};
}

std::pair<double, double> HeldoutNll(const Predictor& pred,
                                     const std::vector<EvalSample>& heldout) {
  if (heldout.empty()) return {0.0, 0.0};
  double slp = 0.0, dp = 0.0;
  for (const EvalSample& e : heldout) {
    const PredictorOutput out = Forward(pred, e.input);
    slp += NllSlp(e.lane_raster, out.y_hat, e.road_region);
    dp += NllDp(e.dir_true, out.w_hat, e.lane_raster);
  }
  const double count = static_cast<double>(heldout.size());
  return {slp / count, dp / count};
}

TrainResult Train(const std::vector<TrainingSample>& dataset,
                  const std::vector<EvalSample>& heldout, const ArchSpec& arch,
                  const TrainConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("empty training dataset");
  config.Validate();
  TrainResult result;
  result.predictor = Predictor::Random(arch, config.seed);

  double alpha_sum = 0.0;
  int alpha_n = 0;
  for (const auto& s : dataset) {
    if (s.obs.pos_count() + s.obs.neg_count() == 0) continue;
    alpha_sum += AlphaIB(s.obs);
    ++alpha_n;
  }
  result.alpha_dataset_mean = alpha_n > 0 ? alpha_sum / alpha_n : 0.0;

  LossWeights weights;
  weights.lambda = config.lambda;
  switch (config.alpha_strategy) {
    case AlphaStrategy::kAuto: weights.alpha = AlphaMode::Auto(); break;
    case AlphaStrategy::kConstant: weights.alpha = AlphaMode::Constant(config.alpha_constant); break;
    case AlphaStrategy::kDatasetMean:
      weights.alpha = AlphaMode::Constant(result.alpha_dataset_mean);
      break;
  }

  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::size_t cursor = order.size();

  auto& params = result.predictor.mutable_params();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<LossAndGradient> per_sample(config.batch_size);
  std::vector<std::size_t> batch(config.batch_size);

  for (int step = 1; step <= config.steps; ++step) {
    for (auto& b : batch) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      b = order[cursor++];
    }
    ParallelFor(batch.size(), config.jobs, [&](std::size_t k) {
      const TrainingSample& s = dataset[batch[k]];
      per_sample[k] = Backward(result.predictor, s.input, s.obs, s.dir_target, weights);
    });
    double loss = 0.0;
    std::vector<double> grad(params.size(), 0.0);
    for (const auto& r : per_sample) {
      loss += r.loss;
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += r.grad[k];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    if (!std::isfinite(loss)) {
      std::ostringstream os;
      os << "training diverged at step " << step << " (loss " << loss
         << ", learning rate " << config.learning_rate << ")";
      throw std::runtime_error(os.str());
    }
    double lr = config.learning_rate;
    if (config.cosine_decay) {
      lr *= 0.5 * (1.0 + std::cos(std::numbers::pi * (step - 1) / config.steps));
    }
    bool finite = true;
    for (std::size_t k = 0; k < params.size(); ++k) {
      velocity[k] = config.momentum * velocity[k] - lr * grad[k] * inv;
      params[k] += velocity[k];
      finite = finite && std::isfinite(params[k]);
    }
    if (!finite) {
      std::ostringstream os;
      os << "training diverged at step " << step << " (non-finite parameters, learning rate "
         << config.learning_rate << ")";
      throw std::runtime_error(os.str());
    }
    const bool last = step == config.steps;
    if (last || (config.eval_every > 0 && step % config.eval_every == 0)) {
      TracePoint tp;
      tp.step = step;
      tp.train_loss = loss;
      std::tie(tp.heldout_nll_slp, tp.heldout_nll_dp) = HeldoutNll(result.predictor, heldout);
      result.trace.push_back(tp);
    }
  }
  return result;
}

namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint32_t GetU32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw std::runtime_error("model file truncated");
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[pos + b]) << (8 * b);
  pos += 4;
  return v;
}

}  // namespace

std::vector<std::uint8_t> EncodeModel(const Predictor& pred) {
  std::vector<std::uint8_t> out = {'D', 'S', 'L', 'P'};
  const ArchSpec& a = pred.arch();
  PutU32(out, static_cast<std::uint32_t>(a.in_channels));
  PutU32(out, static_cast<std::uint32_t>(a.bins));
  PutU32(out, static_cast<std::uint32_t>(a.layers.size()));
  for (const auto& l : a.layers) {
    PutU32(out, static_cast<std::uint32_t>(l.kernel));
    PutU32(out, static_cast<std::uint32_t>(l.hidden));
  }
  PutU32(out, static_cast<std::uint32_t>(pred.params().size()));
  for (double v : pred.params()) PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Predictor DecodeModel(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || bytes[0] != 'D' || bytes[1] != 'S' || bytes[2] != 'L' ||
      bytes[3] != 'P') {
    throw std::runtime_error("not a DSLP model file");
  }
  std::size_t pos = 4;
  ArchSpec a;
  a.in_channels = static_cast<int>(GetU32(bytes, pos));
  a.bins = static_cast<int>(GetU32(bytes, pos));
  const std::uint32_t layers = GetU32(bytes, pos);
  if (layers > 64) throw std::runtime_error("model file: implausible layer count");
  a.layers.clear();
  for (std::uint32_t l = 0; l < layers; ++l) {
    ConvLayerSpec s;
    s.kernel = static_cast<int>(GetU32(bytes, pos));
    s.hidden = static_cast<int>(GetU32(bytes, pos));
    a.layers.push_back(s);
  }
  const std::uint32_t count = GetU32(bytes, pos);
  std::vector<double> params(count);
  for (auto& v : params) v = std::bit_cast<float>(GetU32(bytes, pos));
  if (pos != bytes.size()) throw std::runtime_error("model file: trailing bytes");
  return Predictor(a, std::move(params));
}

}  // namespace dslp
