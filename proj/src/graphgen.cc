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

#include "dslp/graphgen.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "dslp/objective.h"
#include "dslp/parallel.h"

namespace dslp {
namespace {

constexpr int kDenseSamples = 256;

struct SideGeometry {
  int length = 0;
  Point inward;
};

SideGeometry GeometryOf(BoundarySide side, GridDims dims) {
  switch (side) {
    case BoundarySide::kWest: return {dims.height, {1.0, 0.0}};
    case BoundarySide::kEast: return {dims.height, {-1.0, 0.0}};
    case BoundarySide::kSouth: return {dims.width, {0.0, 1.0}};
    case BoundarySide::kNorth: return {dims.width, {0.0, -1.0}};
  }
  return {};
}

// Cell at position t along the side, `depth` cells inward.
Cell SideCell(BoundarySide side, GridDims dims, int t, int depth) {
  switch (side) {
    case BoundarySide::kWest: return {depth, t};
    case BoundarySide::kEast: return {dims.width - 1 - depth, t};
    case BoundarySide::kSouth: return {t, depth};
    case BoundarySide::kNorth: return {t, dims.height - 1 - depth};
  }
  return {};
}

// Boundary profile: max y_hat over the band, and the band-averaged direction
// distribution of defined cells.
struct Profile {
  std::vector<double> slp;
  std::vector<std::vector<double>> dist;  // empty when no cell is defined
};

Profile BuildProfile(BoundarySide side, const GridField& y_hat,
                     const DirField& w_hat, int band) {
  const GridDims dims = y_hat.dims();
  const int length = GeometryOf(side, dims).length;
  Profile p;
  p.slp.assign(length, 0.0);
  p.dist.assign(length, {});
  const int depth_limit = std::max(1, std::min(band, std::min(dims.width, dims.height)));
  for (int t = 0; t < length; ++t) {
    std::vector<double> acc(w_hat.bins(), 0.0);
    int defined = 0;
    for (int d = 0; d < depth_limit; ++d) {
      const Cell c = SideCell(side, dims, t, d);
      p.slp[t] = std::max(p.slp[t], y_hat.at(c.i, c.j));
      if (!w_hat.defined(c.i, c.j)) continue;
      const auto w = w_hat.dist(c.i, c.j);
      for (int m = 0; m < w_hat.bins(); ++m) acc[m] += w[m];
      ++defined;
    }
    if (defined == 0) continue;
    for (double& v : acc) v /= defined;
    p.dist[t] = std::move(acc);
  }
  return p;
}

// Adds `e` to the entry and/or exit list according to the inward component of
// its direction modes. A point is dropped when an endpoint of the same kind
// already lies within 1.5 cells on the same side, or within `corner_merge`
// cells on another side (one lane crossing near a grid corner).
void Classify(const std::vector<double>& dist, Endpoint e, Point inward,
              double corner_merge, EndpointSet& out) {
  std::vector<DirectionMode> modes = FindModes(dist);
  std::erase_if(modes, [](const DirectionMode& m) { return m.mass <= kModeMassThreshold; });
  if (modes.empty()) modes.push_back({ArgmaxBin(dist), 1.0});
  const int bins = static_cast<int>(dist.size());
  std::optional<double> in_dir, out_dir;
  for (const DirectionMode& m : modes) {
    const double a = BinCenter(m.bin, bins);
    const double dot = std::cos(a) * inward.x + std::sin(a) * inward.y;
    if (dot > 1e-9 && !in_dir) in_dir = a;
    if (dot < -1e-9 && !out_dir) out_dir = a;
  }
  auto add = [&](std::vector<Endpoint>& list, double dir) {
    for (const Endpoint& other : list) {
      const double d = std::hypot(other.position.x - e.position.x, other.position.y - e.position.y);
      if (d < (other.side == e.side ? 1.5 : corner_merge)) {
        return;
      }
    }
    Endpoint copy = e;
    copy.direction = dir;
    list.push_back(copy);
  };
  if (in_dir) add(out.entries, *in_dir);
  if (out_dir) add(out.exits, *out_dir);
}

Point Lerp(Point a, Point b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

Point Bezier(Point s, Point c, Point e, double t) {
  const double u = 1.0 - t;
  return {u * u * s.x + 2 * u * t * c.x + t * t * e.x,
          u * u * s.y + 2 * u * t * c.y + t * t * e.y};
}

Point BezierTangent(Point s, Point c, Point e, double t) {
  const double u = 1.0 - t;
  return {2 * u * (c.x - s.x) + 2 * t * (e.x - c.x),
          2 * u * (c.y - s.y) + 2 * t * (e.y - c.y)};
}

struct SampledCurve {
  Polyline points;
  std::vector<double> tangent;  // angle per point
};

SampledCurve SampleCurve(Point s, Point c, Point e, int count) {
  if (count < 2) throw std::invalid_argument("need at least two evaluation points");
  std::vector<double> arc(kDenseSamples + 1, 0.0);
  Point prev = s;
  for (int k = 1; k <= kDenseSamples; ++k) {
    const Point p = Bezier(s, c, e, static_cast<double>(k) / kDenseSamples);
    arc[k] = arc[k - 1] + std::hypot(p.x - prev.x, p.y - prev.y);
    prev = p;
  }
  const double total = arc.back();
  SampledCurve out;
  std::size_t seg = 0;
  for (int k = 0; k < count; ++k) {
    const double target = total * k / (count - 1);
    while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double frac = len > 0.0 ? std::clamp((target - arc[seg]) / len, 0.0, 1.0) : 0.0;
    const double t = k == count - 1 ? 1.0 : (seg + frac) / kDenseSamples;
    out.points.push_back(k == 0 ? s : (k == count - 1 ? e : Bezier(s, c, e, t)));
    Point d = BezierTangent(s, c, e, t);
    if (std::hypot(d.x, d.y) < 1e-12) d = {e.x - s.x, e.y - s.y};
    out.tangent.push_back(std::atan2(d.y, d.x));
  }
  return out;
}

// Bilinear sample at p with p clamped to the cell-center lattice. `value`
// receives cell indices and returns the cell's value.
template <typename Fn>
double Bilinear(Point p, GridDims dims, Fn&& value) {
  const double x = std::clamp(p.x, 0.0, dims.width - 1.0);
  const double y = std::clamp(p.y, 0.0, dims.height - 1.0);
  const int i0 = std::min(static_cast<int>(std::floor(x)), dims.width - 1);
  const int j0 = std::min(static_cast<int>(std::floor(y)), dims.height - 1);
  const int i1 = std::min(i0 + 1, dims.width - 1);
  const int j1 = std::min(j0 + 1, dims.height - 1);
  const double fx = x - i0, fy = y - j0;
  return (1 - fx) * (1 - fy) * value(i0, j0) + fx * (1 - fy) * value(i1, j0) +
         (1 - fx) * fy * value(i0, j1) + fx * fy * value(i1, j1);
}

bool InBounds(Point p, GridDims dims) {
  return p.x >= -0.5 && p.y >= -0.5 && p.x < dims.width - 0.5 && p.y < dims.height - 0.5;
}

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

const char* BoundarySideName(BoundarySide side) {
  switch (side) {
    case BoundarySide::kWest: return "west";
    case BoundarySide::kEast: return "east";
    case BoundarySide::kSouth: return "south";
    case BoundarySide::kNorth: return "north";
  }
  return "west";
}

nlohmann::json GraphConfig::ToJson() const {
  return {{"nms_window", nms_window},
          {"slp_threshold", slp_threshold},
          {"boundary_band", boundary_band},
          {"coherence_variance", coherence_variance},
          {"n_samples", n_samples},
          {"eval_points", eval_points},
          {"min_slp", min_slp},
          {"nll_accept_threshold", nll_accept_threshold},
          {"uturn_distance", uturn_distance},
          {"seed", seed}};
}

EndpointSet FindEndpoints(const GridField& y_hat, const DirField& w_hat,
                          const GraphConfig& config) {
  if (y_hat.dims() != w_hat.dims()) throw std::invalid_argument("field dims differ");
  const GridDims dims = y_hat.dims();
  const int half = std::max(0, config.nms_window / 2);
  const double corner_merge = 2.0 * std::max(1, config.nms_window);
  EndpointSet out;
  for (BoundarySide side : {BoundarySide::kWest, BoundarySide::kEast,
                            BoundarySide::kSouth, BoundarySide::kNorth}) {
    const SideGeometry geo = GeometryOf(side, dims);
    const Profile prof = BuildProfile(side, y_hat, w_hat, config.boundary_band);
    auto endpoint_at = [&](int t) {
      const Cell c = SideCell(side, dims, t, 0);
      return Endpoint{{static_cast<double>(c.i), static_cast<double>(c.j)}, side, 0.0};
    };
    std::vector<bool> kept(geo.length, false);
    for (int t = 0; t < geo.length; ++t) {
      const double v = prof.slp[t];
      if (!(v > config.slp_threshold) || prof.dist[t].empty()) continue;
      bool peak = true;
      for (int u = std::max(0, t - half); u <= std::min(geo.length - 1, t + half) && peak; ++u) {
        if (u == t) continue;
        // Plateaus keep their first cell.
        if (prof.slp[u] > v || (u < t && prof.slp[u] == v)) peak = false;
      }
      if (!peak) continue;
      kept[t] = true;
      Classify(prof.dist[t], endpoint_at(t), geo.inward, corner_merge, out);
    }
    // Coherent direction runs without an NMS point.
    for (int t = 0; t < geo.length;) {
      auto coherent = [&](int u) {
        return !prof.dist[u].empty() && prof.slp[u] >= config.min_slp &&
               CircularVariance(prof.dist[u]) < config.coherence_variance;
      };
      if (!coherent(t)) {
        ++t;
        continue;
      }
      int end = t;
      double sum = 0.0;
      bool has_peak = false;
      int best = t;
      while (end < geo.length && coherent(end)) {
        sum += prof.slp[end];
        has_peak = has_peak || kept[end];
        if (prof.slp[end] > prof.slp[best]) best = end;
        ++end;
      }
      const int len = end - t;
      if (len >= config.nms_window && !has_peak && sum / len > config.slp_threshold / 2) {
        Classify(prof.dist[best], endpoint_at(best), geo.inward, corner_merge, out);
      }
      t = end;
    }
  }
  return out;
}

Polyline SampleQuadratic(Point start, Point control, Point end, int count) {
  return SampleCurve(start, control, end, count).points;
}

double ScorePath(Point start, Point control, Point end, const GridField& y_hat,
                 const DirField& w_hat, int eval_points) {
  const SampledCurve curve = SampleCurve(start, control, end, eval_points);
  const GridDims dims = y_hat.dims();
  const int bins = w_hat.bins();
  double total = 0.0;
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const Point p = curve.points[k];
    const double y = Bilinear(p, dims, [&](int i, int j) { return y_hat.at(i, j); });
    const int bin = BinOf(curve.tangent[k], bins);
    const double w = Bilinear(p, dims, [&](int i, int j) {
      return w_hat.defined(i, j) ? w_hat.dist(i, j)[bin] : 0.0;
    });
    total -= std::log(std::max(y, kSlpClamp));
    total -= std::log(std::max(w, kDirClamp));
  }
  return total;
}

bool IsValidControl(Point start, Point control, Point end,
                    const GridField& y_hat, double min_slp) {
  const GridDims dims = y_hat.dims();
  if (!InBounds(control, dims)) return false;
  const double length = std::hypot(control.x - start.x, control.y - start.y) +
                        std::hypot(end.x - control.x, end.y - control.y);
  const int steps = std::max(16, static_cast<int>(std::ceil(length * 4)));
  for (int k = 0; k <= steps; ++k) {
    const Point p = Bezier(start, control, end, static_cast<double>(k) / steps);
    if (!InBounds(p, dims)) return false;
    const int i = static_cast<int>(std::floor(p.x + 0.5));
    const int j = static_cast<int>(std::floor(p.y + 0.5));
    if (y_hat.at(i, j) < min_slp) return false;
  }
  return true;
}

PathResult SamplePath(Point entry, Point exit, const GridField& y_hat,
                      const DirField& w_hat, const GraphConfig& config,
                      std::uint64_t seed) {
  const double dist = std::hypot(exit.x - entry.x, exit.y - entry.y);
  if (dist < 1e-9) throw std::invalid_argument("entry and exit coincide");
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  const Point mid = Lerp(entry, exit, 0.5);

  std::vector<Point> candidates;
  candidates.push_back(mid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.25 * dist);
  const int wanted = config.n_samples - 1;
  int valid = 0;
  for (int attempt = 0; attempt < 8 * config.n_samples && valid < wanted; ++attempt) {
    const Point c{mid.x + normal(rng), mid.y + normal(rng)};
    if (!IsValidControl(entry, c, exit, y_hat, config.min_slp)) continue;
    candidates.push_back(c);
    ++valid;
  }

  PathResult best;
  bool found = false;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (k == 0 && !IsValidControl(entry, mid, exit, y_hat, config.min_slp)) continue;
    const double nll = ScorePath(entry, candidates[k], exit, y_hat, w_hat, config.eval_points);
    if (!found || nll < best.nll) {
      best.nll = nll;
      best.control = candidates[k];
      best.candidate = static_cast<int>(k);
      found = true;
    }
  }
  if (!found) throw std::runtime_error("no valid path");
  best.polyline = SampleQuadratic(entry, best.control, exit, config.eval_points);
  return best;
}

LaneGraph BuildGraph(const EndpointSet& endpoints, const GridField& y_hat,
                     const DirField& w_hat, const GraphConfig& config) {
  LaneGraph graph;
  for (const Endpoint& e : endpoints.entries) graph.nodes.push_back({e.position, NodeKind::kEntry});
  for (const Endpoint& e : endpoints.exits) graph.nodes.push_back({e.position, NodeKind::kExit});
  const std::size_t n_in = endpoints.entries.size();
  const std::size_t n_out = endpoints.exits.size();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n_in; ++a) {
    for (std::size_t b = 0; b < n_out; ++b) {
      const Endpoint& in = endpoints.entries[a];
      const Endpoint& out = endpoints.exits[b];
      const double d = std::hypot(in.position.x - out.position.x, in.position.y - out.position.y);
      if (d < 1e-9) continue;
      if (in.side == out.side && d <= config.uturn_distance) continue;  // u-turn
      pairs.push_back({a, b});
    }
  }
  std::vector<std::optional<PathResult>> results(pairs.size());
  ParallelFor(pairs.size(), config.jobs, [&](std::size_t k) {
    const auto [a, b] = pairs[k];
    const std::uint64_t seed = Mix(config.seed ^ Mix(a * 0x10001ULL + b));
    try {
      results[k] = SamplePath(endpoints.entries[a].position, endpoints.exits[b].position,
                              y_hat, w_hat, config, seed);
    } catch (const std::runtime_error&) {
      results[k].reset();
    }
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!results[k]) continue;
    if (!(results[k]->nll / config.eval_points < config.nll_accept_threshold)) continue;
    LaneEdge edge;
    edge.from = static_cast<int>(pairs[k].first);
    edge.to = static_cast<int>(n_in + pairs[k].second);
    edge.polyline = std::move(results[k]->polyline);
    edge.nll = results[k]->nll;
    graph.edges.push_back(std::move(edge));
  }
  return graph;
}

LaneGraph FitLaneGraph(const GridField& y_hat, const DirField& w_hat,
                       const GraphConfig& config) {
  return BuildGraph(FindEndpoints(y_hat, w_hat, config), y_hat, w_hat, config);
}

}  // namespace dslp
