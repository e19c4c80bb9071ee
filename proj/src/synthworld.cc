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

#include "dslp/synthworld.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dslp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPeakProbability = 0.95;
constexpr double kDirDefinedThreshold = 0.05;
constexpr double kRouteStep = 0.25;

Point Add(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point Scale(Point a, double s) { return {a.x * s, a.y * s}; }
Point Unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
// Right-hand normal of a travel direction.
Point RightOf(Point d) { return {d.y, -d.x}; }
double Cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

void AppendLine(Polyline& out, Point a, Point b) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const int n = std::max(1, static_cast<int>(std::ceil(len / kRouteStep)));
  for (int s = out.empty() ? 0 : 1; s <= n; ++s) {
    const double t = static_cast<double>(s) / n;
    out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
  }
}

void AppendQuadratic(Polyline& out, Point a, Point k, Point b) {
  const double approx = std::hypot(k.x - a.x, k.y - a.y) + std::hypot(b.x - k.x, b.y - k.y);
  const int n = std::max(2, static_cast<int>(std::ceil(approx / kRouteStep)));
  for (int s = 1; s <= n; ++s) {
    const double t = static_cast<double>(s) / n;
    const double u = 1.0 - t;
    out.push_back({u * u * a.x + 2 * u * t * k.x + t * t * b.x,
                   u * u * a.y + 2 * u * t * k.y + t * t * b.y});
  }
}

struct Layout {
  Point center;
  double rotation = 0.0;
  std::vector<double> arm_angles;
  std::vector<std::pair<int, int>> routes;  // (incoming arm, outgoing arm)
  double junction_radius = 0.0;
};

Layout MakeLayout(const WorldTemplate& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Layout l;
  const double lw = t.lane_width;
  const double half_road = t.lane_count * lw / 2.0 + t.margin;
  l.junction_radius = half_road + lw / 2.0;
  const double fork_angle = 0.61;
  switch (t.kind) {
    case TemplateKind::kStraight:
      l.arm_angles = {kPi, 0.0};
      l.routes = {{0, 1}, {1, 0}};
      break;
    case TemplateKind::kCurve:
      l.arm_angles = {kPi, kPi / 2};
      l.routes = {{0, 1}, {1, 0}};
      break;
    case TemplateKind::kTIntersection:
      l.arm_angles = {kPi, 0.0, 1.5 * kPi};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (a != b) l.routes.push_back({a, b});
      break;
    case TemplateKind::kFourWay:
      l.arm_angles = {0.0, kPi / 2, kPi, 1.5 * kPi};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          if (a != b) l.routes.push_back({a, b});
      break;
    case TemplateKind::kFork:
      l.arm_angles = {kPi, fork_angle, -fork_angle};
      l.routes = {{0, 1}, {0, 2}};
      l.junction_radius = 1.5 * lw;
      break;
    case TemplateKind::kMerge:
      l.arm_angles = {kPi - fork_angle, kPi + fork_angle, 0.0};
      l.routes = {{0, 2}, {1, 2}};
      l.junction_radius = 1.5 * lw;
      break;
  }
  if (t.kind != TemplateKind::kStraight) {
    l.junction_radius = std::max(l.junction_radius, t.turn_radius_fraction * t.grid_size);
  }
  if (t.lane_count == 1 && t.kind == TemplateKind::kStraight) l.routes = {{0, 1}};
  if (t.lane_count == 1 && t.kind == TemplateKind::kCurve) l.routes = {{0, 1}};
  const double base = std::floor((t.grid_size - 1) / 2.0);
  const double offset = t.max_center_offset * t.grid_size;
  l.center = {base + std::round(offset * (2 * unit(rng) - 1)),
              base + std::round(offset * (2 * unit(rng) - 1))};
  const int quarter = t.random_quarter_turns ? static_cast<int>(unit(rng) * 4) % 4 : 0;
  l.rotation = quarter * kPi / 2 + t.max_rotation_jitter * (2 * unit(rng) - 1);
  if (t.kind == TemplateKind::kStraight && t.max_rotation_jitter == 0.0 &&
      quarter == 0) {
    l.rotation = 0.0;
  }
  return l;
}

Polyline BuildRoute(const WorldTemplate& t, const Layout& l, int in_arm,
                    int out_arm) {
  const double reach = 1.3 * t.grid_size;
  const double h = t.lane_count == 2 ? t.lane_width / 2.0 : 0.0;
  const Point ua = Unit(l.arm_angles[in_arm] + l.rotation);
  const Point ub = Unit(l.arm_angles[out_arm] + l.rotation);
  const Point oa = Scale(RightOf(Scale(ua, -1.0)), h);
  const Point ob = Scale(RightOf(ub), h);
  const Point far_in = Add(Add(l.center, Scale(ua, reach)), oa);
  const Point stop = Add(Add(l.center, Scale(ua, l.junction_radius)), oa);
  const Point start = Add(Add(l.center, Scale(ub, l.junction_radius)), ob);
  const Point far_out = Add(Add(l.center, Scale(ub, reach)), ob);
  // Control point: intersection of the incoming and outgoing lane lines.
  Point control{(stop.x + start.x) / 2, (stop.y + start.y) / 2};
  const Point din = Scale(ua, -1.0);
  const double denom = Cross(din, Scale(ub, -1.0));
  if (std::fabs(denom) > 1e-6) {
    const Point diff{start.x - stop.x, start.y - stop.y};
    const double s = Cross(diff, Scale(ub, -1.0)) / denom;
    if (s > 0.0) control = Add(stop, Scale(din, s));
  }
  Polyline route;
  AppendLine(route, far_in, stop);
  AppendQuadratic(route, stop, control, start);
  AppendLine(route, start, far_out);
  return route;
}

bool InsideBox(Point p, double lo, double hi) {
  return p.x >= lo && p.y >= lo && p.x <= hi && p.y <= hi;
}

Point BoundaryCrossing(Point outside, Point inside, double lo, double hi) {
  for (int it = 0; it < 50; ++it) {
    const Point mid{(outside.x + inside.x) / 2, (outside.y + inside.y) / 2};
    if (InsideBox(mid, lo, hi)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

// Longest contiguous run inside [lo, hi]^2, with interpolated boundary ends.
Polyline ClipToBox(const Polyline& line, double lo, double hi) {
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t k = 0; k < line.size();) {
    if (!InsideBox(line[k], lo, hi)) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e < line.size() && InsideBox(line[e], lo, hi)) ++e;
    if (e - k > best_len) {
      best_len = e - k;
      best_start = k;
    }
    k = e;
  }
  Polyline out;
  if (best_len == 0) return out;
  if (best_start > 0) {
    out.push_back(BoundaryCrossing(line[best_start - 1], line[best_start], lo, hi));
  }
  out.insert(out.end(), line.begin() + best_start, line.begin() + best_start + best_len);
  const std::size_t end = best_start + best_len;
  if (end < line.size()) out.push_back(BoundaryCrossing(line[end], line[end - 1], lo, hi));
  return out;
}

// Per-cell nearest distance and segment heading to one polyline, limited to
// `cutoff`. Cells farther away keep +inf.
void DistanceField(const Polyline& line, GridDims dims, double cutoff,
                   std::vector<double>& dist, std::vector<double>& heading) {
  dist.assign(dims.size(), std::numeric_limits<double>::infinity());
  heading.assign(dims.size(), 0.0);
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    const Point a = line[k];
    const Point b = line[k + 1];
    if (std::max(a.x, b.x) < -cutoff || std::min(a.x, b.x) > dims.width - 1 + cutoff ||
        std::max(a.y, b.y) < -cutoff || std::min(a.y, b.y) > dims.height - 1 + cutoff) {
      continue;
    }
    const double angle = std::atan2(b.y - a.y, b.x - a.x);
    const int i0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - cutoff)));
    const int i1 = std::min(dims.width - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + cutoff)));
    const int j0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - cutoff)));
    const int j1 = std::min(dims.height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + cutoff)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double d = PointSegmentDistance({double(i), double(j)}, a, b);
        const std::size_t c = static_cast<std::size_t>(j) * dims.width + i;
        if (d <= cutoff && d < dist[c]) {
          dist[c] = d;
          heading[c] = angle;
        }
      }
    }
  }
}

GridField OcclusionMask(const WorldTemplate& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = t.grid_size;
  GridField mask(n, n, t.cell_size, 1.0);
  const double target = t.min_occlusion + (t.max_occlusion - t.min_occlusion) * unit(rng);
  std::size_t hidden = 0;
  const std::size_t goal = static_cast<std::size_t>(target * n * n);
  for (int attempt = 0; attempt < 64 && hidden < goal; ++attempt) {
    const int w = std::max(2, static_cast<int>(n * (0.15 + 0.25 * unit(rng))));
    const int h = std::max(2, static_cast<int>(n * (0.15 + 0.25 * unit(rng))));
    const int x0 = static_cast<int>(unit(rng) * (n - w));
    const int y0 = static_cast<int>(unit(rng) * (n - h));
    for (int j = y0; j < y0 + h; ++j) {
      for (int i = x0; i < x0 + w; ++i) {
        if (hidden >= goal) break;
        if (mask.at(i, j) == 1.0) {
          mask.at(i, j) = 0.0;
          ++hidden;
        }
      }
    }
  }
  return mask;
}

}  // namespace

const char* TemplateName(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kStraight: return "straight";
    case TemplateKind::kCurve: return "curve";
    case TemplateKind::kTIntersection: return "tjunction";
    case TemplateKind::kFourWay: return "fourway";
    case TemplateKind::kFork: return "fork";
    case TemplateKind::kMerge: return "merge";
  }
  return "straight";
}

TemplateKind ParseTemplate(const std::string& name) {
  if (name == "straight") return TemplateKind::kStraight;
  if (name == "curve") return TemplateKind::kCurve;
  if (name == "t" || name == "tjunction" || name == "t-intersection") {
    return TemplateKind::kTIntersection;
  }
  if (name == "fourway" || name == "4way" || name == "4-way") return TemplateKind::kFourWay;
  if (name == "fork") return TemplateKind::kFork;
  if (name == "merge") return TemplateKind::kMerge;
  throw std::invalid_argument("unknown template '" + name + "'");
}

const std::vector<TemplateKind>& AllTemplates() {
  static const std::vector<TemplateKind> all = {
      TemplateKind::kStraight, TemplateKind::kCurve, TemplateKind::kTIntersection,
      TemplateKind::kFourWay, TemplateKind::kFork, TemplateKind::kMerge};
  return all;
}

WorldTemplate WorldTemplate::For(TemplateKind kind, int grid_size) {
  WorldTemplate t;
  t.kind = kind;
  t.grid_size = grid_size;
  t.lane_width = std::max(4.0, std::round(grid_size * 6.0 / 128.0));
  t.cell_size = 51.2 / grid_size;
  t.lane_count = (kind == TemplateKind::kFork || kind == TemplateKind::kMerge) ? 1 : 2;
  return t;
}

void WorldTemplate::Validate() const {
  if (grid_size < kMinGridExtent) throw std::invalid_argument("grid too small");
  if (lane_count != 1 && lane_count != 2) {
    throw std::invalid_argument("lane_count must be 1 or 2");
  }
  if (!(lane_width > 0.0) || margin < 0.0) throw std::invalid_argument("bad lane geometry");
  const double road_width = lane_count * lane_width + 2 * margin;
  const double offset = max_center_offset * grid_size;
  if (2.0 * (road_width + offset) + 2.0 > grid_size) {
    throw std::invalid_argument("template lanes exceed the grid");
  }
  if (min_occlusion < 0.0 || max_occlusion > 1.0 || min_occlusion > max_occlusion) {
    throw std::invalid_argument("bad occlusion range");
  }
}

void GroundTruth::CheckInvariants() const {
  for (std::size_t c = 0; c < p_true.size(); ++c) {
    if ((p_true[c] > 0.5) != (lane_raster_true[c] >= 0.5)) {
      throw std::logic_error("lane raster disagrees with p_true > 0.5");
    }
    if (p_true[c] > kDirDefinedThreshold && !dir_true.defined(c)) {
      throw std::logic_error("dir_true undefined where p_true > 0.05");
    }
  }
  CheckProbabilityField(p_true, "p_true");
  lane_graph_true.Validate(p_true.dims());
}

GeneratedWorld GenerateWorld(const WorldTemplate& tmpl, std::uint64_t seed) {
  tmpl.Validate();
  std::mt19937_64 rng(seed);
  const Layout layout = MakeLayout(tmpl, rng);
  const int n = tmpl.grid_size;
  const GridDims dims{n, n};
  const double sigma = tmpl.lane_width / 3.0;
  const double lane_half = tmpl.lane_width / 2.0;
  const double half_road_lane = lane_half + tmpl.margin;
  const double cutoff = std::max(5.0 * sigma, half_road_lane + 2.0);

  GroundTruth gt;
  gt.lane_width = tmpl.lane_width;
  gt.sigma = sigma;
  gt.p_true = GridField(dims, tmpl.cell_size, 0.0);
  GridField road(dims, tmpl.cell_size, 0.0);

  const int bins = tmpl.direction_bins;
  std::vector<double> dir_accum(dims.size() * bins, 0.0);
  std::vector<int> dir_count(dims.size(), 0);
  std::vector<double> dist, heading;
  std::vector<std::vector<double>> route_dist, route_heading;
  for (const auto& [a, b] : layout.routes) {
    Route r;
    r.centerline = BuildRoute(tmpl, layout, a, b);
    r.clipped = ClipToBox(r.centerline, 0.0, n - 1.0);
    if (r.clipped.size() < 2) throw std::invalid_argument("template lanes exceed the grid");
    DistanceField(r.centerline, dims, cutoff, dist, heading);
    for (std::size_t c = 0; c < dims.size(); ++c) {
      if (std::isinf(dist[c])) continue;
      const double p = kPeakProbability * std::exp(-dist[c] * dist[c] / (2 * sigma * sigma));
      gt.p_true[c] = std::max(gt.p_true[c], p);
      road[c] = std::max(road[c], std::clamp(half_road_lane + 0.5 - dist[c], 0.0, 1.0));
      if (p > kDirDefinedThreshold) {
        const auto enc = EncodeVonMises(VonMisesSpec(heading[c], tmpl.kappa), bins);
        for (int m = 0; m < bins; ++m) dir_accum[c * bins + m] += enc[m];
        ++dir_count[c];
      }
    }
    gt.routes.push_back(std::move(r));
    route_dist.push_back(dist);
    route_heading.push_back(heading);
  }
  gt.dir_true = DirField(dims, bins, tmpl.cell_size);
  std::vector<double> d(bins);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    if (dir_count[c] == 0) continue;
    for (int m = 0; m < bins; ++m) d[m] = dir_accum[c * bins + m] / dir_count[c];
    gt.dir_true.Set(c, d);
  }
  gt.lane_raster_true = GridField(dims, tmpl.cell_size, 0.0);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    gt.lane_raster_true[c] = gt.p_true[c] > 0.5 ? 1.0 : 0.0;
  }
  gt.road_region = ThresholdMask(road, 0.5);

  // Lane markings from the lane geometry: road edges (0.5) half a road width
  // from the nearest lane center, dividers (1.0) midway between opposing lanes.
  GridField marking(dims, tmpl.cell_size, 0.0);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& rd : route_dist) nearest = std::min(nearest, rd[c]);
    if (std::fabs(nearest - half_road_lane) <= 0.5) marking[c] = 0.5;
    for (std::size_t a = 0; a < route_dist.size() && marking[c] < 1.0; ++a) {
      for (std::size_t b = a + 1; b < route_dist.size(); ++b) {
        const double da = route_dist[a][c], db = route_dist[b][c];
        if (da > lane_half + 0.5 || db > lane_half + 0.5 || std::fabs(da - db) > 1.0) continue;
        if (AngularDistance(route_heading[a][c], route_heading[b][c]) > 2.5) {
          marking[c] = 1.0;
          break;
        }
      }
    }
  }

  GridField appearance(dims, tmpl.cell_size, 0.0);
  std::normal_distribution<double> noise(0.0, tmpl.appearance_noise);
  for (std::size_t c = 0; c < dims.size(); ++c) {
    appearance[c] = std::clamp(0.2 + 0.4 * road[c] + noise(rng), 0.0, 1.0);
  }

  gt.complete_world.channels = {{"road", road}, {"marking", marking}, {"appearance", appearance}};
  gt.complete_world.observation_mask = GridField(dims, tmpl.cell_size, 1.0);

  // Lane graph: one node per distinct route end.
  auto node_for = [&](Point p, NodeKind kind) {
    for (std::size_t k = 0; k < gt.lane_graph_true.nodes.size(); ++k) {
      const auto& node = gt.lane_graph_true.nodes[k];
      if (node.kind == kind && std::hypot(node.position.x - p.x, node.position.y - p.y) < 0.5) {
        return static_cast<int>(k);
      }
    }
    gt.lane_graph_true.nodes.push_back({p, kind});
    return static_cast<int>(gt.lane_graph_true.nodes.size() - 1);
  };
  for (const Route& r : gt.routes) {
    LaneEdge e;
    e.from = node_for(r.clipped.front(), NodeKind::kEntry);
    e.to = node_for(r.clipped.back(), NodeKind::kExit);
    e.polyline = r.clipped;
    gt.lane_graph_true.edges.push_back(std::move(e));
  }
  gt.CheckInvariants();

  GeneratedWorld out;
  const GridField mask = OcclusionMask(tmpl, rng);
  out.partial.observation_mask = mask;
  for (const auto& ch : gt.complete_world.channels) {
    GridField f = ch.field;
    for (std::size_t c = 0; c < dims.size(); ++c) f[c] *= mask[c];
    out.partial.channels.push_back({ch.name, std::move(f)});
  }
  out.truth = std::move(gt);
  return out;
}

int ObservedRouteCount(double route_coverage, int route_count) {
  if (!(route_coverage > 0.0 && route_coverage <= 1.0)) {
    throw std::invalid_argument("route coverage must lie in (0, 1]");
  }
  const int k = static_cast<int>(std::ceil(route_coverage * route_count - 1e-9));
  return std::clamp(k, 1, route_count);
}

double TrajectoryOffsetSigma(double profile_sigma, double noise_sigma) {
  const double v = profile_sigma * profile_sigma - noise_sigma * noise_sigma - 1.0 / 12.0;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

Polyline SampleTrajectory(const Route& route, double lateral_offset,
                          double noise_sigma, std::mt19937_64& rng) {
  constexpr int kWaves = 4;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double freq[kWaves], phase[kWaves];
  for (int w = 0; w < kWaves; ++w) {
    freq[w] = 2 * kPi / (12.0 + 36.0 * unit(rng));
    phase[w] = 2 * kPi * unit(rng);
  }
  const double amp = noise_sigma * std::sqrt(2.0 / kWaves);
  const Polyline& c = route.centerline;
  Polyline out;
  out.reserve(c.size() / 2 + 2);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); k += 2) {
    if (k > 0) s += std::hypot(c[k].x - c[k - 2].x, c[k].y - c[k - 2].y);
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = std::min(c.size() - 1, k + 1);
    double tx = c[b].x - c[a].x, ty = c[b].y - c[a].y;
    const double len = std::hypot(tx, ty);
    tx /= len;
    ty /= len;
    double lateral = lateral_offset;
    for (int w = 0; w < kWaves; ++w) lateral += amp * std::cos(freq[w] * s + phase[w]);
    // Left normal (-ty, tx).
    out.push_back({c[k].x - ty * lateral, c[k].y + tx * lateral});
  }
  return out;
}

SampledObservations SampleObservations(const GroundTruth& truth,
                                       const ObservationConfig& config,
                                       std::uint64_t seed) {
  const int routes = static_cast<int>(truth.routes.size());
  if (routes == 0) throw std::invalid_argument("ground truth has no routes");
  std::mt19937_64 rng(seed);
  std::vector<int> order(routes);
  for (int r = 0; r < routes; ++r) order[r] = r;
  std::shuffle(order.begin(), order.end(), rng);
  const int k = ObservedRouteCount(config.route_coverage, routes);
  std::vector<int> chosen(order.begin(), order.begin() + k);
  std::sort(chosen.begin(), chosen.end());

  const double noise = config.lateral_noise < 0.0 ? truth.lane_width / 6.0 : config.lateral_noise;
  const double offset_sigma = TrajectoryOffsetSigma(truth.sigma, noise);
  std::normal_distribution<double> offset(0.0, 1.0);
  const double n = truth.p_true.width();
  std::vector<Polyline> trajectories;
  for (int r : chosen) {
    for (int t = 0; t < config.trajectories_per_route; ++t) {
      const double o = offset_sigma * offset(rng);
      Polyline traj = SampleTrajectory(truth.routes[r], o, noise, rng);
      Polyline clipped = ClipToBox(traj, -1.0, n);
      if (clipped.size() >= 2) trajectories.push_back(std::move(clipped));
    }
  }
  SampledObservations out;
  out.obs = BuildObservationSet(std::move(trajectories), truth.road_region);
  out.observed_routes = std::move(chosen);
  return out;
}

CompletionMode ParseCompletionMode(const std::string& name) {
  if (name == "oracle") return CompletionMode::kOracle;
  if (name == "noisy") return CompletionMode::kNoisy;
  if (name == "passthrough") return CompletionMode::kPassthrough;
  throw std::invalid_argument("unknown completion mode '" + name + "'");
}

const char* CompletionModeName(CompletionMode mode) {
  switch (mode) {
    case CompletionMode::kOracle: return "oracle";
    case CompletionMode::kNoisy: return "noisy";
    case CompletionMode::kPassthrough: return "passthrough";
  }
  return "passthrough";
}

LayeredWorld CompleteWorld(const LayeredWorld& partial, const GroundTruth& truth,
                           CompletionMode mode, double noise_sigma,
                           std::uint64_t seed) {
  if (mode == CompletionMode::kPassthrough) return partial;
  LayeredWorld out = partial;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const bool noisy = mode == CompletionMode::kNoisy && noise_sigma > 0.0;
  for (auto& ch : out.channels) {
    const GridField& full = truth.complete_world.channel(ch.name);
    for (std::size_t c = 0; c < ch.field.size(); ++c) {
      if (partial.observation_mask[c] >= 0.5) continue;
      double v = full[c];
      if (noisy) v = std::clamp(v + noise_sigma * noise(rng), 0.0, 1.0);
      ch.field[c] = v;
    }
  }
  for (std::size_t c = 0; c < out.observation_mask.size(); ++c) out.observation_mask[c] = 1.0;
  return out;
}

std::vector<std::pair<Point, Point>> RouteEndpoints(const GroundTruth& truth) {
  std::vector<std::pair<Point, Point>> out;
  for (const Route& r : truth.routes) out.push_back({r.clipped.front(), r.clipped.back()});
  return out;
}

}  // namespace dslp
