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

#include "dslp/lane_graph.h"

#include <stdexcept>

namespace dslp {

const char* NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kEntry:
      return "entry";
    case NodeKind::kExit:
      return "exit";
    case NodeKind::kWaypoint:
      return "waypoint";
  }
  return "waypoint";
}

NodeKind ParseNodeKind(const std::string& name) {
  if (name == "entry") return NodeKind::kEntry;
  if (name == "exit") return NodeKind::kExit;
  if (name == "waypoint") return NodeKind::kWaypoint;
  throw std::invalid_argument("unknown node kind '" + name + "'");
}

nlohmann::json LaneGraph::ToJson() const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes) {
    j["nodes"].push_back(
        {{"x", n.position.x}, {"y", n.position.y}, {"kind", NodeKindName(n.kind)}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& p : e.polyline) poly.push_back({p.x, p.y});
    j["edges"].push_back(
        {{"from", e.from}, {"to", e.to}, {"polyline", poly}, {"nll", e.nll}});
  }
  return j;
}

LaneGraph LaneGraph::FromJson(const nlohmann::json& j) {
  LaneGraph g;
  for (const auto& n : j.at("nodes")) {
    g.nodes.push_back({{n.at("x").get<double>(), n.at("y").get<double>()},
                       ParseNodeKind(n.at("kind").get<std::string>())});
  }
  for (const auto& e : j.at("edges")) {
    LaneEdge edge;
    edge.from = e.at("from").get<int>();
    edge.to = e.at("to").get<int>();
    edge.nll = e.at("nll").get<double>();
    for (const auto& p : e.at("polyline")) {
      edge.polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    g.edges.push_back(std::move(edge));
  }
  return g;
}

void LaneGraph::Validate(GridDims dims) const {
  const int n = static_cast<int>(nodes.size());
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw std::invalid_argument("edge references a missing node");
    }
    if (nodes[e.from].kind != NodeKind::kEntry || nodes[e.to].kind != NodeKind::kExit) {
      throw std::invalid_argument("edge must run from an entry to an exit");
    }
    for (const auto& p : e.polyline) {
      if (p.x < -0.5 || p.y < -0.5 || p.x > dims.width - 0.5 ||
          p.y > dims.height - 0.5) {
        throw std::invalid_argument("edge polyline leaves the grid");
      }
    }
  }
}

}  // namespace dslp
