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

#ifndef DSLP_LANE_GRAPH_H_
#define DSLP_LANE_GRAPH_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "dslp/field.h"

namespace dslp {

enum class NodeKind { kEntry, kExit, kWaypoint };

const char* NodeKindName(NodeKind kind);
NodeKind ParseNodeKind(const std::string& name);

struct LaneNode {
  Point position;
  NodeKind kind = NodeKind::kWaypoint;
};

struct LaneEdge {
  int from = 0;  // index of an entry node
  int to = 0;    // index of an exit node
  Polyline polyline;
  double nll = 0.0;
};

struct LaneGraph {
  std::vector<LaneNode> nodes;
  std::vector<LaneEdge> edges;

  // {nodes:[{x,y,kind}], edges:[{from,to,polyline:[[x,y]...],nll}]}
  nlohmann::json ToJson() const;
  static LaneGraph FromJson(const nlohmann::json& j);
  // Throws std::invalid_argument unless every edge runs entry -> exit and all
  // polyline points lie inside `dims`.
  void Validate(GridDims dims) const;
};

}  // namespace dslp

#endif  // DSLP_LANE_GRAPH_H_
