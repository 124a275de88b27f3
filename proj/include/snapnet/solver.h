// Copyright 2026 The snapnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Built-in placement and routing search.
//
// Placements are enumerated by branch and bound over groups of tied
// variables. Each complete placement is routed flow by flow on a layered
// graph whose layers count the flow's state groups already visited, so
// every path meets the owners in the global state order. The bound is the
// contention-free cost of the partial placement.

#ifndef SNAPNET_SOLVER_H_
#define SNAPNET_SOLVER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "snapnet/deps.h"
#include "snapnet/milp.h"
#include "snapnet/psm.h"
#include "snapnet/topology.h"

namespace snapnet {

struct SolveOptions {
  // Upper bound on search nodes; negative means unlimited. When the limit
  // or the time limit is hit the best placement so far is returned.
  int64_t node_limit = -1;
  double time_limit_seconds = 0;  // 0: none
  // Weight of the load term in the routing link cost.
  double alpha = 1.0;
  // Route-only mode: keep this placement.
  const Placement* fixed = nullptr;
};

// Path of one port pair and the hops where it visits its state groups.
struct FlowRoute {
  std::vector<int> nodes;  // switch indices
  // (group index, hop index into `nodes`), in group order.
  std::vector<std::pair<int, int>> stops;
};

struct Solution {
  Placement placement;
  // Every ordered port pair, including pairs without demand.
  std::map<std::pair<int, int>, FlowRoute> routes;
  double objective = 0;
  // The search covered every placement and no flow was pushed off its
  // cheapest path by load.
  bool exact = false;
  int64_t nodes_explored = 0;
  int64_t placements_routed = 0;

  Routing ToRouting() const;
};

// Precomputed instance data shared by the search variants.
class PlacementProblem {
 public:
  PlacementProblem(const Topology& topo, const StateDemand& demand,
                   const OrderSpec& ord);

  const Topology& topo() const { return topo_; }
  const OrderSpec& order() const { return ord_; }
  int num_groups() const { return static_cast<int>(ord_.groups.size()); }
  // Groups in branching order: descending demand, then group index.
  const std::vector<int>& branch_order() const { return branch_order_; }

  // Contention-free cost with only the groups in `owner` that are >= 0.
  double LowerBound(const std::vector<int>& owner) const;

  // Routes every port pair for a complete placement (switch per group).
  // nullopt when some pair has no order-respecting path, a demanded flow
  // has no path without repeated switches, or a link is overloaded.
  std::optional<Solution> Route(const std::vector<int>& owner, double alpha) const;

  Placement ToPlacement(const std::vector<int>& owner) const;

 private:
  struct FlowInfo {
    int u, v;
    int src, dst;  // switches
    double demand;
    bool counted;  // part of the objective
    std::vector<int> groups;
  };

  // Fallback for demanded flows whose cheapest path repeats a switch:
  // joins waypoint-to-waypoint paths that avoid every switch already used.
  std::optional<FlowRoute> SegmentRoute(const FlowInfo& f, const std::vector<int>& owner,
                                        const std::vector<double>& load,
                                        double alpha) const;

  const Topology& topo_;
  const OrderSpec& ord_;
  std::vector<FlowInfo> flows_;
  std::vector<int> branch_order_;
  std::vector<std::vector<double>> dist_;  // contention-free link costs
};

// Reference search: plain depth-first branch and bound.
absl::StatusOr<Solution> SolveSerial(const PlacementProblem& p,
                                     const SolveOptions& opts);
// The same search with the first branching level spread over OpenMP
// threads. Without limits its result equals SolveSerial's.
absl::StatusOr<Solution> SolveParallel(const PlacementProblem& p,
                                       const SolveOptions& opts);

absl::StatusOr<Solution> Solve(const Topology& topo, const StateDemand& demand,
                               const OrderSpec& ord, const SolveOptions& opts,
                               bool parallel = false);

}  // namespace snapnet

#endif  // SNAPNET_SOLVER_H_
