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


// The joint placement and routing program: a multicommodity flow model
// extended with state placement variables.
//
// Each external port is a virtual node attached to its switch by one arc in
// each direction. Flows start and end at virtual nodes; state can only be
// placed on switches. Virtual arcs carry no cost and no capacity row.

#ifndef SNAPNET_MILP_H_
#define SNAPNET_MILP_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/btree_map.h"
#include "snapnet/deps.h"
#include "snapnet/psm.h"
#include "snapnet/topology.h"

namespace snapnet {

// State variable to switch id.
using Placement = absl::btree_map<std::string, std::string>;

struct WeightedPath {
  std::vector<int> nodes;  // switch indices, ingress switch first
  double weight = 1.0;
};

// Paths per (ingress port, egress port).
using Routing = std::map<std::pair<int, int>, std::vector<WeightedPath>>;

class MilpModel {
 public:
  enum class Mode { kPlaceAndRoute, kRouteOnly };

  struct Arc {
    int from = 0;
    int to = 0;
    double capacity = 0;
    bool is_virtual = false;
  };
  struct Flow {
    int u = 0;
    int v = 0;
    double demand = 0;
    std::vector<int> vars;  // indices into vars(), in state order
  };
  // A variable reference: R(flow, arc), P(var, switch) or PS(var, flow, arc).
  struct Var {
    enum Kind : uint8_t { kR, kP, kPS } kind = kR;
    int a = 0, b = 0, c = 0;
  };
  struct Row {
    std::string name;
    std::vector<std::pair<Var, double>> terms;
    char sense = '=';  // '<', '>' or '='
    double rhs = 0;
  };

  // Values of all variables. Absent PS entries (variables the flow does
  // not need) must stay zero.
  struct Assignment {
    std::vector<double> r;   // flow * arcs + arc
    std::vector<double> p;   // var * switches + switch
    std::vector<double> ps;  // (var * flows + flow) * arcs + arc
  };

  struct Violation {
    std::string row;
    double lhs = 0;
    char sense = '=';
    double rhs = 0;
    std::string ToString() const;
  };

  // Flows are the port pairs with positive demand. Throws std::invalid_argument
  // for placements naming unknown switches or variables.
  static MilpModel Build(const Topology& topo, const StateDemand& demand,
                         const OrderSpec& ord, Mode mode = Mode::kPlaceAndRoute,
                         const Placement* fixed = nullptr);

  Mode mode() const { return mode_; }
  int num_switches() const { return num_switches_; }
  int num_nodes() const { return static_cast<int>(node_names_.size()); }
  const std::string& node_name(int n) const { return node_names_[n]; }
  int PortNode(int port) const;
  const std::vector<Arc>& arcs() const { return arcs_; }
  int ArcIndex(int from, int to) const;
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<std::string>& vars() const { return vars_; }
  int VarIndex(const std::string& var) const;
  const std::vector<std::pair<int, int>>& tied() const { return tied_; }
  const std::vector<std::pair<int, int>>& dep() const { return dep_; }
  // Fixed placement (route-only mode): switch per variable.
  const std::vector<int>& fixed() const { return fixed_; }

  std::string VarName(const Var& v) const;
  bool IsBinary(const Var& v) const { return v.kind == Var::kP; }

  // Enumerates every constraint row in a deterministic order.
  void ForEachRow(const std::function<void(const Row&)>& fn) const;
  // Objective terms: (d_uv / c_ij) R_uvij over non-virtual arcs.
  std::vector<std::pair<Var, double>> Objective() const;

  Assignment Zero() const;
  double Value(const Assignment& x, const Var& v) const;
  double ObjectiveValue(const Assignment& x) const;

 private:
  Mode mode_ = Mode::kPlaceAndRoute;
  int num_switches_ = 0;
  std::vector<std::string> node_names_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> in_arcs_, out_arcs_;
  absl::btree_map<std::pair<int, int>, int> arc_index_;
  std::vector<Flow> flows_;
  std::vector<std::string> vars_;
  std::vector<std::pair<int, int>> tied_;
  std::vector<std::pair<int, int>> dep_;
  std::vector<int> fixed_;
};

// CPLEX LP text: objective, rows sorted by name, bounds, binaries.
// Coefficients use 12 significant digits.
std::string ExportLp(const MilpModel& m);

// Converts placement and routing into variable values. Paths are extended
// with the virtual port nodes at both ends.
MilpModel::Assignment ToAssignment(const MilpModel& m, const Topology& topo,
                                   const Placement& pl, const Routing& rt);

// Every row evaluated with absolute tolerance 1e-9.
std::vector<MilpModel::Violation> CheckAssignment(const MilpModel& m,
                                                  const MilpModel::Assignment& x);
std::vector<MilpModel::Violation> CheckSolution(const MilpModel& m,
                                                const Topology& topo,
                                                const Placement& pl,
                                                const Routing& rt);

constexpr double kCheckTolerance = 1e-9;

}  // namespace snapnet

#endif  // SNAPNET_MILP_H_
