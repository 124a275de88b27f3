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


// Distributed data plane: per-switch diagram fragments, the header protocol
// that carries a packet's progress between switches, and routing tables.
//
// A packet runs the stateless tests at its ingress switch, then visits the
// owners of the state groups it needs in group order along one designated
// path. The header records the ingress port, the designated egress, the
// diagram node to resume from and the next group to process. Once no state
// work is left the packet's leaf is executed and each output copy follows
// the designated path towards its real egress.
//
// Diagram node ids are pre-order positions in the program diagram.

#ifndef SNAPNET_RULEGEN_H_
#define SNAPNET_RULEGEN_H_

#include <array>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "snapnet/ast.h"
#include "snapnet/deps.h"
#include "snapnet/milp.h"
#include "snapnet/psm.h"
#include "snapnet/solver.h"
#include "snapnet/topology.h"
#include "snapnet/xfdd.h"

namespace snapnet {

// Group value meaning "no group processed yet" (ingress) in resume points.
constexpr int kIngress = -1;
// Target value of a header whose state work is done.
constexpr int kEgress = -1;

struct SnapHeader {
  int obs_inport = 0;
  int obs_outport = 0;    // designated egress of the current path
  bool resolved = false;  // obs_outport is the packet's real egress
  int resume_node = 0;    // pre-order id; meaningless once resolved
  int target = kEgress;   // next group to process
  int after = kIngress;   // last group processed
  int hop = 0;            // position on the designated path
};

struct FragmentBranch {
  int id = 0;
  TestAtom test;
  int group = kIngress;  // kIngress for packet tests
  int hi = 0;
  int lo = 0;
};

struct FragmentLeaf {
  int id = 0;
  std::vector<ActionSeq> seqs;
};

// What happens when evaluation stops at `node` after processing `after`:
// the writes of that group, then either a move towards `next` or, with
// next == kEgress, execution of the leaf.
struct Boundary {
  int node = 0;
  int after = kIngress;
  std::vector<std::pair<std::string, WriteList>> writes;
  int next = kEgress;
};

struct SteerChoice {
  int outport = 0;
  double weight = 0;
  int hop = 0;
};

// Weighted choice of a designated path for packets from `inport` stopped at
// (`node`, `after`) that must reach the owner of `target`.
struct SteerRule {
  int inport = 0;
  int node = 0;
  int after = kIngress;
  int target = 0;
  std::vector<SteerChoice> choices;
};

struct PathRule {
  int inport = 0;
  int outport = 0;
  int hop = 0;
  friend auto operator<=>(const PathRule&, const PathRule&) = default;
};

struct SwitchConfig {
  std::string id;
  std::vector<int> ports;
  std::vector<StateDecl> tables;  // variables owned here
  std::vector<FragmentBranch> branches;
  std::vector<FragmentLeaf> leaves;
  // Resume points (node, group); group kIngress is the diagram root.
  std::vector<std::pair<int, int>> entries;
  std::vector<Boundary> boundaries;
  std::vector<SteerRule> steer;
  std::vector<std::pair<PathRule, std::string>> forward;  // to next switch
  std::vector<std::pair<PathRule, int>> process;          // group here
  std::vector<PathRule> emit;                             // at `outport`
};

struct DeploymentBundle {
  std::vector<std::string> fields;
  std::vector<std::vector<std::string>> groups;
  Placement placement;
  double objective = 0;
  bool exact = false;
  // Designated path per port pair: switch ids and (group, hop) stops.
  std::map<std::pair<int, int>, std::pair<std::vector<std::string>,
                                          std::vector<std::pair<int, int>>>>
      paths;
  std::map<std::string, SwitchConfig> switches;
  std::string xfdd_dot;
};

// Splits the diagram and builds all switch configurations. Throws
// CompileError when a group's writes depend on tests of a later group.
DeploymentBundle GenerateRules(const Manager& m, NodeId root, const Program& prog,
                               const Topology& topo, const StateDemand& demand,
                               const Solution& sol);

// Internal consistency of a bundle against its topology: resume points,
// table ownership, links and path coverage. Empty when consistent.
std::vector<std::string> ValidateBundle(const DeploymentBundle& b, const Topology& topo);

// File name to contents, in the bundle directory layout.
std::map<std::string, std::string> BundleFiles(const DeploymentBundle& b);
absl::Status WriteBundle(const DeploymentBundle& b, const std::string& dir);
absl::StatusOr<DeploymentBundle> ReadBundle(const std::string& dir);

struct CompileOptions {
  SolveOptions solve;
  bool parallel = false;
  // Check the solver's answer against the optimization model.
  bool check = true;
};

// Wall-clock seconds of the phases: state dependency, diagram generation,
// packet-state map, model creation, solving, rule generation.
using PhaseTimes = std::array<double, 6>;

struct CompileResult {
  Program program;
  DependencyGraph deps;
  std::unique_ptr<Manager> manager;
  NodeId root = 0;
  StateDemand demand;
  Solution solution;
  DeploymentBundle bundle;
  PhaseTimes times{};
};

// The whole pipeline. Status codes: InvalidArgument for compile errors
// (races, unsupported constructs), FailedPrecondition or DeadlineExceeded
// when no placement is found, Internal if the solution fails its check.
absl::StatusOr<CompileResult> CompileProgram(const Program& prog, const Topology& topo,
                                             const CompileOptions& opts = {});

}  // namespace snapnet

#endif  // SNAPNET_RULEGEN_H_
