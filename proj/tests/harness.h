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


// Differential harness: runs random traffic through a compiled network and
// through the reference interpreter and compares the outcomes.

#ifndef SNAPNET_TESTS_HARNESS_H_
#define SNAPNET_TESTS_HARNESS_H_

#include <cstdint>
#include <string>

#include <vector>

#include "snapnet/ast.h"
#include "snapnet/milp.h"
#include "snapnet/rulegen.h"
#include "snapnet/simnet.h"
#include "snapnet/topology.h"

namespace snapnet::testing {

struct DiffOutcome {
  int packets = 0;
  int emitted = 0;
  int state_writes = 0;  // oracle packets that changed the store
  std::string mismatch;  // empty when everything agreed
};

// Serialized mode, `n` packets from a PacketGenerator seeded with `seed`.
// Emissions are compared per packet as (port, packet) multisets, and the
// union of the switch tables is compared with the oracle store at the end.
DiffOutcome Differential(const Program& prog, const Topology& topo,
                         const DeploymentBundle& bundle, int n, uint64_t seed);

// The twelve-switch example network of the corpus.
Topology ExampleTopology();

// Corpus program `name` composed with the egress assignment.
Program WithEgress(const std::string& name);

// DNS tunnel detection with the subnet assumption and the egress
// assignment: the running example.
Program RunningExample();

// One deliberately broken assignment per family of state rows of the
// optimization model (place, visit, tied, pass, pcons, sink, order), and
// what the checker reported for it.
struct RowViolationCase {
  std::string family;
  std::string how;
  std::vector<MilpModel::Violation> violations;
  bool Flagged() const;
};
std::vector<RowViolationCase> StateRowViolationCases();

// Ingress I1 (port 1) reaches X, then two disjoint two-hop branches through
// A and B meet at Y, which holds egresses 3 and 4. Demands 1->3 and 1->4
// fill one branch each.
Topology RaceTopology();

// Two honeypot packets entering port 1 at the same tick, one leaving at 3
// and one at 4.
RaceScenario HoneypotRace(const Program& prog, uint64_t seed);

// Compiles `prog` on RaceTopology and counts the seeds in [0, schedules)
// whose HoneypotRace leaves the two tables describing different packets.
absl::StatusOr<int> CountTornSchedules(const Program& prog, const Placement* fixed,
                                       int schedules);

}  // namespace snapnet::testing

#endif  // SNAPNET_TESTS_HARNESS_H_
