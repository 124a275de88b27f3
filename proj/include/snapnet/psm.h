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


// Packet-state mapping: which state variables the traffic between each pair
// of external ports may read or write.

#ifndef SNAPNET_PSM_H_
#define SNAPNET_PSM_H_

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/btree_set.h"
#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "snapnet/topology.h"
#include "snapnet/xfdd.h"

namespace snapnet {

// One root-to-leaf path of a diagram, seen from the network.
struct PsmPath {
  std::vector<NodeId> nodes;  // root first, leaf last
  std::vector<int> inports;   // ports the path admits
  std::vector<int> outports;  // ports its packets may leave from
  absl::btree_set<std::string> vars;
};

struct StateDemand {
  // Variables needed by each (ingress, egress) port pair, in the global
  // state order. Every pair of topology ports has an entry.
  std::map<std::pair<int, int>, std::vector<std::string>> flows;
  // Candidate egress ports of all paths through a node.
  absl::flat_hash_map<NodeId, std::vector<int>> node_outports;

  const std::vector<std::string>& Of(int u, int v) const;
  bool Needs(int u, int v, const std::string& var) const;
  // One JSON object per line: {"u": 1, "v": 6, "states": [...]}.
  std::string ToJsonLines() const;
};

// Calls `fn` for every path of `root`. A path without a port-valued outport
// may leave from any port admitted by its tests; paths whose packets never
// leave are treated as able to leave anywhere, since the state work they do
// still has to be routed.
void ForEachPsmPath(const Manager& m, NodeId root, const std::vector<int>& ports,
                    const std::function<void(const PsmPath&)>& fn);

// `root` must already include the assumption.
absl::StatusOr<StateDemand> PacketStateMap(const Manager& m, NodeId root,
                                           const Topology& topo);

}  // namespace snapnet

#endif  // SNAPNET_PSM_H_
