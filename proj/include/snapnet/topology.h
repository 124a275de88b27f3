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


// Physical networks: switches, external (one-big-switch) ports, capacitated
// directed links and traffic demands between ports.

#ifndef SNAPNET_TOPOLOGY_H_
#define SNAPNET_TOPOLOGY_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace snapnet {

struct Topology {
  struct Node {
    std::string id;
    std::vector<int> ports;  // external ports attached here
  };
  struct Link {
    int from = 0;  // node indices
    int to = 0;
    double capacity = 0;
  };

  std::vector<Node> nodes;  // sorted by id
  std::vector<Link> links;  // sorted by (from, to)
  // Volume per ordered port pair; absent pairs have no demand.
  std::map<std::pair<int, int>, double> demands;

  int NodeIndex(const std::string& id) const;  // -1 if unknown
  std::vector<int> Ports() const;               // sorted
  int SwitchOfPort(int port) const;             // -1 if unknown
  double Demand(int u, int v) const;
  // Link index from `from` to `to`, or -1.
  int LinkIndex(int from, int to) const;
  // Outgoing link indices per node.
  std::vector<std::vector<int>> OutLinks() const;
};

// Parses the JSON topology format. Each listed link is usable in both
// directions with the given capacity unless it sets "directed": true.
// Without a "demands" list every ordered pair of distinct ports gets volume 1.
absl::StatusOr<Topology> ParseTopology(const std::string& json_text);
absl::StatusOr<Topology> LoadTopology(const std::string& path);
std::string TopologyToJson(const Topology& topo);

// Connected random network of `switches` nodes: a geometric spanning tree
// plus short extra links. The `edge_fraction` of nodes with the lowest
// degree get one external port each; demands are uniform.
Topology GenerateTopology(int switches, double edge_fraction, uint64_t seed,
                          double capacity = 10000.0);

}  // namespace snapnet

#endif  // SNAPNET_TOPOLOGY_H_
