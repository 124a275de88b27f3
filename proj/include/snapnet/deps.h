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

// State dependency analysis: which variables must be visited before which,
// and which must share a switch.

#ifndef SNAPNET_DEPS_H_
#define SNAPNET_DEPS_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/container/btree_map.h"
#include "absl/container/btree_set.h"
#include "snapnet/ast.h"

namespace snapnet {

using VarPair = std::pair<std::string, std::string>;

struct DependencyGraph {
  absl::btree_set<std::string> nodes;
  // (s, t): t is written after s is read.
  absl::btree_set<VarPair> edges;
};

absl::btree_set<std::string> ReadVars(const Policy& p);
absl::btree_set<std::string> WriteVars(const Policy& p);

// Dependency edges of `p`; nodes are all state variables that occur in it.
DependencyGraph StDep(const Policy& p);

struct OrderSpec {
  // Strongly connected components in topological order; members sorted.
  std::vector<std::vector<std::string>> groups;
  absl::btree_map<std::string, int> group_of;
  // Position of each variable in the global state order.
  absl::btree_map<std::string, int> state_rank;
  // Unordered pairs (first < second) sharing a component.
  absl::btree_set<VarPair> tied;
  // (s, t) with s's component before t's and an edge path from s to t.
  absl::btree_set<VarPair> dep;
  // Field order used by field tests.
  std::vector<std::string> fields;

  int Rank(const std::string& var) const;
  bool Tied(const std::string& s, const std::string& t) const;
  // True if some dependency forces s to be visited before t.
  bool MustPrecede(const std::string& s, const std::string& t) const;
  std::vector<std::string> StateOrder() const;
};

OrderSpec MakeOrderSpec(const DependencyGraph& g,
                        const std::vector<std::string>& fields);

// Graphviz rendering; tied groups are drawn as clusters.
std::string DepsToDot(const DependencyGraph& g, const OrderSpec& ord);

}  // namespace snapnet

#endif  // SNAPNET_DEPS_H_
