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

#include "snapnet/deps.h"

#include <algorithm>
#include <cassert>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"

namespace snapnet {
namespace {

void Collect(const Policy& p, bool reads, absl::btree_set<std::string>& out) {
  switch (p.kind) {
    case PolicyKind::kStateTest:
      if (reads) out.insert(p.name);
      break;
    case PolicyKind::kStateSet:
      if (!reads) out.insert(p.name);
      break;
    case PolicyKind::kIncr:
    case PolicyKind::kDecr:
      out.insert(p.name);
      break;
    default:
      break;
  }
  for (const PolicyPtr& c : {p.a, p.b, p.c}) {
    if (c) Collect(*c, reads, out);
  }
}

void Cross(const absl::btree_set<std::string>& a,
           const absl::btree_set<std::string>& b,
           absl::btree_set<VarPair>& out) {
  for (const std::string& s : a) {
    for (const std::string& t : b) out.insert({s, t});
  }
}

void Edges(const Policy& p, absl::btree_set<VarPair>& out) {
  switch (p.kind) {
    case PolicyKind::kPar:
      Edges(*p.a, out);
      Edges(*p.b, out);
      return;
    case PolicyKind::kSeq:
      Cross(ReadVars(*p.a), WriteVars(*p.b), out);
      Edges(*p.a, out);
      Edges(*p.b, out);
      return;
    case PolicyKind::kIf: {
      absl::btree_set<std::string> w = WriteVars(*p.b);
      absl::btree_set<std::string> wq = WriteVars(*p.c);
      w.insert(wq.begin(), wq.end());
      Cross(ReadVars(*p.a), w, out);
      Edges(*p.b, out);
      Edges(*p.c, out);
      return;
    }
    case PolicyKind::kAtomic: {
      absl::btree_set<std::string> rw = ReadVars(*p.a);
      absl::btree_set<std::string> w = WriteVars(*p.a);
      rw.insert(w.begin(), w.end());
      Cross(rw, rw, out);
      return;
    }
    default:
      return;
  }
}

}  // namespace

absl::btree_set<std::string> ReadVars(const Policy& p) {
  absl::btree_set<std::string> out;
  Collect(p, true, out);
  return out;
}

absl::btree_set<std::string> WriteVars(const Policy& p) {
  absl::btree_set<std::string> out;
  Collect(p, false, out);
  return out;
}

DependencyGraph StDep(const Policy& p) {
  DependencyGraph g;
  g.nodes = StateVars(p);
  Edges(p, g.edges);
  return g;
}

int OrderSpec::Rank(const std::string& var) const {
  auto it = state_rank.find(var);
  return it == state_rank.end() ? static_cast<int>(state_rank.size())
                                : it->second;
}

bool OrderSpec::Tied(const std::string& s, const std::string& t) const {
  if (s == t) return true;
  return tied.contains(s < t ? VarPair{s, t} : VarPair{t, s});
}

bool OrderSpec::MustPrecede(const std::string& s, const std::string& t) const {
  return dep.contains({s, t});
}

std::vector<std::string> OrderSpec::StateOrder() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

OrderSpec MakeOrderSpec(const DependencyGraph& g,
                        const std::vector<std::string>& fields) {
  OrderSpec ord;
  ord.fields = fields;
  std::sort(ord.fields.begin(), ord.fields.end());

  std::vector<std::string> names(g.nodes.begin(), g.nodes.end());
  absl::btree_map<std::string, int> id;
  for (size_t i = 0; i < names.size(); ++i) id[names[i]] = static_cast<int>(i);
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& [s, t] : g.edges) {
    if (id.contains(s) && id.contains(t)) adj[id[s]].push_back(id[t]);
  }

  // Tarjan's algorithm.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0, ncomp = 0;
  std::function<void(int)> strong = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v) {
    if (index[v] < 0) strong(v);
  }

  std::vector<std::vector<std::string>> members(ncomp);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(names[v]);
  std::vector<absl::btree_set<int>> cadj(ncomp);
  std::vector<int> indeg(ncomp, 0);
  for (int v = 0; v < n; ++v) {
    for (int w : adj[v]) {
      if (comp[v] != comp[w] && cadj[comp[v]].insert(comp[w]).second) {
        ++indeg[comp[w]];
      }
    }
  }

  // Kahn's algorithm; among ready components the one with the smallest
  // member name goes first.
  auto key = [&](int c) { return members[c].front(); };
  auto cmp = [&](int a, int b) { return key(a) > key(b); };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
  for (int c = 0; c < ncomp; ++c) {
    std::sort(members[c].begin(), members[c].end());
  }
  for (int c = 0; c < ncomp; ++c) {
    if (indeg[c] == 0) ready.push(c);
  }
  std::vector<int> topo;
  while (!ready.empty()) {
    int c = ready.top();
    ready.pop();
    topo.push_back(c);
    for (int d : cadj[c]) {
      if (--indeg[d] == 0) ready.push(d);
    }
  }
  assert(static_cast<int>(topo.size()) == ncomp);

  std::vector<int> position(ncomp);
  for (size_t i = 0; i < topo.size(); ++i) {
    position[topo[i]] = static_cast<int>(i);
    ord.groups.push_back(members[topo[i]]);
  }
  int rank = 0;
  for (size_t gi = 0; gi < ord.groups.size(); ++gi) {
    for (const std::string& s : ord.groups[gi]) {
      ord.group_of[s] = static_cast<int>(gi);
      ord.state_rank[s] = rank++;
    }
  }
  for (const auto& group : ord.groups) {
    for (size_t i = 0; i < group.size(); ++i) {
      for (size_t j = i + 1; j < group.size(); ++j) {
        ord.tied.insert({group[i], group[j]});
      }
    }
  }
  // dep is the transitive closure of the condensation.
  for (int c = 0; c < ncomp; ++c) {
    std::vector<bool> seen(ncomp, false);
    std::vector<int> work(cadj[c].begin(), cadj[c].end());
    while (!work.empty()) {
      int d = work.back();
      work.pop_back();
      if (seen[d]) continue;
      seen[d] = true;
      for (int e : cadj[d]) work.push_back(e);
    }
    for (int d = 0; d < ncomp; ++d) {
      if (!seen[d]) continue;
      for (const std::string& s : members[c]) {
        for (const std::string& t : members[d]) ord.dep.insert({s, t});
      }
    }
  }
  return ord;
}

std::string DepsToDot(const DependencyGraph& g, const OrderSpec& ord) {
  std::string out = "digraph deps {\n  rankdir=LR;\n";
  for (size_t gi = 0; gi < ord.groups.size(); ++gi) {
    const auto& group = ord.groups[gi];
    if (group.size() > 1) {
      absl::StrAppend(&out, "  subgraph cluster_", gi,
                      " {\n    label=\"tied\";\n    style=dashed;\n");
      for (const std::string& s : group) absl::StrAppend(&out, "    \"", s, "\";\n");
      out += "  }\n";
    } else {
      absl::StrAppend(&out, "  \"", group[0], "\";\n");
    }
  }
  for (const auto& [s, t] : g.edges) {
    absl::StrAppend(&out, "  \"", s, "\" -> \"", t, "\";\n");
  }
  out += "}\n";
  return out;
}

}  // namespace snapnet
