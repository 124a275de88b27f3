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


#include "snapnet/psm.h"

#include <algorithm>
#include <set>

#include "absl/status/status.h"
#include "nlohmann/json.hpp"

namespace snapnet {

namespace {

const std::vector<std::string>& Empty() {
  static const auto* empty = new std::vector<std::string>();
  return *empty;
}

bool SatisfiableWith(std::vector<Literal>& path, const TestAtom& t) {
  path.push_back({&t, true});
  bool ok = Satisfiable(path);
  path.pop_back();
  return ok;
}

}  // namespace

const std::vector<std::string>& StateDemand::Of(int u, int v) const {
  auto it = flows.find({u, v});
  return it == flows.end() ? Empty() : it->second;
}

bool StateDemand::Needs(int u, int v, const std::string& var) const {
  const std::vector<std::string>& s = Of(u, v);
  return std::find(s.begin(), s.end(), var) != s.end();
}

std::string StateDemand::ToJsonLines() const {
  std::string out;
  for (const auto& [uv, vars] : flows) {
    nlohmann::json j = {{"u", uv.first}, {"v", uv.second}, {"states", vars}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

void ForEachPsmPath(const Manager& m, NodeId root, const std::vector<int>& ports,
                    const std::function<void(const PsmPath&)>& fn) {
  std::vector<TestAtom> in_tests, out_tests;
  for (int p : ports) {
    in_tests.push_back(TestAtom::FieldValue("inport", Value::Int(p)));
    out_tests.push_back(TestAtom::FieldValue("outport", Value::Int(p)));
  }
  std::vector<Literal> lits;
  PsmPath path;
  std::function<void(NodeId)> visit = [&](NodeId n) {
    path.nodes.push_back(n);
    if (!m.IsLeaf(n)) {
      const TestAtom& t = m.TestOf(n);
      absl::btree_set<std::string> saved = path.vars;
      if (t.kind == TestAtom::Kind::kState) path.vars.insert(t.var);
      for (bool pos : {true, false}) {
        lits.push_back({&t, pos});
        visit(pos ? m.Hi(n) : m.Lo(n));
        lits.pop_back();
      }
      path.vars = std::move(saved);
      path.nodes.pop_back();
      return;
    }
    const Leaf& leaf = m.LeafOf(n);
    PsmPath out = path;
    for (const std::string& v : WrittenVars(leaf)) out.vars.insert(v);
    for (size_t i = 0; i < ports.size(); ++i) {
      if (SatisfiableWith(lits, in_tests[i])) out.inports.push_back(ports[i]);
    }
    std::set<int> outs;
    for (const ActionSeq& s : leaf.seqs) {
      if (s.drop) continue;
      auto it = s.mods.find("outport");
      if (it != s.mods.end()) {
        const Value& v = it->second;
        if (v.is_int() &&
            std::binary_search(ports.begin(), ports.end(), v.as_int())) {
          outs.insert(static_cast<int>(v.as_int()));
        }
        continue;
      }
      for (size_t i = 0; i < ports.size(); ++i) {
        if (SatisfiableWith(lits, out_tests[i])) outs.insert(ports[i]);
      }
    }
    if (outs.empty()) outs.insert(ports.begin(), ports.end());
    out.outports.assign(outs.begin(), outs.end());
    fn(out);
    path.nodes.pop_back();
  };
  visit(root);
}

absl::StatusOr<StateDemand> PacketStateMap(const Manager& m, NodeId root,
                                           const Topology& topo) {
  std::vector<int> ports = topo.Ports();
  if (ports.empty()) return absl::InvalidArgumentError("topology has no external ports");
  std::map<std::pair<int, int>, absl::btree_set<std::string>> sets;
  absl::flat_hash_map<NodeId, std::set<int>> outs;
  for (int u : ports) {
    for (int v : ports) sets[{u, v}];
  }
  ForEachPsmPath(m, root, ports, [&](const PsmPath& p) {
    for (NodeId n : p.nodes) outs[n].insert(p.outports.begin(), p.outports.end());
    if (p.vars.empty()) return;
    for (int u : p.inports) {
      for (int v : p.outports) sets[{u, v}].insert(p.vars.begin(), p.vars.end());
    }
  });
  StateDemand d;
  const OrderSpec& ord = m.order();
  for (auto& [uv, vars] : sets) {
    std::vector<std::string> list(vars.begin(), vars.end());
    std::sort(list.begin(), list.end(), [&](const std::string& a, const std::string& b) {
      return ord.Rank(a) < ord.Rank(b);
    });
    d.flows[uv] = std::move(list);
  }
  for (auto& [n, s] : outs) d.node_outports[n].assign(s.begin(), s.end());
  return d;
}

}  // namespace snapnet
