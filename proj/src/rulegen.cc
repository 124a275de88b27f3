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


#include "snapnet/rulegen.h"

#include <algorithm>
#include <chrono>
#include <climits>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "snapnet/codec.h"

namespace snapnet {

namespace {

using nlohmann::json;
using Profile = std::vector<std::pair<std::string, WriteList>>;

// Collects the configuration of every switch while the diagram is explored.
class Splitter {
 public:
  Splitter(const Manager& m, NodeId root, const Topology& topo,
           const StateDemand& demand, const Solution& sol)
      : m_(m), ord_(m.order()), topo_(topo), demand_(demand), sol_(sol) {
    std::vector<NodeId> pre = m.PreOrder(root);
    for (size_t i = 0; i < pre.size(); ++i) id_[pre[i]] = static_cast<int>(i) + 1;
    for (int g = 0; g < static_cast<int>(ord_.groups.size()); ++g) {
      owner_.push_back(topo.NodeIndex(sol.placement.at(ord_.groups[g][0])));
    }
  }

  void Run(NodeId root) {
    for (int u : topo_.Ports()) {
      int s = topo_.SwitchOfPort(u);
      AddEntry(s, root, kIngress);
      Evaluate(u, s, root, kIngress);
    }
  }

  std::vector<SwitchConfig>& configs() { return configs_; }
  int Id(NodeId n) const { return id_.at(n); }
  int Owner(int g) const { return owner_[g]; }

  SwitchConfig& Config(int s) {
    if (configs_.empty()) {
      configs_.resize(topo_.nodes.size());
      for (size_t i = 0; i < configs_.size(); ++i) {
        configs_[i].id = topo_.nodes[i].id;
        configs_[i].ports = topo_.nodes[i].ports;
      }
    }
    return configs_[s];
  }

 private:
  int GroupOf(NodeId n) const {
    const TestAtom& t = m_.TestOf(n);
    return t.kind == TestAtom::Kind::kState ? ord_.group_of.at(t.var) : kIngress;
  }

  // Writes of group `g` shared by every leaf below `n`; nullopt if they
  // differ.
  const std::optional<Profile>& Writes(NodeId n, int g) {
    auto key = std::make_pair(n, g);
    auto it = profiles_.find(key);
    if (it != profiles_.end()) return it->second;
    std::optional<Profile> out;
    if (m_.IsLeaf(n)) {
      Profile p;
      for (const std::string& var : ord_.groups[g]) {
        const WriteList* w = DominantWrites(m_.LeafOf(n), var);
        if (w != nullptr && !w->empty()) p.emplace_back(var, *w);
      }
      out = std::move(p);
    } else {
      std::optional<Profile> hi = Writes(m_.Hi(n), g);
      const std::optional<Profile>& lo = Writes(m_.Lo(n), g);
      if (hi && lo && *hi == *lo) out = std::move(hi);
    }
    return profiles_[key] = std::move(out);
  }

  // The next group a packet stopped at `n` must visit, starting from `c`.
  int Next(NodeId n, int c) {
    int limit = m_.IsLeaf(n) ? static_cast<int>(ord_.groups.size()) : GroupOf(n);
    for (int g = c; g < limit; ++g) {
      const std::optional<Profile>& p = Writes(n, g);
      if (!p) {
        throw CompileError(absl::StrCat("writes to ", ord_.groups[g][0],
                                        " depend on tests of later state variables"));
      }
      if (!p->empty()) return g;
    }
    return m_.IsLeaf(n) ? kEgress : limit;
  }

  void AddEntry(int s, NodeId n, int g) {
    if (entries_.insert({s, n, g}).second) Config(s).entries.push_back({Id(n), g});
  }

  void AddBranch(int s, NodeId n, int g) {
    if (!branches_.insert({s, n}).second) return;
    Config(s).branches.push_back(
        FragmentBranch{Id(n), m_.TestOf(n), g, Id(m_.Hi(n)), Id(m_.Lo(n))});
  }

  // Runs the tests of group `g` (packet tests for kIngress) from `n` at `s`.
  void Evaluate(int u, int s, NodeId n, int g) {
    if (!m_.IsLeaf(n) && GroupOf(n) == g) {
      AddBranch(s, n, g);
      Evaluate(u, s, m_.Hi(n), g);
      Evaluate(u, s, m_.Lo(n), g);
      return;
    }
    Stop(u, s, n, g);
  }

  void Stop(int u, int s, NodeId n, int after) {
    if (!visited_.insert({u, n, after}).second) return;
    int next = Next(n, after + 1);
    if (boundaries_.insert({s, n, after}).second) {
      Boundary b{Id(n), after, {}, next};
      if (after != kIngress) b.writes = *Writes(n, after);
      Config(s).boundaries.push_back(std::move(b));
    }
    if (next == kEgress) {
      if (leaves_.insert({s, n}).second) {
        Config(s).leaves.push_back(FragmentLeaf{Id(n), m_.LeafOf(n).seqs});
      }
      return;
    }
    SteerRule rule{u, Id(n), after, next, {}};
    auto outs = demand_.node_outports.find(n);
    if (outs == demand_.node_outports.end()) return;
    for (int v : outs->second) {
      const FlowRoute& r = sol_.routes.at({u, v});
      int from = after == kIngress ? 0 : StopHop(r, after);
      int to = StopHop(r, next);
      if (from < 0 || to < from) continue;
      rule.choices.push_back({v, u == v ? 0.0 : topo_.Demand(u, v), from});
    }
    // Unreachable for packets from u: no path through `n` admits u.
    if (rule.choices.empty()) return;
    bool weighted = std::any_of(rule.choices.begin(), rule.choices.end(),
                                [](const SteerChoice& c) { return c.weight > 0; });
    if (!weighted) {
      for (SteerChoice& c : rule.choices) c.weight = 1;
    }
    Config(s).steer.push_back(std::move(rule));
    AddEntry(owner_[next], n, next);
    Evaluate(u, owner_[next], n, next);
  }

  static int StopHop(const FlowRoute& r, int g) {
    for (const auto& [group, hop] : r.stops) {
      if (group == g) return hop;
    }
    return -1;
  }

  const Manager& m_;
  const OrderSpec& ord_;
  const Topology& topo_;
  const StateDemand& demand_;
  const Solution& sol_;
  absl::flat_hash_map<NodeId, int> id_;
  std::vector<int> owner_;
  std::vector<SwitchConfig> configs_;
  absl::flat_hash_map<std::pair<NodeId, int>, std::optional<Profile>> profiles_;
  std::set<std::tuple<int, NodeId, int>> entries_, boundaries_, visited_;
  std::set<std::pair<int, NodeId>> branches_, leaves_;
};

void Canonicalize(SwitchConfig& c) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(c.branches.begin(), c.branches.end(), by_id);
  std::sort(c.leaves.begin(), c.leaves.end(), by_id);
  std::sort(c.entries.begin(), c.entries.end());
  std::sort(c.boundaries.begin(), c.boundaries.end(), [](const Boundary& a, const Boundary& b) {
    return std::tie(a.node, a.after) < std::tie(b.node, b.after);
  });
  std::sort(c.steer.begin(), c.steer.end(), [](const SteerRule& a, const SteerRule& b) {
    return std::tie(a.inport, a.node, a.after) < std::tie(b.inport, b.node, b.after);
  });
  std::sort(c.forward.begin(), c.forward.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(c.process.begin(), c.process.end());
  std::sort(c.emit.begin(), c.emit.end());
}

}  // namespace

DeploymentBundle GenerateRules(const Manager& m, NodeId root, const Program& prog,
                               const Topology& topo, const StateDemand& demand,
                               const Solution& sol) {
  const OrderSpec& ord = m.order();
  Splitter split(m, root, topo, demand, sol);
  for (size_t i = 0; i < topo.nodes.size(); ++i) split.Config(static_cast<int>(i));
  split.Run(root);
  std::vector<SwitchConfig>& configs = split.configs();

  DeploymentBundle b;
  b.fields = prog.fields;
  b.groups = ord.groups;
  b.placement = sol.placement;
  b.objective = sol.objective;
  b.exact = sol.exact;
  b.xfdd_dot = m.ToDot(root);
  for (const auto& [var, sw] : sol.placement) {
    const StateDecl* decl = prog.FindState(var);
    if (decl == nullptr) throw CompileError("placement names undeclared variable " + var);
    configs[topo.NodeIndex(sw)].tables.push_back(*decl);
  }
  for (const auto& [uv, r] : sol.routes) {
    auto [u, v] = uv;
    auto& [names, stops] = b.paths[uv];
    for (int n : r.nodes) names.push_back(topo.nodes[n].id);
    stops = r.stops;
    const int last = static_cast<int>(r.nodes.size()) - 1;
    for (int h = 0; h <= last; ++h) {
      SwitchConfig& c = configs[r.nodes[h]];
      if (h < last) {
        c.forward.push_back({PathRule{u, v, h}, topo.nodes[r.nodes[h + 1]].id});
      } else {
        c.emit.push_back(PathRule{u, v, h});
      }
    }
    for (const auto& [g, h] : r.stops) {
      configs[r.nodes[h]].process.push_back({PathRule{u, v, h}, g});
    }
  }
  for (SwitchConfig& c : configs) {
    Canonicalize(c);
    std::string id = c.id;
    b.switches.emplace(id, std::move(c));
  }
  return b;
}

std::vector<std::string> ValidateBundle(const DeploymentBundle& b, const Topology& topo) {
  std::vector<std::string> problems;
  auto report = [&](auto&&... parts) { problems.push_back(absl::StrCat(parts...)); };
  absl::flat_hash_map<std::string, int> group_of;
  for (size_t g = 0; g < b.groups.size(); ++g) {
    for (const std::string& s : b.groups[g]) group_of[s] = static_cast<int>(g);
  }
  std::vector<std::string> owner(b.groups.size());
  for (size_t g = 0; g < b.groups.size(); ++g) {
    for (const std::string& s : b.groups[g]) {
      auto it = b.placement.find(s);
      if (it == b.placement.end()) {
        report("variable ", s, " is not placed");
        continue;
      }
      if (!owner[g].empty() && owner[g] != it->second) {
        report("tied variable ", s, " placed apart from its group");
      }
      owner[g] = it->second;
    }
  }
  for (const auto& [id, c] : b.switches) {
    int self = topo.NodeIndex(id);
    if (self < 0) {
      report("switch ", id, " is not in the topology");
      continue;
    }
    for (const StateDecl& t : c.tables) {
      auto it = b.placement.find(t.name);
      if (it == b.placement.end() || it->second != id) {
        report(id, " holds table ", t.name, " it does not own");
      }
    }
    absl::flat_hash_map<int, const FragmentBranch*> branch;
    for (const FragmentBranch& x : c.branches) {
      branch[x.id] = &x;
      if (x.group != kIngress && owner[x.group] != id) {
        report(id, " evaluates state test ", x.test.ToString(), " owned elsewhere");
      }
    }
    std::set<std::pair<int, int>> bounds;
    for (const Boundary& x : c.boundaries) bounds.insert({x.node, x.after});
    std::set<int> leaves;
    for (const FragmentLeaf& x : c.leaves) leaves.insert(x.id);
    for (const Boundary& x : c.boundaries) {
      if (x.next == kEgress && !leaves.contains(x.node)) {
        report(id, " finishes at node ", x.node, " without its leaf");
      }
    }
    for (const auto& [node, g] : c.entries) {
      std::vector<int> stack = {node};
      while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        auto it = branch.find(n);
        if (it != branch.end() && it->second->group == g) {
          stack.push_back(it->second->hi);
          stack.push_back(it->second->lo);
        } else if (!bounds.contains({n, g})) {
          report(id, " cannot stop at node ", n, " after group ", g);
        }
      }
    }
    for (const SteerRule& r : c.steer) {
      const SwitchConfig* o = nullptr;
      if (r.target < 0 || r.target >= static_cast<int>(owner.size())) {
        report(id, " steers to unknown group ", r.target);
        continue;
      }
      auto oit = b.switches.find(owner[r.target]);
      if (oit != b.switches.end()) o = &oit->second;
      if (o == nullptr || std::find(o->entries.begin(), o->entries.end(),
                                    std::make_pair(r.node, r.target)) == o->entries.end()) {
        report(id, " steers node ", r.node, " to a switch without that resume point");
      }
      for (const SteerChoice& ch : r.choices) {
        auto pit = b.paths.find({r.inport, ch.outport});
        if (pit == b.paths.end() || ch.hop >= static_cast<int>(pit->second.first.size()) ||
            pit->second.first[ch.hop] != id) {
          report(id, " steers onto path (", r.inport, ",", ch.outport, ") off its route");
        }
      }
    }
    for (const auto& [rule, next] : c.forward) {
      if (topo.LinkIndex(self, topo.NodeIndex(next)) < 0) {
        report(id, " forwards to ", next, " without a link");
      }
    }
  }
  for (int u : topo.Ports()) {
    for (int v : topo.Ports()) {
      auto it = b.paths.find({u, v});
      if (it == b.paths.end()) {
        report("no path for (", u, ",", v, ")");
        continue;
      }
      const auto& names = it->second.first;
      if (names.empty() || names.front() != topo.nodes[topo.SwitchOfPort(u)].id ||
          names.back() != topo.nodes[topo.SwitchOfPort(v)].id) {
        report("path (", u, ",", v, ") does not connect its ports");
      }
      int prev_hop = 0, prev_group = -1;
      for (const auto& [g, h] : it->second.second) {
        if (g <= prev_group || h < prev_hop || h >= static_cast<int>(names.size()) ||
            names[h] != owner[g]) {
          report("path (", u, ",", v, ") visits group ", g, " out of order or off its owner");
        }
        prev_group = g;
        prev_hop = h;
      }
    }
  }
  for (const auto& [id, c] : b.switches) {
    if (!c.ports.empty() &&
        std::find(c.entries.begin(), c.entries.end(), std::make_pair(1, kIngress)) ==
            c.entries.end()) {
      report("ingress switch ", id, " lacks the diagram root");
    }
  }
  return problems;
}

namespace {

json PathRuleJson(const PathRule& r) {
  return {{"inport", r.inport}, {"outport", r.outport}, {"hop", r.hop}};
}

PathRule PathRuleFrom(const json& j) {
  return PathRule{j.at("inport").get<int>(), j.at("outport").get<int>(),
                  j.at("hop").get<int>()};
}

json SwitchJson(const SwitchConfig& c) {
  json j;
  j["id"] = c.id;
  j["ports"] = c.ports;
  j["tables"] = json::array();
  for (const StateDecl& t : c.tables) {
    j["tables"].push_back(
        {{"var", t.name}, {"arity", t.arity}, {"default", ValueToJson(t.default_value)}});
  }
  j["branches"] = json::array();
  for (const FragmentBranch& x : c.branches) {
    j["branches"].push_back({{"id", x.id},
                             {"test", TestToJson(x.test)},
                             {"group", x.group},
                             {"hi", x.hi},
                             {"lo", x.lo}});
  }
  j["leaves"] = json::array();
  for (const FragmentLeaf& x : c.leaves) {
    json seqs = json::array();
    for (const ActionSeq& s : x.seqs) seqs.push_back(SeqToJson(s));
    j["leaves"].push_back({{"id", x.id}, {"seqs", seqs}});
  }
  j["entries"] = json::array();
  for (const auto& [n, g] : c.entries) j["entries"].push_back({{"node", n}, {"group", g}});
  j["boundaries"] = json::array();
  for (const Boundary& x : c.boundaries) {
    json writes = json::array();
    for (const auto& [var, w] : x.writes) {
      writes.push_back({{"var", var}, {"atoms", WritesToJson(w)}});
    }
    j["boundaries"].push_back(
        {{"node", x.node}, {"after", x.after}, {"writes", writes}, {"next", x.next}});
  }
  j["steer"] = json::array();
  for (const SteerRule& r : c.steer) {
    json choices = json::array();
    for (const SteerChoice& ch : r.choices) {
      choices.push_back({{"outport", ch.outport}, {"weight", ch.weight}, {"hop", ch.hop}});
    }
    j["steer"].push_back({{"inport", r.inport},
                          {"node", r.node},
                          {"after", r.after},
                          {"target", r.target},
                          {"choices", choices}});
  }
  j["forward"] = json::array();
  for (const auto& [r, next] : c.forward) {
    json x = PathRuleJson(r);
    x["next"] = next;
    j["forward"].push_back(x);
  }
  j["process"] = json::array();
  for (const auto& [r, g] : c.process) {
    json x = PathRuleJson(r);
    x["group"] = g;
    j["process"].push_back(x);
  }
  j["emit"] = json::array();
  for (const PathRule& r : c.emit) j["emit"].push_back(PathRuleJson(r));
  return j;
}

SwitchConfig SwitchFrom(const json& j) {
  SwitchConfig c;
  c.id = j.at("id").get<std::string>();
  c.ports = j.at("ports").get<std::vector<int>>();
  for (const json& t : j.at("tables")) {
    c.tables.push_back(StateDecl{t.at("var").get<std::string>(), t.at("arity").get<int>(),
                                 ValueFromJson(t.at("default"))});
  }
  for (const json& x : j.at("branches")) {
    c.branches.push_back(FragmentBranch{x.at("id").get<int>(), TestFromJson(x.at("test")),
                                        x.at("group").get<int>(), x.at("hi").get<int>(),
                                        x.at("lo").get<int>()});
  }
  for (const json& x : j.at("leaves")) {
    FragmentLeaf l{x.at("id").get<int>(), {}};
    for (const json& s : x.at("seqs")) l.seqs.push_back(SeqFromJson(s));
    c.leaves.push_back(std::move(l));
  }
  for (const json& x : j.at("entries")) {
    c.entries.push_back({x.at("node").get<int>(), x.at("group").get<int>()});
  }
  for (const json& x : j.at("boundaries")) {
    Boundary bd{x.at("node").get<int>(), x.at("after").get<int>(), {},
                x.at("next").get<int>()};
    for (const json& w : x.at("writes")) {
      bd.writes.emplace_back(w.at("var").get<std::string>(), WritesFromJson(w.at("atoms")));
    }
    c.boundaries.push_back(std::move(bd));
  }
  for (const json& x : j.at("steer")) {
    SteerRule r{x.at("inport").get<int>(), x.at("node").get<int>(), x.at("after").get<int>(),
                x.at("target").get<int>(), {}};
    for (const json& ch : x.at("choices")) {
      r.choices.push_back(SteerChoice{ch.at("outport").get<int>(),
                                      ch.at("weight").get<double>(), ch.at("hop").get<int>()});
    }
    c.steer.push_back(std::move(r));
  }
  for (const json& x : j.at("forward")) {
    c.forward.push_back({PathRuleFrom(x), x.at("next").get<std::string>()});
  }
  for (const json& x : j.at("process")) {
    c.process.push_back({PathRuleFrom(x), x.at("group").get<int>()});
  }
  for (const json& x : j.at("emit")) c.emit.push_back(PathRuleFrom(x));
  return c;
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", p.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::map<std::string, std::string> BundleFiles(const DeploymentBundle& b) {
  std::map<std::string, std::string> files;
  json pl = json::object();
  for (const auto& [var, sw] : b.placement) pl[var] = sw;
  json top = {{"placement", pl},
              {"groups", b.groups},
              {"fields", b.fields},
              {"objective", b.objective},
              {"exact", b.exact}};
  files["placement.json"] = top.dump(2) + "\n";
  json paths = json::array();
  for (const auto& [uv, p] : b.paths) {
    json stops = json::array();
    for (const auto& [g, h] : p.second) stops.push_back({{"group", g}, {"hop", h}});
    paths.push_back({{"inport", uv.first},
                     {"outport", uv.second},
                     {"switches", p.first},
                     {"stops", stops}});
  }
  files["routing.json"] = json({{"paths", paths}}).dump(2) + "\n";
  for (const auto& [id, c] : b.switches) {
    files["switch/" + id + ".json"] = SwitchJson(c).dump(2) + "\n";
  }
  files["xfdd.dot"] = b.xfdd_dot;
  return files;
}

absl::Status WriteBundle(const DeploymentBundle& b, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "switch", ec);
  if (ec) return absl::UnavailableError(absl::StrCat("cannot create ", dir, ": ", ec.message()));
  for (const auto& [name, text] : BundleFiles(b)) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", name));
  }
  return absl::OkStatus();
}

absl::StatusOr<DeploymentBundle> ReadBundle(const std::string& dir) {
  namespace fs = std::filesystem;
  DeploymentBundle b;
  try {
    auto pl = ReadFile(fs::path(dir) / "placement.json");
    if (!pl.ok()) return pl.status();
    json top = json::parse(*pl);
    for (const auto& [var, sw] : top.at("placement").items()) {
      b.placement[var] = sw.get<std::string>();
    }
    b.groups = top.at("groups").get<std::vector<std::vector<std::string>>>();
    b.fields = top.at("fields").get<std::vector<std::string>>();
    b.objective = top.at("objective").get<double>();
    b.exact = top.at("exact").get<bool>();
    auto rt = ReadFile(fs::path(dir) / "routing.json");
    if (!rt.ok()) return rt.status();
    json routing = json::parse(*rt);
    for (const json& p : routing.at("paths")) {
      auto& [names, stops] = b.paths[{p.at("inport").get<int>(), p.at("outport").get<int>()}];
      names = p.at("switches").get<std::vector<std::string>>();
      for (const json& s : p.at("stops")) {
        stops.push_back({s.at("group").get<int>(), s.at("hop").get<int>()});
      }
    }
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(fs::path(dir) / "switch", ec)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    if (ec) return absl::NotFoundError(absl::StrCat("cannot list ", dir, "/switch"));
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      auto text = ReadFile(f);
      if (!text.ok()) return text.status();
      SwitchConfig c = SwitchFrom(json::parse(*text));
      std::string id = c.id;
      b.switches.emplace(id, std::move(c));
    }
    auto dot = ReadFile(fs::path(dir) / "xfdd.dot");
    if (dot.ok()) b.xfdd_dot = *dot;
  } catch (const json::exception& e) {
    return absl::DataLossError(absl::StrCat("malformed bundle: ", e.what()));
  } catch (const std::invalid_argument& e) {
    return absl::DataLossError(absl::StrCat("malformed bundle: ", e.what()));
  }
  return b;
}

absl::StatusOr<CompileResult> CompileProgram(const Program& prog, const Topology& topo,
                                             const CompileOptions& opts) {
  using Clock = std::chrono::steady_clock;
  CompileResult r;
  r.program = prog;
  auto lap = [t = Clock::now()]() mutable {
    auto now = Clock::now();
    double s = std::chrono::duration<double>(now - t).count();
    t = now;
    return s;
  };
  PolicyPtr full = prog.Full();
  r.deps = StDep(*full);
  OrderSpec ord = MakeOrderSpec(r.deps, prog.fields);
  r.times[0] = lap();
  r.manager = std::make_unique<Manager>(std::move(ord));
  try {
    r.root = Compile(*r.manager, *full);
  } catch (const CompileError& e) {
    return absl::InvalidArgumentError(e.what());
  } catch (const EvalError& e) {
    return absl::InvalidArgumentError(e.what());
  }
  r.times[1] = lap();
  auto demand = PacketStateMap(*r.manager, r.root, topo);
  if (!demand.ok()) return demand.status();
  r.demand = std::move(*demand);
  r.times[2] = lap();
  const OrderSpec& order = r.manager->order();
  std::optional<MilpModel> model;
  try {
    model = MilpModel::Build(topo, r.demand, order,
                             opts.solve.fixed ? MilpModel::Mode::kRouteOnly
                                              : MilpModel::Mode::kPlaceAndRoute,
                             opts.solve.fixed);
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
  r.times[3] = lap();
  auto sol = Solve(topo, r.demand, order, opts.solve, opts.parallel);
  if (!sol.ok()) return sol.status();
  r.solution = std::move(*sol);
  if (opts.check) {
    auto v = CheckSolution(*model, topo, r.solution.placement, r.solution.ToRouting());
    if (!v.empty()) {
      return absl::InternalError(
          absl::StrCat("solver output violates ", v.front().ToString()));
    }
  }
  r.times[4] = lap();
  try {
    r.bundle = GenerateRules(*r.manager, r.root, prog, topo, r.demand, r.solution);
  } catch (const CompileError& e) {
    return absl::InvalidArgumentError(e.what());
  }
  r.times[5] = lap();
  return r;
}

}  // namespace snapnet
