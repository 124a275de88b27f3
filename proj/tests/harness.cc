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

#include "harness.h"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "absl/strings/str_cat.h"
#include "snapnet/corpus.h"
#include "snapnet/interp.h"
#include "snapnet/simnet.h"
#include "snapnet/topology.h"

namespace snapnet::testing {

DiffOutcome Differential(const Program& prog, const Topology& topo,
                         const DeploymentBundle& bundle, int n, uint64_t seed) {
  DiffOutcome out;
  auto net = SimNetwork::Load(bundle, topo);
  if (!net.ok()) {
    out.mismatch = std::string(net.status().message());
    return out;
  }
  net->set_tracing(false);
  Store oracle(prog);
  PacketGenerator gen(prog, topo.Ports(), seed);
  PolicyPtr full = prog.Full();
  for (int i = 0; i < n; ++i) {
    auto [port, pkt] = gen.Next();
    std::optional<EvalResult> want;
    try {
      want = Eval(*full, oracle, pkt);
    } catch (const EvalError& e) {
      out.mismatch = absl::StrCat("oracle failed on packet ", i, ": ", e.what());
      return out;
    }
    if (!want) {
      out.mismatch = absl::StrCat("oracle undefined on packet ", i);
      return out;
    }
    if (!(want->store == oracle)) ++out.state_writes;
    oracle = want->store;
    std::vector<Emission> expected;
    for (const Packet& p : want->packets) {
      const Value& v = p.Get("outport");
      if (v.is_int() && topo.SwitchOfPort(static_cast<int>(v.as_int())) >= 0) {
        expected.push_back({static_cast<int>(v.as_int()), p});
      }
    }
    auto got = net->Inject(port, pkt);
    if (!got.ok()) {
      out.mismatch = absl::StrCat("packet ", i, " ", pkt.ToString(), ": ",
                                  std::string(got.status().message()));
      return out;
    }
    std::vector<Emission> actual = got->emitted;
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    if (expected != actual) {
      out.mismatch = absl::StrCat("packet ", i, " ", pkt.ToString(), " at port ", port,
                                  ": expected ", expected.size(), " emissions, got ",
                                  actual.size());
      return out;
    }
    out.emitted += static_cast<int>(actual.size());
    ++out.packets;
  }
  Store got = net->CombinedStore(prog);
  if (!(got == oracle)) {
    out.mismatch = absl::StrCat("final state differs: network ", got.ToString(),
                                " oracle ", oracle.ToString());
  }
  return out;
}

Topology ExampleTopology() {
  auto t = LoadTopology(CorpusPath("example.json"));
  if (!t.ok()) throw std::runtime_error(std::string(t.status().message()));
  return *t;
}

Program WithEgress(const std::string& name) {
  auto p = LoadProgram(CorpusPath(name));
  auto e = LoadProgram(CorpusPath("assign_egress.snap"));
  if (!p.ok()) throw std::runtime_error(std::string(p.status().message()));
  if (!e.ok()) throw std::runtime_error(std::string(e.status().message()));
  auto c = ComposeSeq(*p, *e);
  if (!c.ok()) throw std::runtime_error(std::string(c.status().message()));
  return *c;
}

Program RunningExample() {
  auto a = LoadProgram(CorpusPath("assumption.snap"));
  if (!a.ok()) throw std::runtime_error(std::string(a.status().message()));
  auto c = ComposeSeq(*a, WithEgress("dns_tunnel.snap"));
  if (!c.ok()) throw std::runtime_error(std::string(c.status().message()));
  return *c;
}

bool RowViolationCase::Flagged() const {
  for (const MilpModel::Violation& v : violations) {
    if (v.row.rfind(family + "_", 0) == 0) return true;
  }
  return false;
}

namespace {

struct Instance {
  CompileResult r;
  MilpModel model;
  Routing routing;
};

Instance Solved(const Program& prog, const Topology& topo) {
  auto r = CompileProgram(prog, topo);
  if (!r.ok()) throw std::runtime_error(std::string(r.status().message()));
  MilpModel m = MilpModel::Build(topo, r->demand, r->manager->order());
  Routing rt = r->solution.ToRouting();
  return {std::move(*r), std::move(m), std::move(rt)};
}

// First flow (in model order) that needs `var` and leaves from `v`, or any
// port when v < 0.
int FlowNeeding(const MilpModel& m, const std::string& var, int v = -1) {
  int s = m.VarIndex(var);
  for (size_t fi = 0; fi < m.flows().size(); ++fi) {
    const auto& f = m.flows()[fi];
    if ((v < 0 || f.v == v) && f.u != f.v &&
        std::find(f.vars.begin(), f.vars.end(), s) != f.vars.end()) {
      return static_cast<int>(fi);
    }
  }
  throw std::runtime_error("no flow needs " + var);
}

}  // namespace

std::vector<RowViolationCase> StateRowViolationCases() {
  Topology topo = ExampleTopology();
  Instance dns = Solved(RunningExample(), topo);
  const MilpModel& m = dns.model;
  const Placement& pl = dns.r.solution.placement;
  const size_t arcs = m.arcs().size();
  const size_t flows = m.flows().size();
  const int sw = m.num_switches();
  const int orphan = m.VarIndex("orphan");
  auto ps = [&](MilpModel::Assignment& x, int s, int f, int a) -> double& {
    return x.ps[(s * flows + f) * arcs + a];
  };
  auto path_of = [&](int f) {
    return dns.routing.at({m.flows()[f].u, m.flows()[f].v}).front().nodes;
  };
  std::vector<RowViolationCase> out;

  {
    MilpModel::Assignment x = ToAssignment(m, topo, pl, dns.routing);
    x.p[orphan * sw + topo.NodeIndex(pl.at("orphan"))] = 0;
    out.push_back({"place", "orphan placed nowhere", CheckAssignment(m, x)});
  }
  {
    // Move orphan to a switch that some flow needing it never visits.
    int f = FlowNeeding(m, "orphan", 6);
    std::vector<int> path = path_of(f);
    int off = 0;
    while (std::find(path.begin(), path.end(), off) != path.end()) ++off;
    Placement moved = pl;
    moved["orphan"] = topo.nodes[off].id;
    out.push_back({"visit", "orphan moved off the path of a flow needing it",
                   CheckSolution(m, topo, moved, dns.routing)});
  }
  {
    Instance hp = Solved(WithEgress("honeypot.snap"), topo);
    Placement split = hp.r.solution.placement;
    const std::string& where = split.at("hon-ip");
    split["hon-dstport"] = topo.nodes[topo.NodeIndex(where) == 0 ? 1 : 0].id;
    out.push_back({"tied", "tied honeypot tables on different switches",
                   CheckSolution(hp.model, topo, split, hp.routing)});
  }
  {
    MilpModel::Assignment x = ToAssignment(m, topo, pl, dns.routing);
    int f = FlowNeeding(m, "orphan");
    int a = 0;
    while (x.r[f * arcs + a] > 0 || m.arcs()[a].is_virtual) ++a;
    ps(x, orphan, f, a) = 1;
    out.push_back({"pass", "orphan carried on a link the flow does not use",
                   CheckAssignment(m, x)});
  }
  {
    // Flow 6 -> 1 starts at the owner; drop orphan from its first link.
    MilpModel::Assignment x = ToAssignment(m, topo, pl, dns.routing);
    int f = FlowNeeding(m, "orphan");
    for (size_t fi = 0; fi < flows; ++fi) {
      if (m.flows()[fi].u == 6 && m.flows()[fi].v == 1) f = static_cast<int>(fi);
    }
    std::vector<int> path = path_of(f);
    ps(x, orphan, f, m.ArcIndex(path[0], path[1])) = 0;
    out.push_back({"pcons", "orphan flow broken after its owner", CheckAssignment(m, x)});
  }
  {
    MilpModel::Assignment x = ToAssignment(m, topo, pl, dns.routing);
    int f = FlowNeeding(m, "orphan", 6);
    int vn = m.PortNode(m.flows()[f].v);
    for (size_t a = 0; a < arcs; ++a) {
      if (m.arcs()[a].to == vn) ps(x, orphan, f, static_cast<int>(a)) = 0;
    }
    out.push_back({"sink", "orphan flow does not reach the egress", CheckAssignment(m, x)});
  }
  {
    // susp-client ahead of orphan on a path that needs both.
    int f = FlowNeeding(m, "susp-client", 6);
    std::vector<int> path = path_of(f);
    Placement swapped = pl;
    swapped["susp-client"] = topo.nodes[path[path.size() / 2 - 1]].id;
    out.push_back({"order", "susp-client visited before orphan",
                   CheckSolution(m, topo, swapped, dns.routing)});
  }
  return out;
}

Topology RaceTopology() {
  auto t = ParseTopology(R"({
    "nodes": [{"id": "I1", "external_ports": [1]},
              {"id": "D1", "external_ports": [3]},
              {"id": "D2", "external_ports": [4]},
              {"id": "X"}, {"id": "A"}, {"id": "B"}, {"id": "Y"}],
    "links": [{"from": "I1", "to": "X", "capacity": 10},
              {"from": "X", "to": "A", "capacity": 1},
              {"from": "X", "to": "B", "capacity": 1},
              {"from": "A", "to": "Y", "capacity": 1},
              {"from": "B", "to": "Y", "capacity": 1},
              {"from": "Y", "to": "D1", "capacity": 10},
              {"from": "Y", "to": "D2", "capacity": 10}],
    "demands": [{"u": 1, "v": 3, "volume": 1}, {"u": 1, "v": 4, "volume": 1}]})");
  if (!t.ok()) throw std::runtime_error(std::string(t.status().message()));
  return *t;
}

RaceScenario HoneypotRace(const Program& prog, uint64_t seed) {
  RaceScenario s;
  s.seed = seed;
  s.var_a = "hon-ip";
  s.field_a = "srcip";
  s.var_b = "hon-dstport";
  s.field_b = "dstport";
  s.index = Value::Int(1);
  auto pkt = [&](uint32_t src, uint32_t dst, int dport, int out) {
    return MakePacket(prog, {{"srcip", Value::Ip(src)},
                             {"dstip", Value::Ip(dst)},
                             {"dstport", Value::Int(dport)},
                             {"inport", Value::Int(1)},
                             {"outport", Value::Int(out)}});
  };
  s.packets.emplace_back(1, pkt(0x0a000101, 0x0a000301, 80, 3), 0);
  s.packets.emplace_back(1, pkt(0x0a000102, 0x0a000302, 22, 4), 0);
  return s;
}

absl::StatusOr<int> CountTornSchedules(const Program& prog, const Placement* fixed,
                                       int schedules) {
  Topology topo = RaceTopology();
  CompileOptions opts;
  opts.solve.fixed = fixed;
  auto r = CompileProgram(prog, topo, opts);
  if (!r.ok()) return r.status();
  auto net = SimNetwork::Load(r->bundle, topo);
  if (!net.ok()) return net.status();
  int torn = 0;
  for (int seed = 0; seed < schedules; ++seed) {
    auto obs = RaceProbe(*net, prog, HoneypotRace(prog, seed));
    if (!obs.ok()) return obs.status();
    if (!obs->consistent) ++torn;
  }
  return torn;
}

}  // namespace snapnet::testing
