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

#include <string>

#include "gtest/gtest.h"
#include "harness.h"
#include "snapnet/corpus.h"
#include "snapnet/parser.h"

namespace snapnet {
namespace {

using ::snapnet::testing::ExampleTopology;
using ::snapnet::testing::WithEgress;

StateDemand MapOf(const Program& prog, const Topology& topo, NodeId* root = nullptr,
                  std::unique_ptr<Manager>* keep = nullptr) {
  auto m = std::make_unique<Manager>(MakeOrderSpec(StDep(*prog.Full()), prog.fields));
  NodeId r = Compile(*m, *prog.Full());
  auto d = PacketStateMap(*m, r, topo);
  EXPECT_TRUE(d.ok()) << d.status();
  if (root) *root = r;
  if (keep) *keep = std::move(m);
  return d.ok() ? *d : StateDemand{};
}

TEST(PsmTest, StatelessProgramNeedsNothing) {
  Topology topo = ExampleTopology();
  StateDemand d = MapOf(WithEgress("assign_egress.snap"), topo);
  EXPECT_EQ(d.flows.size(), 36u);
  for (const auto& [uv, vars] : d.flows) EXPECT_TRUE(vars.empty());
}

TEST(PsmTest, TrafficToTheServerSubnetNeedsAllThree) {
  Topology topo = ExampleTopology();
  StateDemand d = MapOf(WithEgress("dns_tunnel.snap"), topo);
  for (int u = 1; u <= 6; ++u) {
    EXPECT_EQ(d.Of(u, 6),
              (std::vector<std::string>{"orphan", "susp-client", "blacklist"}));
  }
}

TEST(PsmTest, AssumptionShrinksOtherIngresses) {
  Topology topo = ExampleTopology();
  auto assume = LoadProgram(CorpusPath("assumption.snap"));
  ASSERT_TRUE(assume.ok());
  Program plain = WithEgress("dns_tunnel.snap");
  auto with = ComposeSeq(*assume, plain);
  ASSERT_TRUE(with.ok());
  StateDemand before = MapOf(plain, topo);
  StateDemand after = MapOf(*with, topo);
  for (int u = 1; u <= 5; ++u) {
    for (int v = 1; v <= 5; ++v) {
      EXPECT_FALSE(before.Of(u, v).empty());
      EXPECT_TRUE(after.Of(u, v).empty()) << u << "->" << v;
    }
    EXPECT_TRUE(after.Needs(u, 6, "blacklist"));
  }
  EXPECT_TRUE(after.Needs(6, 1, "orphan"));
  EXPECT_FALSE(after.Needs(6, 1, "blacklist"));
}

TEST(PsmTest, JsonLines) {
  Topology topo = ExampleTopology();
  StateDemand d = MapOf(WithEgress("dns_tunnel.snap"), topo);
  std::string text = d.ToJsonLines();
  EXPECT_NE(text.find("{\"states\":[\"orphan\",\"susp-client\",\"blacklist\"],\"u\":1,\"v\":6}"),
            std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 36);
}

// The map must cover every variable a packet actually touches between its
// ingress and each port it leaves from.
TEST(PsmTest, CoversObservedAccesses) {
  Topology topo = ExampleTopology();
  std::vector<int> ports = topo.Ports();
  for (const std::string& name : CatalogPolicies()) {
    Program prog = WithEgress(name);
    StateDemand d = MapOf(prog, topo);
    PacketGenerator gen(prog, ports, 8);
    Store st(prog);
    PolicyPtr full = prog.Full();
    for (int i = 0; i < 300; ++i) {
      auto [port, pkt] = gen.Next();
      auto r = Eval(*full, st, pkt);
      if (!r) continue;
      st = r->store;
      for (const Packet& out : r->packets) {
        if (!out.Get("outport").is_int()) continue;
        int v = static_cast<int>(out.Get("outport").as_int());
        if (topo.SwitchOfPort(v) < 0) continue;
        for (const LogEntry& e : r->log) {
          ASSERT_TRUE(d.Needs(port, v, e.var)) << name << " " << e.var << " " << port
                                               << "->" << v;
        }
      }
    }
  }
}

}  // namespace
}  // namespace snapnet
