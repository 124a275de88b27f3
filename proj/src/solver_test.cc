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

#include "snapnet/solver.h"

#include <limits>
#include <random>
#include <string>

#include "gtest/gtest.h"
#include "harness.h"
#include "snapnet/corpus.h"
#include "snapnet/psm.h"
#include "snapnet/rulegen.h"

namespace snapnet {
namespace {

using ::snapnet::testing::ExampleTopology;
using ::snapnet::testing::RunningExample;
using ::snapnet::testing::WithEgress;

constexpr double kTol = 1e-9;

struct Front {
  std::unique_ptr<Manager> m;
  StateDemand demand;
};

Front FrontOf(const Program& prog, const Topology& topo) {
  Front f;
  f.m = std::make_unique<Manager>(MakeOrderSpec(StDep(*prog.Full()), prog.fields));
  NodeId root = Compile(*f.m, *prog.Full());
  auto d = PacketStateMap(*f.m, root, topo);
  EXPECT_TRUE(d.ok()) << d.status();
  f.demand = *d;
  return f;
}

TEST(SolverTest, SingleSwitchTakesEverything) {
  auto topo = ParseTopology(R"({"nodes": [{"id": "S", "external_ports": [1, 2]}]})");
  ASSERT_TRUE(topo.ok()) << topo.status();
  Program prog = WithEgress("dns_tunnel.snap");
  Front f = FrontOf(prog, *topo);
  auto sol = Solve(*topo, f.demand, f.m->order(), {});
  ASSERT_TRUE(sol.ok()) << sol.status();
  for (const auto& [var, sw] : sol->placement) EXPECT_EQ(sw, "S") << var;
  EXPECT_EQ(sol->placement.size(), 3u);
  EXPECT_DOUBLE_EQ(sol->objective, 0);
}

TEST(SolverTest, RunningExamplePlacesEverythingOnD4) {
  Topology topo = ExampleTopology();
  Front f = FrontOf(RunningExample(), topo);
  auto sol = Solve(topo, f.demand, f.m->order(), {});
  ASSERT_TRUE(sol.ok()) << sol.status();
  EXPECT_TRUE(sol->exact);
  for (const char* v : {"orphan", "susp-client", "blacklist"}) {
    EXPECT_EQ(sol->placement.at(v), "D4") << v;
  }
  int d4 = topo.NodeIndex("D4");
  for (const auto& [uv, r] : sol->routes) {
    if (uv.second != 6) continue;
    EXPECT_NE(std::find(r.nodes.begin(), r.nodes.end(), d4), r.nodes.end());
  }
  // I1 reaches D4 through C1 and C5.
  std::vector<std::string> ids;
  for (int n : sol->routes.at({1, 6}).nodes) ids.push_back(topo.nodes[n].id);
  EXPECT_EQ(ids, (std::vector<std::string>{"I1", "C1", "C5", "D4"}));
}

// Every assignment of the three groups to the twelve switches, routed by
// the same subroutine: none beats the search result.
TEST(SolverTest, ExhaustiveEnumerationAgrees) {
  Topology topo = ExampleTopology();
  Front f = FrontOf(RunningExample(), topo);
  PlacementProblem p(topo, f.demand, f.m->order());
  ASSERT_EQ(p.num_groups(), 3);
  int n = static_cast<int>(topo.nodes.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> arg;
  int feasible = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        auto r = p.Route({a, b, c}, 1.0);
        if (!r) continue;
        ++feasible;
        if (r->objective < best - kTol) {
          best = r->objective;
          arg = {a, b, c};
        }
      }
    }
  }
  auto sol = SolveSerial(p, {});
  ASSERT_TRUE(sol.ok());
  EXPECT_GT(feasible, 0);
  EXPECT_NEAR(sol->objective, best, kTol);
  int d4 = topo.NodeIndex("D4");
  EXPECT_EQ(arg, (std::vector<int>{d4, d4, d4}));
}

TEST(SolverTest, LowerBoundNeverExceedsRoutedCost) {
  Topology topo = ExampleTopology();
  Front f = FrontOf(RunningExample(), topo);
  PlacementProblem p(topo, f.demand, f.m->order());
  std::mt19937_64 rng(4);
  int n = static_cast<int>(topo.nodes.size());
  for (int i = 0; i < 300; ++i) {
    std::vector<int> owner(3);
    for (int& o : owner) o = static_cast<int>(rng() % n);
    auto r = p.Route(owner, 1.0);
    if (!r) continue;
    EXPECT_LE(p.LowerBound(owner), r->objective + kTol);
    std::vector<int> partial = owner;
    partial[rng() % 3] = -1;
    EXPECT_LE(p.LowerBound(partial), p.LowerBound(owner) + kTol);
  }
}

TEST(SolverTest, ParallelSearchMatchesSerial) {
  Topology topo = ExampleTopology();
  for (const char* name : {"dns_tunnel.snap", "sampling.snap", "elephant_flow.snap",
                           "conn_affinity.snap", "honeypot.snap"}) {
    Front f = FrontOf(WithEgress(name), topo);
    PlacementProblem p(topo, f.demand, f.m->order());
    auto s = SolveSerial(p, {});
    auto q = SolveParallel(p, {});
    ASSERT_TRUE(s.ok() && q.ok()) << name;
    EXPECT_EQ(s->placement, q->placement) << name;
    EXPECT_NEAR(s->objective, q->objective, kTol) << name;
    EXPECT_EQ(s->exact, q->exact) << name;
  }
}

TEST(SolverTest, RoutesVisitOwnersInOrder) {
  Topology topo = ExampleTopology();
  Front f = FrontOf(WithEgress("sampling.snap"), topo);
  auto sol = Solve(topo, f.demand, f.m->order(), {});
  ASSERT_TRUE(sol.ok());
  const OrderSpec& o = f.m->order();
  for (const auto& [uv, r] : sol->routes) {
    ASSERT_FALSE(r.nodes.empty());
    EXPECT_EQ(r.nodes.front(), topo.SwitchOfPort(uv.first));
    EXPECT_EQ(r.nodes.back(), topo.SwitchOfPort(uv.second));
    for (size_t k = 0; k + 1 < r.nodes.size(); ++k) {
      EXPECT_GE(topo.LinkIndex(r.nodes[k], r.nodes[k + 1]), 0);
    }
    int last_group = -1, last_hop = 0;
    for (auto [g, hop] : r.stops) {
      EXPECT_GT(g, last_group);
      EXPECT_GE(hop, last_hop);
      const std::string& owner = sol->placement.at(o.groups[g].front());
      EXPECT_EQ(topo.nodes[r.nodes[hop]].id, owner);
      last_group = g;
      last_hop = hop;
    }
  }
}

TEST(SolverTest, FixedPlacementIsKept) {
  Topology topo = ExampleTopology();
  Front f = FrontOf(RunningExample(), topo);
  Placement fixed = {{"orphan", "C6"}, {"susp-client", "C6"}, {"blacklist", "C6"}};
  SolveOptions opts;
  opts.fixed = &fixed;
  auto sol = Solve(topo, f.demand, f.m->order(), opts);
  ASSERT_TRUE(sol.ok()) << sol.status();
  EXPECT_EQ(sol->placement, fixed);
  auto best = Solve(topo, f.demand, f.m->order(), {});
  ASSERT_TRUE(best.ok());
  EXPECT_GE(sol->objective, best->objective - kTol);
}

TEST(SolverTest, NodeBudgetGivesHeuristicAnswer) {
  Topology topo = GenerateTopology(30, 0.7, 3);
  Front f = FrontOf(RunningExample(), topo);
  SolveOptions opts;
  opts.node_limit = 50;
  auto sol = Solve(topo, f.demand, f.m->order(), opts);
  ASSERT_TRUE(sol.ok()) << sol.status();
  EXPECT_FALSE(sol->exact);
  EXPECT_LE(sol->nodes_explored, 51);
}

TEST(SolverTest, OverloadedNetworkIsInfeasible) {
  auto topo = ParseTopology(R"({
    "nodes": [{"id": "A", "external_ports": [1]}, {"id": "B", "external_ports": [2]}],
    "links": [{"from": "A", "to": "B", "capacity": 0.5}]})");
  ASSERT_TRUE(topo.ok());
  Front f = FrontOf(WithEgress("assign_egress.snap"), *topo);
  auto sol = Solve(*topo, f.demand, f.m->order(), {});
  EXPECT_EQ(sol.status().code(), absl::StatusCode::kFailedPrecondition);
}

}  // namespace
}  // namespace snapnet
