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

#include "snapnet/milp.h"

#include <set>
#include <string>

#include "gtest/gtest.h"
#include "harness.h"
#include "oracles.h"
#include "snapnet/corpus.h"
#include "snapnet/psm.h"
#include "snapnet/rulegen.h"

namespace snapnet {
namespace {

using ::snapnet::testing::ExampleTopology;
using ::snapnet::testing::LpCounts;
using ::snapnet::testing::ParseLp;
using ::snapnet::testing::RunningExample;
using ::snapnet::testing::WithEgress;

struct Built {
  CompileResult r;
  MilpModel model;
};

Built Build(const Program& prog, const Topology& topo,
            MilpModel::Mode mode = MilpModel::Mode::kPlaceAndRoute,
            const Placement* fixed = nullptr) {
  auto r = CompileProgram(prog, topo);
  EXPECT_TRUE(r.ok()) << r.status();
  MilpModel m = MilpModel::Build(topo, r->demand, r->manager->order(), mode, fixed);
  return {std::move(*r), std::move(m)};
}

std::set<std::string> RowFamilies(const MilpModel& m) {
  std::set<std::string> out;
  m.ForEachRow([&](const MilpModel::Row& r) { out.insert(r.name.substr(0, r.name.find('_'))); });
  return out;
}

TEST(MilpTest, StatelessModelIsMulticommodityFlow) {
  Built b = Build(WithEgress("assign_egress.snap"), ExampleTopology());
  EXPECT_EQ(RowFamilies(b.model), (std::set<std::string>{"cap", "cons", "once", "snk", "src"}));
  EXPECT_TRUE(b.model.vars().empty());
  LpCounts c;
  std::string err;
  ASSERT_TRUE(ParseLp(ExportLp(b.model), &c, &err)) << err;
  EXPECT_EQ(c.binaries, 0);
}

TEST(MilpTest, RunningExampleHasOrderRowsAndNoTiedRows) {
  Topology topo = ExampleTopology();
  Built b = Build(RunningExample(), topo);
  const MilpModel& m = b.model;
  EXPECT_TRUE(m.tied().empty());
  ASSERT_EQ(m.dep().size(), 3u);  // the chain and its transitive pair
  // One ordering row per (dep pair, flow needing both, switch), counted
  // from the packet-state map.
  int want = 0;
  for (auto [s, t] : m.dep()) {
    for (const auto& [uv, vars] : b.r.demand.flows) {
      if (topo.Demand(uv.first, uv.second) <= 0) continue;
      bool hs = std::find(vars.begin(), vars.end(), m.vars()[s]) != vars.end();
      bool ht = std::find(vars.begin(), vars.end(), m.vars()[t]) != vars.end();
      if (hs && ht) want += m.num_switches();
    }
  }
  int got = 0, tied = 0;
  m.ForEachRow([&](const MilpModel::Row& r) {
    if (r.name.rfind("order_", 0) == 0) ++got;
    if (r.name.rfind("tied_", 0) == 0) ++tied;
  });
  EXPECT_EQ(got, want);
  EXPECT_GT(got, 0);
  EXPECT_EQ(tied, 0);
}

TEST(MilpTest, TiedVariablesGetEqualityRows) {
  Built b = Build(WithEgress("honeypot.snap"), ExampleTopology());
  EXPECT_EQ(b.model.tied().size(), 1u);
  EXPECT_TRUE(RowFamilies(b.model).contains("tied"));
}

TEST(MilpTest, RouteOnlyModelHasNoBinaries) {
  Topology topo = ExampleTopology();
  Placement all_d4 = {{"orphan", "D4"}, {"susp-client", "D4"}, {"blacklist", "D4"}};
  Built b = Build(RunningExample(), topo, MilpModel::Mode::kRouteOnly, &all_d4);
  LpCounts c;
  std::string err;
  ASSERT_TRUE(ParseLp(ExportLp(b.model), &c, &err)) << err;
  EXPECT_EQ(c.binaries, 0);
  EXPECT_FALSE(RowFamilies(b.model).contains("place"));
}

TEST(MilpTest, UnknownPlacementTargetsThrow) {
  Topology topo = ExampleTopology();
  auto r = CompileProgram(RunningExample(), topo);
  ASSERT_TRUE(r.ok());
  Placement bad = {{"orphan", "Z9"}, {"susp-client", "D4"}, {"blacklist", "D4"}};
  EXPECT_THROW(MilpModel::Build(topo, r->demand, r->manager->order(),
                                MilpModel::Mode::kRouteOnly, &bad),
               std::invalid_argument);
}

TEST(MilpTest, EmptyModelExport) {
  Topology empty;
  StateDemand d;
  OrderSpec o;
  MilpModel m = MilpModel::Build(empty, d, o);
  std::string lp = ExportLp(m);
  EXPECT_EQ(lp.rfind("\\", 0), 0u);
  EXPECT_NE(lp.find("Minimize"), std::string::npos);
  EXPECT_EQ(lp.substr(lp.size() - 4), "End\n");
  LpCounts c;
  std::string err;
  ASSERT_TRUE(ParseLp(lp, &c, &err)) << err;
  EXPECT_EQ(c.rows, 0);
}

TEST(MilpTest, ExportParsesBackWithSameCounts) {
  Built b = Build(RunningExample(), ExampleTopology());
  const MilpModel& m = b.model;
  int rows = 0;
  std::set<std::string> cols;
  m.ForEachRow([&](const MilpModel::Row& r) {
    ++rows;
    for (const auto& [v, c] : r.terms) cols.insert(m.VarName(v));
  });
  std::map<std::string, double> obj;
  for (const auto& [v, c] : m.Objective()) {
    cols.insert(m.VarName(v));
    obj[m.VarName(v)] += c;
  }
  LpCounts c;
  std::string err;
  ASSERT_TRUE(ParseLp(ExportLp(m), &c, &err)) << err;
  EXPECT_EQ(c.rows, rows);
  EXPECT_EQ(c.columns, static_cast<int>(cols.size()));
  EXPECT_EQ(c.binaries, static_cast<int>(m.vars().size()) * m.num_switches());
  // Every physical arc of every flow is in the objective with d_uv / c_ij.
  ASSERT_EQ(c.objective.size(), obj.size());
  for (const auto& [name, coef] : obj) {
    ASSERT_TRUE(c.objective.contains(name)) << name;
    EXPECT_NEAR(c.objective[name], coef, 1e-11 * std::max(1.0, std::abs(coef))) << name;
  }
  int physical = 0;
  for (const auto& a : m.arcs()) physical += a.is_virtual ? 0 : 1;
  EXPECT_EQ(obj.size(), m.flows().size() * physical);
}

TEST(MilpTest, ExportIsDeterministic) {
  Built a = Build(RunningExample(), ExampleTopology());
  Built b = Build(RunningExample(), ExampleTopology());
  EXPECT_EQ(ExportLp(a.model), ExportLp(b.model));
}

TEST(MilpTest, SolverOutputPassesTheChecker) {
  Topology topo = ExampleTopology();
  for (const std::string& name : CatalogPolicies()) {
    Built b = Build(WithEgress(name), topo);
    auto v = CheckSolution(b.model, topo, b.r.solution.placement, b.r.solution.ToRouting());
    EXPECT_TRUE(v.empty()) << name << ": " << v.front().ToString();
    MilpModel::Assignment x = ToAssignment(b.model, topo, b.r.solution.placement,
                                           b.r.solution.ToRouting());
    EXPECT_NEAR(b.model.ObjectiveValue(x), b.r.solution.objective, 1e-9) << name;
  }
}

TEST(MilpTest, EachStateRowFamilyCatchesItsViolation) {
  auto cases = ::snapnet::testing::StateRowViolationCases();
  ASSERT_EQ(cases.size(), 7u);
  for (const auto& c : cases) {
    EXPECT_TRUE(c.Flagged()) << c.family << " (" << c.how << ") flagged "
                             << c.violations.size() << " rows";
  }
}

TEST(MilpTest, ViolationText) {
  MilpModel::Violation v{"cap_C1_C5", 12.5, '<', 10};
  EXPECT_EQ(v.ToString(), "cap_C1_C5: lhs 12.5 <= 10");
}

}  // namespace
}  // namespace snapnet
