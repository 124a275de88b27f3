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

#include "snapnet/interp.h"

#include <limits>
#include <random>
#include <string>

#include "gtest/gtest.h"
#include "oracles.h"
#include "snapnet/corpus.h"
#include "snapnet/parser.h"

namespace snapnet {
namespace {

using ::snapnet::testing::OracleEval;
using ::snapnet::testing::OracleResult;

Program Decls() {
  auto p = Parse("field f, g; state s[1] default 0; state t[1] default 0; id");
  EXPECT_TRUE(p.ok());
  return *p;
}

Expr Lit(int64_t v) { return Expr::Lit(Value::Int(v)); }

TEST(InterpTest, EvalExpr) {
  Program d = Decls();
  Packet pkt = MakePacket(d, {{"srcip", Value::Ip(0x0a000101)},
                              {"dstip", Value::Ip(0x0a000606)}});
  EXPECT_EQ(EvalExpr(Lit(5), pkt), Value::Int(5));
  EXPECT_EQ(EvalExpr(Expr::Field("srcip"), pkt), Value::Ip(0x0a000101));
  EXPECT_EQ(EvalExpr(Expr::Tuple({Expr::Field("srcip"), Expr::Field("dstip")}), pkt),
            Value::Tuple({Value::Ip(0x0a000101), Value::Ip(0x0a000606)}));
}

TEST(InterpTest, IdentityKeepsEverything) {
  Program d = Decls();
  Store m(d);
  Packet pkt = MakePacket(d, {{"f", Value::Int(1)}});
  auto r = Eval(*Id(), m, pkt);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->store, m);
  EXPECT_EQ(r->packets, std::set<Packet>{pkt});
  EXPECT_TRUE(r->log.empty());
}

TEST(InterpTest, ParallelWritesToOneVariableAreUndefined) {
  Program d = Decls();
  auto r = Eval(*Par(StateSet("s", Lit(0), Lit(1)), StateSet("s", Lit(0), Lit(2))),
                Store(d), MakePacket(d, {}));
  EXPECT_FALSE(r.has_value());
}

TEST(InterpTest, ParallelWritesToDistinctVariablesMerge) {
  Program d = Decls();
  auto r = Eval(*Par(StateSet("s", Lit(0), Lit(1)), StateSet("t", Lit(0), Lit(2))),
                Store(d), MakePacket(d, {}));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->store.table("s").Get(Value::Int(0)), Value::Int(1));
  EXPECT_EQ(r->store.table("t").Get(Value::Int(0)), Value::Int(2));
  EXPECT_EQ(r->packets.size(), 1u);
}

TEST(InterpTest, FanOutThenStateWriteIsUndefined) {
  Program d = Decls();
  PolicyPtr p = Par(Mod("f", Value::Int(1)), Mod("f", Value::Int(2)));
  auto r = Eval(*Seq(p, StateSet("s", Lit(0), Expr::Field("f"))), Store(d),
                MakePacket(d, {}));
  EXPECT_FALSE(r.has_value());
}

TEST(InterpTest, FanOutThenFieldWriteGivesTwoPackets) {
  Program d = Decls();
  PolicyPtr p = Par(Mod("f", Value::Int(1)), Mod("f", Value::Int(2)));
  auto r = Eval(*Seq(p, Mod("g", Value::Int(3))), Store(d), MakePacket(d, {}));
  ASSERT_TRUE(r.has_value());
  ASSERT_EQ(r->packets.size(), 2u);
  for (const Packet& q : r->packets) EXPECT_EQ(q.Get("g"), Value::Int(3));
}

TEST(InterpTest, SequenceThreadsStoreAndPacket) {
  Program d = Decls();
  PolicyPtr p = Seq(Seq(Mod("f", Value::Int(2)), StateSet("s", Lit(0), Expr::Field("f"))),
                    StateTest("s", Lit(0), Lit(2)));
  auto r = Eval(*p, Store(d), MakePacket(d, {}));
  ASSERT_TRUE(r.has_value());
  ASSERT_EQ(r->packets.size(), 1u);
  EXPECT_EQ(r->packets.begin()->Get("f"), Value::Int(2));
  EXPECT_EQ(r->log, (Log{{true, "s"}, {false, "s"}}));
}

TEST(InterpTest, IncrementOverflowIsAnError) {
  Program d = Decls();
  Store m(d);
  m.mutable_table("s").Set(Value::Int(0), Value::Int(std::numeric_limits<int64_t>::max()));
  EXPECT_THROW(Eval(*Incr("s", Lit(0)), m, MakePacket(d, {})), EvalError);
  EXPECT_THROW(AddInt(Value::Bool(true), 1), EvalError);
  EXPECT_EQ(AddInt(Value::Int(4), -1), Value::Int(3));
}

TEST(InterpTest, Consistency) {
  LogEntry ws{true, "s"}, rs{false, "s"}, rt{false, "t"};
  EXPECT_TRUE(Consistent({}, {}));
  EXPECT_FALSE(Consistent({ws}, {rs}));
  EXPECT_FALSE(Consistent({rs}, {ws}));
  EXPECT_TRUE(Consistent({ws}, {rt}));
  EXPECT_TRUE(Consistent({rs}, {rs}));
}

TEST(InterpTest, MergeTakesFirstChange) {
  Program d = Decls();
  Store m(d);
  EXPECT_EQ(Merge(m, {&m, &m}), m);
  Store m1 = m, m2 = m;
  m1.mutable_table("s").Set(Value::Int(0), Value::Int(1));
  m2.mutable_table("t").Set(Value::Int(0), Value::Int(2));
  Store want = m;
  want.mutable_table("s").Set(Value::Int(0), Value::Int(1));
  want.mutable_table("t").Set(Value::Int(0), Value::Int(2));
  EXPECT_EQ(Merge(m, {&m1, &m2}), want);
}

TEST(InterpTest, MergeIsRightNested) {
  Program d = Decls();
  std::mt19937_64 rng(3);
  auto random_store = [&](const Store& base) {
    Store s = base;
    for (const char* v : {"s", "t"}) {
      if (rng() % 2) s.mutable_table(v).Set(Value::Int(0), Value::Int(rng() % 3));
    }
    return s;
  };
  Store m(d);
  for (int i = 0; i < 200; ++i) {
    Store a = random_store(m), b = random_store(m), c = random_store(m);
    Store inner = Merge(m, {&b, &c});
    EXPECT_EQ(Merge(m, {&a, &b, &c}), Merge(m, {&a, &inner}));
  }
}

OracleResult Outcome(const Policy& p, const Store& st, const Packet& pkt) {
  try {
    return ::snapnet::testing::ToOracle(Eval(p, st, pkt));
  } catch (const EvalError&) {
    OracleResult r;
    r.kind = OracleResult::kError;
    return r;
  }
}

bool Same(const OracleResult& a, const OracleResult& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != OracleResult::kOk) return true;
  return a.cells == b.cells && a.packets == b.packets && a.log == b.log;
}

// The corpus policies evaluated on generated traffic: stores are whatever
// the preceding packets left behind.
TEST(InterpTest, CorpusAgreesWithSecondEvaluator) {
  int checked = 0;
  for (const std::string& name : CatalogPolicies()) {
    auto prog = LoadProgram(CorpusPath(name));
    ASSERT_TRUE(prog.ok()) << prog.status();
    PolicyPtr p = prog->Full();
    PacketGenerator gen(*prog, {1, 2, 3, 4, 5, 6}, 17);
    Store st(*prog);
    for (int i = 0; i < 50; ++i, ++checked) {
      Packet pkt = gen.Next().second;
      OracleResult want = OracleEval(*prog, *p, st, pkt);
      ASSERT_TRUE(Same(Outcome(*p, st, pkt), want)) << name << " " << pkt.ToString();
      auto r = Eval(*p, st, pkt);
      if (r) st = r->store;
    }
  }
  EXPECT_EQ(checked, 1000);
}

TEST(InterpTest, RandomPoliciesAgreeWithSecondEvaluator) {
  ::snapnet::testing::SmallUniverse u;
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    PolicyPtr p = ::snapnet::testing::RandomPolicy(rng, 3);
    for (int k = 0; k < 10; ++k) {
      const Store& st = u.stores[rng() % u.stores.size()];
      const Packet& pkt = u.packets[rng() % u.packets.size()];
      ASSERT_TRUE(Same(Outcome(*p, st, pkt), OracleEval(u.prog, *p, st, pkt)))
          << Pretty(*p);
    }
  }
}

}  // namespace
}  // namespace snapnet
