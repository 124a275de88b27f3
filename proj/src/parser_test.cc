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

#include "snapnet/parser.h"

#include <random>
#include <string>

#include "gtest/gtest.h"
#include "oracles.h"
#include "snapnet/corpus.h"

namespace snapnet {
namespace {

Program MustParse(const std::string& text) {
  auto p = Parse(text);
  EXPECT_TRUE(p.ok()) << p.status();
  return p.ok() ? *p : Program{};
}

TEST(ParserTest, IdentityProgram) {
  Program p = MustParse("id");
  EXPECT_EQ(p.body->kind, PolicyKind::kId);
  EXPECT_EQ(p.assumption, nullptr);
  EXPECT_EQ(p.fields, DefaultFields());
}

TEST(ParserTest, DnsTunnelTopIsIfOnSubnetAndPort) {
  auto prog = LoadProgram(CorpusPath("dns_tunnel.snap"));
  ASSERT_TRUE(prog.ok()) << prog.status();
  const Policy& top = *prog->body;
  ASSERT_EQ(top.kind, PolicyKind::kIf);
  PolicyPtr want = And(snapnet::Test("dstip", Value::MakePrefix(0x0a000600, 24)),
                       snapnet::Test("srcport", Value::Int(53)));
  EXPECT_TRUE(Equal(*top.a, *want)) << Pretty(*top.a);
  EXPECT_EQ(prog->states.size(), 3u);
  EXPECT_EQ(prog->FindState("orphan")->arity, 2);
}

TEST(ParserTest, ConflictingWritesStillParse) {
  Program p = MustParse("state s[1] default 0; s[0] <- 1 + s[0] <- 2");
  PolicyPtr want = Par(StateSet("s", Expr::Lit(Value::Int(0)), Expr::Lit(Value::Int(1))),
                       StateSet("s", Expr::Lit(Value::Int(0)), Expr::Lit(Value::Int(2))));
  EXPECT_TRUE(Equal(*p.body, *want));
}

TEST(ParserTest, PrecedenceOfOperators) {
  Program p = MustParse("field f, g; f = 1; g <- 2 + !f = 1 & g = 1 | g = 2");
  ASSERT_EQ(p.body->kind, PolicyKind::kPar);
  EXPECT_EQ(p.body->a->kind, PolicyKind::kSeq);
  const Policy& rhs = *p.body->b;
  ASSERT_EQ(rhs.kind, PolicyKind::kOr);
  ASSERT_EQ(rhs.a->kind, PolicyKind::kAnd);
  EXPECT_EQ(rhs.a->a->kind, PolicyKind::kNeg);
}

TEST(ParserTest, ElseBranchStopsAtPlus) {
  Program p = MustParse("field f; if f = 1 then id else drop + f <- 2");
  EXPECT_EQ(p.body->kind, PolicyKind::kPar);
  EXPECT_EQ(p.body->a->kind, PolicyKind::kIf);
}

TEST(ParserTest, MultiIndexAndBareStateTest) {
  Program p = MustParse("state o[2] default False; o[srcip][dstip]");
  ASSERT_EQ(p.body->kind, PolicyKind::kStateTest);
  EXPECT_TRUE(p.body->index.is_tuple());
  EXPECT_EQ(p.body->rhs.lit, Value::Bool(true));
}

TEST(ParserTest, ConstsAndDefsExpand) {
  Program p = MustParse(
      "const limit = 3; state c[1] default 0; def bump { c[srcip]++ }"
      " if c[srcip] = limit then drop else bump");
  ASSERT_EQ(p.body->kind, PolicyKind::kIf);
  EXPECT_EQ(p.body->a->rhs.lit, Value::Int(3));
  EXPECT_EQ(p.body->c->kind, PolicyKind::kIncr);
}

TEST(ParserTest, AssumeBlock) {
  Program p = MustParse("assume { inport = 1 } id");
  ASSERT_NE(p.assumption, nullptr);
  EXPECT_EQ(p.Full()->kind, PolicyKind::kSeq);
}

struct BadInput {
  const char* text;
  const char* where;
  const char* message;
};

TEST(ParserTest, ErrorsCarryPositions) {
  const BadInput cases[] = {
      {"f <- 1", "1:1", "undeclared field f"},
      {"state s[1] default 0;\ns[0][1] <- 2", "2:1", "arity"},
      {"field f;\n  f = 1 |", "2:", "expected a policy"},
      {"field f; f <- 10.0.0.0/8", "1:15", "prefix"},
      {"field f; if f <- 1 then id else id", "1:10", "predicate"},
      {"state s[1] default 0; atomic { atomic { s[0] <- 1 } }", "1:", "nested atomic"},
      {"field f; f = 1 $", "1:16", "unexpected character"},
      {"state s[1] default 0; state s[1] default 1; id", "1:", "duplicate"},
  };
  for (const BadInput& c : cases) {
    auto p = Parse(c.text);
    ASSERT_FALSE(p.ok()) << c.text;
    std::string msg(p.status().message());
    EXPECT_EQ(msg.rfind(c.where, 0), 0u) << c.text << ": " << msg;
    EXPECT_NE(msg.find(c.message), std::string::npos) << c.text << ": " << msg;
  }
}

TEST(ParserTest, PrettyPrintsCanonicalText) {
  EXPECT_EQ(Pretty(*Id()), "id");
  EXPECT_EQ(Pretty(*Mod("outport", Value::Int(6))), "outport <- 6");
}

TEST(ParserTest, CorpusRoundTrips) {
  std::vector<std::string> names = CatalogPolicies();
  for (const char* extra : {"assign_egress.snap", "assumption.snap", "honeypot.snap",
                            "honeypot_nonatomic.snap", "monitoring.snap"}) {
    names.push_back(extra);
  }
  for (const std::string& name : names) {
    auto prog = LoadProgram(CorpusPath(name));
    ASSERT_TRUE(prog.ok()) << name << ": " << prog.status();
    std::string text = Pretty(*prog);
    auto again = Parse(text);
    ASSERT_TRUE(again.ok()) << name << ": " << again.status() << "\n" << text;
    EXPECT_TRUE(Equal(*prog, *again)) << name << "\n" << text;
    EXPECT_EQ(Pretty(*again), text) << name;
  }
}

TEST(ParserTest, RandomPoliciesRoundTrip) {
  ::snapnet::testing::SmallUniverse u;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    PolicyPtr p = ::snapnet::testing::RandomPolicy(rng, 4);
    std::string text = Pretty(*p);
    auto q = ParsePolicy(text, u.prog);
    ASSERT_TRUE(q.ok()) << text << ": " << q.status();
    ASSERT_TRUE(Equal(*p, **q)) << text << "\nreprinted " << Pretty(**q);
  }
}

}  // namespace
}  // namespace snapnet
