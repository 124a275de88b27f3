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

#include "snapnet/codec.h"

#include <stdexcept>

#include "gtest/gtest.h"
#include "snapnet/corpus.h"

namespace snapnet {
namespace {

using json = nlohmann::json;

TEST(CodecTest, ValuesRoundTrip) {
  const Value values[] = {
      Value::Int(-7),
      Value::Bool(true),
      Value::Ip(0x0a000601),
      Value::MakePrefix(0x0a000600, 24),
      Value::Sym("ESTABLISHED"),
      Value::Tuple({Value::Int(1), Value::Tuple({Value::Sym("x")})}),
  };
  for (const Value& v : values) {
    EXPECT_EQ(ValueFromJson(ValueToJson(v)), v) << v.ToString();
    EXPECT_EQ(ValueFromJson(json::parse(ValueToJson(v).dump())), v);
  }
  EXPECT_EQ(ValueToJson(Value::Ip(0x0a000601)), json({{"ip", "10.0.6.1"}}));
}

TEST(CodecTest, TestsAndSequencesRoundTrip) {
  TestAtom tests[] = {
      TestAtom::FieldValue("dstip", Value::MakePrefix(0x0a000600, 24)),
      TestAtom::FieldField("dstip", "srcip"),
      TestAtom::State("orphan", Expr::Tuple({Expr::Field("srcip"), Expr::Field("dstip")}),
                      Expr::Lit(Value::Bool(true)), 0),
      TestAtom::State("c", Expr::Field("srcip"), Expr::Lit(Value::Int(3)), -1),
  };
  for (const TestAtom& t : tests) {
    EXPECT_EQ(TestFromJson(TestToJson(t)).Key(), t.Key()) << t.ToString();
  }
  ActionSeq s;
  s.writes["c"] = {StateAtom{StateAtom::Op::kIncr, Expr::Field("srcip"), {}},
                   StateAtom{StateAtom::Op::kSet, Expr::Field("dstip"),
                             Expr::Lit(Value::Int(0))}};
  s.mods["outport"] = Value::Int(6);
  EXPECT_EQ(SeqFromJson(SeqToJson(s)).Key(), s.Key());
  ActionSeq d;
  d.drop = true;
  EXPECT_EQ(SeqFromJson(SeqToJson(d)).Key(), d.Key());
}

TEST(CodecTest, PacketsRoundTrip) {
  auto prog = LoadProgram(CorpusPath("dns_tunnel.snap"));
  ASSERT_TRUE(prog.ok());
  PacketGenerator gen(*prog, {1, 6}, 2);
  for (int i = 0; i < 50; ++i) {
    Packet p = gen.Next().second;
    EXPECT_EQ(PacketFromJson(PacketToJson(p)), p);
  }
}

TEST(CodecTest, MalformedInputThrows) {
  EXPECT_THROW(ValueFromJson(json::object()), std::invalid_argument);
  EXPECT_THROW(ValueFromJson(json({{"ip", "10.0.0"}})), std::invalid_argument);
  EXPECT_THROW(ValueFromJson(json({{"color", 1}})), std::invalid_argument);
  EXPECT_THROW(TestFromJson(json::array()), std::invalid_argument);
}

}  // namespace
}  // namespace snapnet
