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
#include <string>

namespace snapnet {

using nlohmann::json;

namespace {

const json& At(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing key ") + key);
  }
  return j.at(key);
}

}  // namespace

json ValueToJson(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::kInt:
      return {{"int", v.as_int()}};
    case Value::Kind::kBool:
      return {{"bool", v.as_bool()}};
    case Value::Kind::kIp:
      return {{"ip", FormatIpv4(v.as_ip())}};
    case Value::Kind::kPrefix:
      return {{"prefix", FormatIpv4(v.as_prefix().addr)}, {"len", v.as_prefix().len}};
    case Value::Kind::kSymbol:
      return {{"sym", v.as_symbol()}};
    case Value::Kind::kTuple: {
      json elems = json::array();
      for (const Value& e : v.as_tuple()) elems.push_back(ValueToJson(e));
      return {{"tuple", elems}};
    }
  }
  return nullptr;
}

Value ValueFromJson(const json& j) {
  if (!j.is_object() || j.empty()) throw std::invalid_argument("bad value");
  if (j.contains("int")) return Value::Int(j.at("int").get<int64_t>());
  if (j.contains("bool")) return Value::Bool(j.at("bool").get<bool>());
  if (j.contains("ip") || j.contains("prefix")) {
    bool prefix = j.contains("prefix");
    auto addr = ParseIpv4(j.at(prefix ? "prefix" : "ip").get<std::string>());
    if (!addr) throw std::invalid_argument("bad address");
    return prefix ? Value::MakePrefix(*addr, At(j, "len").get<int>()) : Value::Ip(*addr);
  }
  if (j.contains("sym")) return Value::Sym(j.at("sym").get<std::string>());
  if (j.contains("tuple")) {
    std::vector<Value> elems;
    for (const json& e : j.at("tuple")) elems.push_back(ValueFromJson(e));
    return Value::Tuple(std::move(elems));
  }
  throw std::invalid_argument("unknown value kind");
}

json ExprToJson(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kLit:
      return {{"lit", ValueToJson(e.lit)}};
    case Expr::Kind::kField:
      return {{"field", e.field}};
    case Expr::Kind::kTuple: {
      json elems = json::array();
      for (const Expr& x : e.elems) elems.push_back(ExprToJson(x));
      return {{"tuple", elems}};
    }
  }
  return nullptr;
}

Expr ExprFromJson(const json& j) {
  if (j.is_object() && j.contains("lit")) return Expr::Lit(ValueFromJson(j.at("lit")));
  if (j.is_object() && j.contains("field")) {
    return Expr::Field(j.at("field").get<std::string>());
  }
  if (j.is_object() && j.contains("tuple")) {
    std::vector<Expr> elems;
    for (const json& x : j.at("tuple")) elems.push_back(ExprFromJson(x));
    return Expr::Tuple(std::move(elems));
  }
  throw std::invalid_argument("bad expression");
}

json TestToJson(const TestAtom& t) {
  switch (t.kind) {
    case TestAtom::Kind::kFieldValue:
      return {{"field", t.f1}, {"value", ValueToJson(t.v)}};
    case TestAtom::Kind::kFieldField:
      return {{"field", t.f1}, {"other", t.f2}};
    case TestAtom::Kind::kState:
      return {{"state", t.var},
              {"index", ExprToJson(t.index)},
              {"rhs", ExprToJson(t.rhs)},
              {"adjust", t.adjust}};
  }
  return nullptr;
}

TestAtom TestFromJson(const json& j) {
  if (j.is_object() && j.contains("state")) {
    return TestAtom::State(j.at("state").get<std::string>(), ExprFromJson(At(j, "index")),
                           ExprFromJson(At(j, "rhs")), At(j, "adjust").get<int64_t>());
  }
  std::string f = At(j, "field").get<std::string>();
  if (j.contains("other")) return TestAtom::FieldField(f, j.at("other").get<std::string>());
  return TestAtom::FieldValue(f, ValueFromJson(At(j, "value")));
}

json WritesToJson(const WriteList& w) {
  json out = json::array();
  for (const StateAtom& a : w) {
    json x = {{"index", ExprToJson(a.index)}};
    switch (a.op) {
      case StateAtom::Op::kSet:
        x["op"] = "set";
        x["value"] = ExprToJson(a.value);
        break;
      case StateAtom::Op::kIncr:
        x["op"] = "incr";
        break;
      case StateAtom::Op::kDecr:
        x["op"] = "decr";
        break;
    }
    out.push_back(std::move(x));
  }
  return out;
}

WriteList WritesFromJson(const json& j) {
  WriteList out;
  for (const json& x : j) {
    StateAtom a;
    a.index = ExprFromJson(At(x, "index"));
    std::string op = At(x, "op").get<std::string>();
    if (op == "set") {
      a.op = StateAtom::Op::kSet;
      a.value = ExprFromJson(At(x, "value"));
    } else if (op == "incr") {
      a.op = StateAtom::Op::kIncr;
    } else if (op == "decr") {
      a.op = StateAtom::Op::kDecr;
    } else {
      throw std::invalid_argument("bad write op " + op);
    }
    out.push_back(std::move(a));
  }
  return out;
}

json SeqToJson(const ActionSeq& s) {
  json writes = json::object();
  for (const auto& [var, w] : s.writes) writes[var] = WritesToJson(w);
  json mods = json::object();
  for (const auto& [f, v] : s.mods) mods[f] = ValueToJson(v);
  return {{"writes", writes}, {"mods", mods}, {"drop", s.drop}};
}

ActionSeq SeqFromJson(const json& j) {
  ActionSeq s;
  for (const auto& [var, w] : At(j, "writes").items()) s.writes[var] = WritesFromJson(w);
  for (const auto& [f, v] : At(j, "mods").items()) s.mods[f] = ValueFromJson(v);
  s.drop = At(j, "drop").get<bool>();
  return s;
}

json PacketToJson(const Packet& p) {
  json out = json::object();
  for (const auto& [f, v] : p.fields()) out[f] = ValueToJson(v);
  return out;
}

Packet PacketFromJson(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("packet must be an object");
  Packet p;
  for (const auto& [f, v] : j.items()) p.Set(f, ValueFromJson(v));
  return p;
}

}  // namespace snapnet
