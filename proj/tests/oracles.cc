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

#include "oracles.h"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <utility>

namespace snapnet::testing {
namespace {

using Cells = std::map<std::string, std::map<Value, Value>>;

struct Ctx {
  const Program& prog;
  Value Default(const std::string& var) const {
    return prog.FindState(var)->default_value;
  }
};

Value Lookup(const Ctx& ctx, const Cells& cells, const std::string& var,
             const Value& idx) {
  auto t = cells.find(var);
  if (t != cells.end()) {
    auto c = t->second.find(idx);
    if (c != t->second.end()) return c->second;
  }
  return ctx.Default(var);
}

void Write(const Ctx& ctx, Cells& cells, const std::string& var,
           const Value& idx, const Value& v) {
  if (v == ctx.Default(var)) {
    cells[var].erase(idx);
    if (cells[var].empty()) cells.erase(var);
  } else {
    cells[var][idx] = v;
  }
}

Value Expr1(const Expr& e, const Packet& pkt) {
  if (e.is_lit()) return e.lit;
  if (e.is_field()) return pkt.fields().at(e.field);
  std::vector<Value> xs;
  for (const Expr& x : e.elems) xs.push_back(Expr1(x, pkt));
  return Value::Tuple(xs);
}

bool Clash(const std::set<std::pair<bool, std::string>>& a,
           const std::set<std::pair<bool, std::string>>& b) {
  for (const auto& [w, v] : a) {
    if (w && (b.count({true, v}) || b.count({false, v}))) return true;
  }
  for (const auto& [w, v] : b) {
    if (w && (a.count({true, v}) || a.count({false, v}))) return true;
  }
  return false;
}

// Per variable, the first store whose table differs from `base`.
Cells MergeAll(const Cells& base, const std::vector<const Cells*>& outs,
               const Program& prog) {
  Cells res = base;
  for (const StateDecl& d : prog.states) {
    auto pick = [&](const Cells& c) {
      auto it = c.find(d.name);
      return it == c.end() ? std::map<Value, Value>() : it->second;
    };
    std::map<Value, Value> orig = pick(base);
    for (const Cells* o : outs) {
      std::map<Value, Value> t = pick(*o);
      if (t != orig) {
        if (t.empty()) {
          res.erase(d.name);
        } else {
          res[d.name] = t;
        }
        break;
      }
    }
  }
  return res;
}

OracleResult Go(const Ctx& ctx, const Policy& p, const Cells& m,
                const Packet& pkt) {
  OracleResult r;
  r.cells = m;
  switch (p.kind) {
    case PolicyKind::kId:
      r.packets = {pkt};
      return r;
    case PolicyKind::kDrop:
      return r;
    case PolicyKind::kTest:
      if (pkt.fields().at(p.name).Matches(p.value)) r.packets = {pkt};
      return r;
    case PolicyKind::kMod: {
      Packet q = pkt;
      q.Set(p.name, p.value);
      r.packets = {q};
      return r;
    }
    case PolicyKind::kStateTest:
      r.log = {{false, p.name}};
      if (Lookup(ctx, m, p.name, Expr1(p.index, pkt)) == Expr1(p.rhs, pkt)) {
        r.packets = {pkt};
      }
      return r;
    case PolicyKind::kStateSet:
      r.log = {{true, p.name}};
      Write(ctx, r.cells, p.name, Expr1(p.index, pkt), Expr1(p.rhs, pkt));
      r.packets = {pkt};
      return r;
    case PolicyKind::kIncr:
    case PolicyKind::kDecr: {
      r.log = {{true, p.name}};
      Value idx = Expr1(p.index, pkt);
      Value old = Lookup(ctx, m, p.name, idx);
      int64_t step = p.kind == PolicyKind::kIncr ? 1 : -1;
      int64_t next = 0;
      if (!old.is_int() || __builtin_add_overflow(old.as_int(), step, &next)) {
        r.kind = OracleResult::kError;
        return r;
      }
      Write(ctx, r.cells, p.name, idx, Value::Int(next));
      r.packets = {pkt};
      return r;
    }
    case PolicyKind::kNeg: {
      OracleResult x = Go(ctx, *p.a, m, pkt);
      if (x.kind != OracleResult::kOk) return x;
      r.log = x.log;
      if (x.packets.empty()) r.packets = {pkt};
      return r;
    }
    case PolicyKind::kOr:
    case PolicyKind::kPar: {
      OracleResult x = Go(ctx, *p.a, m, pkt);
      if (x.kind != OracleResult::kOk) return x;
      OracleResult y = Go(ctx, *p.b, m, pkt);
      if (y.kind != OracleResult::kOk) return y;
      if (Clash(x.log, y.log)) {
        r.kind = OracleResult::kUndefined;
        return r;
      }
      r.cells = MergeAll(m, {&x.cells, &y.cells}, ctx.prog);
      r.packets = x.packets;
      r.packets.insert(y.packets.begin(), y.packets.end());
      r.log = x.log;
      r.log.insert(y.log.begin(), y.log.end());
      return r;
    }
    case PolicyKind::kAnd:
    case PolicyKind::kSeq: {
      OracleResult x = Go(ctx, *p.a, m, pkt);
      if (x.kind != OracleResult::kOk) return x;
      std::vector<OracleResult> runs;
      for (const Packet& q : x.packets) {
        runs.push_back(Go(ctx, *p.b, x.cells, q));
        if (runs.back().kind != OracleResult::kOk) return runs.back();
      }
      for (size_t i = 0; i < runs.size(); ++i) {
        for (size_t j = i + 1; j < runs.size(); ++j) {
          if (Clash(runs[i].log, runs[j].log)) {
            r.kind = OracleResult::kUndefined;
            return r;
          }
        }
      }
      std::vector<const Cells*> outs;
      for (const OracleResult& y : runs) outs.push_back(&y.cells);
      r.cells = MergeAll(x.cells, outs, ctx.prog);
      r.log = x.log;
      for (const OracleResult& y : runs) {
        r.packets.insert(y.packets.begin(), y.packets.end());
        r.log.insert(y.log.begin(), y.log.end());
      }
      return r;
    }
    case PolicyKind::kIf: {
      OracleResult c = Go(ctx, *p.a, m, pkt);
      if (c.kind != OracleResult::kOk) return c;
      OracleResult b = Go(ctx, c.packets.empty() ? *p.c : *p.b, m, pkt);
      if (b.kind != OracleResult::kOk) return b;
      b.log.insert(c.log.begin(), c.log.end());
      return b;
    }
    case PolicyKind::kAtomic:
      return Go(ctx, *p.a, m, pkt);
  }
  return r;
}

Cells FromStore(const Store& s) {
  Cells out;
  for (const auto& [var, t] : s.tables()) {
    if (!t.cells.empty()) out[var] = {t.cells.begin(), t.cells.end()};
  }
  return out;
}

}  // namespace

OracleResult OracleEval(const Program& prog, const Policy& p, const Store& m,
                        const Packet& pkt) {
  Ctx ctx{prog};
  return Go(ctx, p, FromStore(m), pkt);
}

OracleResult ToOracle(const std::optional<EvalResult>& r) {
  OracleResult out;
  if (!r) {
    out.kind = OracleResult::kUndefined;
    return out;
  }
  out.cells = FromStore(r->store);
  out.packets = r->packets;
  for (const LogEntry& e : r->log) out.log.insert({e.write, e.var});
  return out;
}

SmallUniverse::SmallUniverse() {
  prog.fields = DefaultFields();
  for (const char* f : {"f", "g", "h"}) prog.fields.push_back(f);
  std::sort(prog.fields.begin(), prog.fields.end());
  prog.states = {{"c", 1, Value::Int(0)}, {"s", 1, Value::Int(0)}};
  prog.body = Id();
  for (int f = 0; f < 3; ++f) {
    for (int g = 0; g < 3; ++g) {
      for (int h = 0; h < 3; ++h) {
        packets.push_back(MakePacket(
            prog, {{"f", Value::Int(f)}, {"g", Value::Int(g)}, {"h", Value::Int(h)}}));
      }
    }
  }
  for (int c = -2; c <= 4; ++c) {
    for (int s = 0; s <= 2; ++s) {
      Store st(prog);
      st.mutable_table("c").Set(Value::Int(0), Value::Int(c));
      st.mutable_table("s").Set(Value::Int(0), Value::Int(s));
      stores.push_back(st);
    }
  }
}

namespace {

const char* kFields[] = {"f", "g", "h"};

int Pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<uint64_t>(n));
}

Expr Zero() { return Expr::Lit(Value::Int(0)); }

}  // namespace

PolicyPtr RandomPredicate(std::mt19937_64& rng, int depth) {
  int choice = Pick(rng, depth <= 0 ? 4 : 7);
  switch (choice) {
    case 0:
      return Test(kFields[Pick(rng, 3)], Value::Int(1 + Pick(rng, 2)));
    case 1:
      return StateTest("c", Zero(), Expr::Lit(Value::Int(Pick(rng, 5) - 1)));
    case 2:
      if (Pick(rng, 2) == 0) {
        return StateTest("s", Zero(), Expr::Field(kFields[Pick(rng, 3)]));
      }
      return StateTest("s", Zero(), Expr::Lit(Value::Int(1 + Pick(rng, 2))));
    case 3:
      return Pick(rng, 2) == 0 ? Id() : Drop();
    case 4:
      return Neg(RandomPredicate(rng, depth - 1));
    case 5:
      return Or(RandomPredicate(rng, depth - 1), RandomPredicate(rng, depth - 1));
    default:
      return And(RandomPredicate(rng, depth - 1), RandomPredicate(rng, depth - 1));
  }
}

PolicyPtr RandomPolicy(std::mt19937_64& rng, int depth) {
  int choice = Pick(rng, depth <= 0 ? 6 : 10);
  switch (choice) {
    case 0:
      return Mod(kFields[Pick(rng, 3)], Value::Int(1 + Pick(rng, 2)));
    case 1:
      return StateSet("c", Zero(), Expr::Lit(Value::Int(Pick(rng, 3))));
    case 2:
      if (Pick(rng, 2) == 0) {
        return StateSet("s", Zero(), Expr::Field(kFields[Pick(rng, 3)]));
      }
      return StateSet("s", Zero(), Expr::Lit(Value::Int(1 + Pick(rng, 2))));
    case 3:
      return Pick(rng, 2) == 0 ? Incr("c", Zero()) : Decr("c", Zero());
    case 4:
    case 5:
      return RandomPredicate(rng, depth <= 0 ? 0 : 1);
    case 6:
      return Par(RandomPolicy(rng, depth - 1), RandomPolicy(rng, depth - 1));
    case 7:
    case 8:
      return Seq(RandomPolicy(rng, depth - 1), RandomPolicy(rng, depth - 1));
    default:
      return If(RandomPredicate(rng, 1), RandomPolicy(rng, depth - 1),
                RandomPolicy(rng, depth - 1));
  }
}

namespace {

bool IsNumber(const std::string& t, double* v) {
  char* end = nullptr;
  *v = std::strtod(t.c_str(), &end);
  return end != t.c_str() && *end == '\0';
}

bool IsName(const std::string& t) {
  if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) {
    return false;
  }
  for (char c : t) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '-')) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool ParseLp(const std::string& text, LpCounts* out, std::string* error) {
  enum Section { kNone, kObj, kRows, kBounds, kBinary, kDone } sec = kNone;
  std::set<std::string> vars;
  std::istringstream in(text);
  std::string line;
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  while (std::getline(in, line)) {
    if (line.rfind('\\', 0) == 0) continue;  // comment
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    std::string head = toks[0];
    if (head == "Minimize" || head == "Maximize") {
      sec = kObj;
      continue;
    }
    if (head == "Subject" && toks.size() == 2 && toks[1] == "To") {
      sec = kRows;
      continue;
    }
    if (head == "Bounds") {
      sec = kBounds;
      continue;
    }
    if (head == "Binary" || head == "Binaries") {
      sec = kBinary;
      continue;
    }
    if (head == "End") {
      sec = kDone;
      continue;
    }
    if (sec == kNone || sec == kDone) return fail("text outside a section: " + line);
    for (const std::string& t : toks) {
      double v = 0;
      if (t.back() == ':') {
        if (sec == kRows) ++out->rows;
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
        continue;
      }
      if (t == "+") {
        sign = 1.0;
        continue;
      }
      if (t == "-") {
        sign = -1.0;
        continue;
      }
      if (t == "<=" || t == ">=" || t == "=") continue;
      if (IsNumber(t, &v)) {
        coef = v;
        have_coef = true;
        continue;
      }
      if (IsName(t)) {
        if (t == "inf" || t == "infinity") continue;
        vars.insert(t);
        if (sec == kBinary) ++out->binaries;
        if (sec == kObj) out->objective[t] += sign * (have_coef ? coef : 1.0);
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
        continue;
      }
      return fail("bad token '" + t + "'");
    }
  }
  if (sec != kDone) return fail("missing End");
  out->columns = static_cast<int>(vars.size());
  return true;
}

}  // namespace snapnet::testing
