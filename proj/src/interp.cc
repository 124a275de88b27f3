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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace snapnet {

const Value& Packet::Get(const std::string& field) const {
  auto it = fields_.find(field);
  if (it == fields_.end()) {
    throw EvalError(absl::StrCat("packet has no field ", field));
  }
  return it->second;
}

std::string Packet::ToString() const {
  return absl::StrCat(
      "{",
      absl::StrJoin(fields_, ", ",
                    [](std::string* out, const auto& kv) {
                      absl::StrAppend(out, kv.first, ": ", kv.second.ToString());
                    }),
      "}");
}

Packet MakePacket(const Program& prog,
                  std::initializer_list<std::pair<std::string, Value>> init) {
  Packet pkt;
  for (const std::string& f : prog.fields) pkt.Set(f, Value::Int(0));
  for (const auto& [f, v] : init) pkt.Set(f, v);
  return pkt;
}

const Value& Table::Get(const Value& index) const {
  auto it = cells.find(index);
  return it == cells.end() ? default_value : it->second;
}

void Table::Set(const Value& index, Value v) {
  if (v == default_value) {
    cells.erase(index);
  } else {
    cells[index] = std::move(v);
  }
}

Store::Store(const Program& prog) {
  for (const StateDecl& d : prog.states) AddVar(d.name, d.default_value);
}

const Table& Store::table(const std::string& var) const {
  auto it = tables_.find(var);
  if (it == tables_.end()) {
    throw EvalError(absl::StrCat("store has no variable ", var));
  }
  return it->second;
}

Table& Store::mutable_table(const std::string& var) {
  auto it = tables_.find(var);
  if (it == tables_.end()) {
    throw EvalError(absl::StrCat("store has no variable ", var));
  }
  return it->second;
}

void Store::AddVar(const std::string& var, Value default_value) {
  tables_[var].default_value = std::move(default_value);
}

std::string Store::ToString() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, t] : tables_) {
    if (!first) out += ", ";
    first = false;
    absl::StrAppend(&out, var, ": {");
    bool first_cell = true;
    for (const auto& [k, v] : t.cells) {
      if (!first_cell) out += ", ";
      first_cell = false;
      absl::StrAppend(&out, k.ToString(), " -> ", v.ToString());
    }
    absl::StrAppend(&out, "}");
  }
  out += "}";
  return out;
}

Value EvalExpr(const Expr& e, const Packet& pkt) {
  switch (e.kind) {
    case Expr::Kind::kLit:
      return e.lit;
    case Expr::Kind::kField:
      return pkt.Get(e.field);
    case Expr::Kind::kTuple: {
      std::vector<Value> elems;
      elems.reserve(e.elems.size());
      for (const Expr& x : e.elems) elems.push_back(EvalExpr(x, pkt));
      return Value::Tuple(std::move(elems));
    }
  }
  return Value();
}

Value AddInt(const Value& v, int64_t delta) {
  if (!v.is_int()) {
    throw EvalError(absl::StrCat("cannot increment non-integer ", v.ToString()));
  }
  int64_t out = 0;
  if (__builtin_add_overflow(v.as_int(), delta, &out)) {
    throw EvalError("integer overflow in state update");
  }
  return Value::Int(out);
}

bool Consistent(const Log& l1, const Log& l2) {
  auto one_way = [](const Log& a, const Log& b) {
    for (const LogEntry& w : a) {
      if (!w.write) continue;
      for (const LogEntry& e : b) {
        if (e.var == w.var) return false;
      }
    }
    return true;
  };
  return one_way(l1, l2) && one_way(l2, l1);
}

Store Merge(const Store& m, const std::vector<const Store*>& ms) {
  Store out = m;
  for (const auto& [var, base] : m.tables()) {
    for (const Store* mi : ms) {
      const Table& t = mi->table(var);
      if (!(t == base)) {
        out.mutable_table(var) = t;
        break;
      }
    }
  }
  return out;
}

namespace {

void Append(Log& dst, const Log& src) { dst.insert(dst.end(), src.begin(), src.end()); }

std::optional<EvalResult> EvalSeq(const Policy& p, const Policy& q,
                                  const Store& m, const Packet& pkt) {
  std::optional<EvalResult> first = Eval(p, m, pkt);
  if (!first) return std::nullopt;
  std::vector<EvalResult> runs;
  runs.reserve(first->packets.size());
  for (const Packet& out : first->packets) {
    std::optional<EvalResult> r = Eval(q, first->store, out);
    if (!r) return std::nullopt;
    runs.push_back(std::move(*r));
  }
  for (size_t i = 0; i < runs.size(); ++i) {
    for (size_t j = i + 1; j < runs.size(); ++j) {
      if (!Consistent(runs[i].log, runs[j].log)) return std::nullopt;
    }
  }
  EvalResult res;
  std::vector<const Store*> stores;
  for (const EvalResult& r : runs) stores.push_back(&r.store);
  res.store = runs.empty() ? first->store : Merge(first->store, stores);
  res.log = first->log;
  for (EvalResult& r : runs) {
    res.packets.insert(r.packets.begin(), r.packets.end());
    Append(res.log, r.log);
  }
  return res;
}

std::optional<EvalResult> EvalPar(const Policy& p, const Policy& q,
                                  const Store& m, const Packet& pkt) {
  std::optional<EvalResult> left = Eval(p, m, pkt);
  if (!left) return std::nullopt;
  std::optional<EvalResult> right = Eval(q, m, pkt);
  if (!right) return std::nullopt;
  if (!Consistent(left->log, right->log)) return std::nullopt;
  EvalResult res;
  res.store = Merge(m, {&left->store, &right->store});
  res.packets = std::move(left->packets);
  res.packets.insert(right->packets.begin(), right->packets.end());
  res.log = std::move(left->log);
  Append(res.log, right->log);
  return res;
}

}  // namespace

std::optional<EvalResult> Eval(const Policy& p, const Store& m,
                               const Packet& pkt) {
  switch (p.kind) {
    case PolicyKind::kId:
      return EvalResult{m, {pkt}, {}};
    case PolicyKind::kDrop:
      return EvalResult{m, {}, {}};
    case PolicyKind::kTest: {
      EvalResult r{m, {}, {}};
      if (pkt.Get(p.name).Matches(p.value)) r.packets.insert(pkt);
      return r;
    }
    case PolicyKind::kMod: {
      Packet out = pkt;
      out.Set(p.name, p.value);
      return EvalResult{m, {out}, {}};
    }
    case PolicyKind::kStateTest: {
      EvalResult r{m, {}, {{false, p.name}}};
      const Value& cell = m.table(p.name).Get(EvalExpr(p.index, pkt));
      if (cell == EvalExpr(p.rhs, pkt)) r.packets.insert(pkt);
      return r;
    }
    case PolicyKind::kStateSet: {
      EvalResult r{m, {pkt}, {{true, p.name}}};
      r.store.mutable_table(p.name).Set(EvalExpr(p.index, pkt),
                                        EvalExpr(p.rhs, pkt));
      return r;
    }
    case PolicyKind::kIncr:
    case PolicyKind::kDecr: {
      EvalResult r{m, {pkt}, {{true, p.name}}};
      Value idx = EvalExpr(p.index, pkt);
      Table& t = r.store.mutable_table(p.name);
      t.Set(idx, AddInt(t.Get(idx), p.kind == PolicyKind::kIncr ? 1 : -1));
      return r;
    }
    case PolicyKind::kNeg: {
      std::optional<EvalResult> x = Eval(*p.a, m, pkt);
      if (!x) return std::nullopt;
      EvalResult r{m, {}, std::move(x->log)};
      if (!x->packets.contains(pkt)) r.packets.insert(pkt);
      return r;
    }
    case PolicyKind::kAnd:
    case PolicyKind::kSeq:
      return EvalSeq(*p.a, *p.b, m, pkt);
    case PolicyKind::kOr:
    case PolicyKind::kPar:
      return EvalPar(*p.a, *p.b, m, pkt);
    case PolicyKind::kIf: {
      std::optional<EvalResult> cond = Eval(*p.a, m, pkt);
      if (!cond) return std::nullopt;
      std::optional<EvalResult> branch =
          Eval(cond->packets.contains(pkt) ? *p.b : *p.c, m, pkt);
      if (!branch) return std::nullopt;
      Log log = std::move(cond->log);
      Append(log, branch->log);
      branch->log = std::move(log);
      return branch;
    }
    case PolicyKind::kAtomic:
      return Eval(*p.a, m, pkt);
  }
  return std::nullopt;
}

}  // namespace snapnet
