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

#include "snapnet/atoms.h"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace snapnet {
namespace {

void AppendInt64(std::string& out, int64_t v) {
  uint64_t u = static_cast<uint64_t>(v) ^ (uint64_t{1} << 63);
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

std::string IndexText(const Expr& index) {
  if (!index.is_tuple()) return absl::StrCat("[", index.ToString(), "]");
  std::string out;
  for (const Expr& e : index.elems) absl::StrAppend(&out, "[", e.ToString(), "]");
  return out;
}

}  // namespace

TestAtom TestAtom::FieldValue(std::string f, Value v) {
  TestAtom t;
  t.kind = Kind::kFieldValue;
  t.f1 = std::move(f);
  t.v = std::move(v);
  return t;
}

TestAtom TestAtom::FieldField(std::string f, std::string g) {
  TestAtom t;
  t.kind = Kind::kFieldField;
  if (g < f) std::swap(f, g);
  t.f1 = std::move(f);
  t.f2 = std::move(g);
  return t;
}

TestAtom TestAtom::State(std::string var, Expr index, Expr rhs, int64_t adjust) {
  TestAtom t;
  t.kind = Kind::kState;
  t.var = std::move(var);
  t.index = std::move(index);
  t.rhs = std::move(rhs);
  t.adjust = adjust;
  return t;
}

std::string TestAtom::Key() const {
  std::string out(1, static_cast<char>(kind));
  switch (kind) {
    case Kind::kFieldValue:
      absl::StrAppend(&out, f1, std::string(1, '\0'), v.Encode());
      break;
    case Kind::kFieldField:
      absl::StrAppend(&out, f1, std::string(1, '\0'), f2, std::string(1, '\0'));
      break;
    case Kind::kState:
      absl::StrAppend(&out, var, std::string(1, '\0'), index.Key(), rhs.Key());
      AppendInt64(out, adjust);
      break;
  }
  return out;
}

std::string TestAtom::ToString() const {
  switch (kind) {
    case Kind::kFieldValue:
      return absl::StrCat(f1, " = ", v.ToString());
    case Kind::kFieldField:
      return absl::StrCat(f1, " = ", f2);
    case Kind::kState:
      if (adjust == 0) {
        return absl::StrCat(var, IndexText(index), " = ", rhs.ToString());
      }
      return absl::StrCat(var, IndexText(index), adjust > 0 ? " + " : " - ",
                          adjust > 0 ? adjust : -adjust, " = ", rhs.ToString());
  }
  return "";
}

bool TestAtom::Eval(const Packet& pkt, const Store& store) const {
  switch (kind) {
    case Kind::kFieldValue:
      return pkt.Get(f1).Matches(v);
    case Kind::kFieldField:
      return pkt.Get(f1) == pkt.Get(f2);
    case Kind::kState: {
      const Value& cell = store.table(var).Get(EvalExpr(index, pkt));
      Value want = EvalExpr(rhs, pkt);
      if (adjust == 0) return cell == want;
      if (!cell.is_int()) return false;
      int64_t sum = 0;
      if (__builtin_add_overflow(cell.as_int(), adjust, &sum)) return false;
      return want.is_int() && want.as_int() == sum;
    }
  }
  return false;
}

std::string StateAtom::Key() const {
  std::string out(1, static_cast<char>(op));
  out += index.Key();
  if (op == Op::kSet) out += value.Key();
  return out;
}

std::string StateAtom::ToString(const std::string& var) const {
  switch (op) {
    case Op::kSet:
      return absl::StrCat(var, IndexText(index), " <- ", value.ToString());
    case Op::kIncr:
      return absl::StrCat(var, IndexText(index), "++");
    case Op::kDecr:
      return absl::StrCat(var, IndexText(index), "--");
  }
  return "";
}

std::string ActionSeq::Key() const {
  std::string out;
  for (const auto& [var, atoms] : writes) {
    absl::StrAppend(&out, "w", var, std::string(1, '\0'));
    for (const StateAtom& a : atoms) {
      out.push_back('\1');
      out += a.Key();
    }
    out.push_back('\2');
  }
  for (const auto& [f, v] : mods) {
    absl::StrAppend(&out, "m", f, std::string(1, '\0'), v.Encode());
  }
  if (drop) out += "d";
  return out;
}

std::string ActionSeq::ToString() const {
  std::vector<std::string> parts;
  for (const auto& [var, atoms] : writes) {
    for (const StateAtom& a : atoms) parts.push_back(a.ToString(var));
  }
  for (const auto& [f, v] : mods) parts.push_back(absl::StrCat(f, " <- ", v.ToString()));
  if (drop) parts.push_back("drop");
  if (parts.empty()) return "id";
  return absl::StrJoin(parts, "; ");
}

Leaf Leaf::Of(std::vector<ActionSeq> seqs, absl::btree_set<LogEntry> log) {
  Leaf leaf;
  std::vector<std::pair<std::string, ActionSeq>> keyed;
  keyed.reserve(seqs.size());
  for (ActionSeq& s : seqs) {
    if (s.drop) s.mods.clear();
    std::string k = s.Key();
    keyed.emplace_back(std::move(k), std::move(s));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) {
                            return a.first == b.first;
                          }),
              keyed.end());
  bool has_other = std::any_of(keyed.begin(), keyed.end(), [](const auto& kv) {
    return !kv.second.IsPureDrop();
  });
  for (auto& [k, s] : keyed) {
    if (has_other && s.IsPureDrop()) continue;
    leaf.seqs.push_back(std::move(s));
  }
  if (leaf.seqs.empty()) {
    ActionSeq d;
    d.drop = true;
    leaf.seqs.push_back(d);
  }
  leaf.log = std::move(log);
  return leaf;
}

Leaf Leaf::Undefined(std::string var) {
  Leaf leaf;
  leaf.undefined = true;
  leaf.race_var = std::move(var);
  return leaf;
}

bool Leaf::IsIdLeaf() const {
  return !undefined && seqs.size() == 1 && seqs[0].IsId();
}

bool Leaf::IsDropLeaf() const {
  return !undefined && seqs.size() == 1 && seqs[0].IsPureDrop();
}

std::string Leaf::Key() const {
  if (undefined) return absl::StrCat("U", race_var);
  std::string out = "D";
  for (const ActionSeq& s : seqs) {
    out += s.Key();
    out.push_back('\3');
  }
  for (const LogEntry& e : log) {
    absl::StrAppend(&out, e.write ? "W" : "R", e.var, std::string(1, '\0'));
  }
  return out;
}

std::string Leaf::ToString() const {
  if (undefined) return absl::StrCat("undefined(", race_var, ")");
  return absl::StrCat("{",
                      absl::StrJoin(seqs, ", ",
                                    [](std::string* out, const ActionSeq& s) {
                                      out->append(s.ToString());
                                    }),
                      "}");
}

void ApplyAtoms(const WriteList& atoms, const Packet& input, Table& table) {
  for (const StateAtom& a : atoms) {
    Value idx = EvalExpr(a.index, input);
    switch (a.op) {
      case StateAtom::Op::kSet:
        table.Set(idx, EvalExpr(a.value, input));
        break;
      case StateAtom::Op::kIncr:
        table.Set(idx, AddInt(table.Get(idx), 1));
        break;
      case StateAtom::Op::kDecr:
        table.Set(idx, AddInt(table.Get(idx), -1));
        break;
    }
  }
}

const WriteList* DominantWrites(const Leaf& leaf, const std::string& var) {
  const WriteList* best = nullptr;
  for (const ActionSeq& s : leaf.seqs) {
    auto it = s.writes.find(var);
    if (it == s.writes.end()) continue;
    if (best == nullptr || it->second.size() > best->size()) best = &it->second;
  }
  if (best == nullptr) return nullptr;
  for (const ActionSeq& s : leaf.seqs) {
    auto it = s.writes.find(var);
    if (it == s.writes.end()) continue;
    if (!std::equal(it->second.begin(), it->second.end(), best->begin())) {
      throw EvalError(absl::StrCat("conflicting writes to ", var, " in leaf"));
    }
  }
  return best;
}

absl::btree_set<std::string> WrittenVars(const Leaf& leaf) {
  absl::btree_set<std::string> out;
  for (const ActionSeq& s : leaf.seqs) {
    for (const auto& [var, atoms] : s.writes) out.insert(var);
  }
  return out;
}

bool ApplyMods(const ActionSeq& seq, const Packet& input, Packet& out) {
  if (seq.drop) return false;
  out = input;
  for (const auto& [f, v] : seq.mods) out.Set(f, v);
  return true;
}

std::set<Packet> ExecLeaf(const Leaf& leaf, const Packet& input, Store& store) {
  if (leaf.undefined) throw EvalError("executing an undefined leaf");
  for (const std::string& var : WrittenVars(leaf)) {
    ApplyAtoms(*DominantWrites(leaf, var), input, store.mutable_table(var));
  }
  std::set<Packet> out;
  for (const ActionSeq& s : leaf.seqs) {
    Packet p;
    if (ApplyMods(s, input, p)) out.insert(std::move(p));
  }
  return out;
}

Expr SubstFields(const Expr& e, const absl::btree_map<std::string, Value>& mods) {
  switch (e.kind) {
    case Expr::Kind::kLit:
      return e;
    case Expr::Kind::kField: {
      auto it = mods.find(e.field);
      return it == mods.end() ? e : Expr::Lit(it->second);
    }
    case Expr::Kind::kTuple: {
      std::vector<Expr> elems;
      for (const Expr& x : e.elems) elems.push_back(SubstFields(x, mods));
      return Expr::Tuple(std::move(elems));
    }
  }
  return e;
}

}  // namespace snapnet
