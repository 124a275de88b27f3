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

#include "snapnet/context.h"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/btree_set.h"
#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"

namespace snapnet {
namespace {

class Solver {
 public:
  void Add(const Literal& lit);
  bool Check();

 private:
  enum class Kind { kField, kConst, kTuple, kCell };
  struct Term {
    Kind kind;
    std::string name;  // field or state variable
    Value value;       // kConst
    int64_t adjust = 0;
    std::vector<int> kids;  // tuple elements, or the cell index
  };
  struct Member {
    int term;
    Prefix prefix;
    bool positive;
  };

  int Intern(Term t);
  int FieldTerm(const std::string& f);
  int ConstTerm(const Value& v);
  int ExprTerm(const Expr& e);
  int Find(int x);
  bool Union(int a, int b);
  const Value* ClassConst(int rep);
  bool Closure();
  bool CellArithmetic(bool& changed);
  bool Memberships();

  std::vector<Term> terms_;
  std::vector<int> parent_;
  absl::flat_hash_map<std::string, int> intern_;
  std::vector<std::pair<int, int>> eqs_;
  std::vector<std::pair<int, int>> diseqs_;
  std::vector<Member> members_;
  std::vector<int> int_required_;
};

int Solver::Intern(Term t) {
  std::string key(1, static_cast<char>(t.kind));
  absl::StrAppend(&key, t.name, std::string(1, '\0'));
  if (t.kind == Kind::kConst) key += t.value.Encode();
  absl::StrAppend(&key, t.adjust);
  for (int k : t.kids) absl::StrAppend(&key, ",", k);
  auto [it, inserted] = intern_.try_emplace(key, static_cast<int>(terms_.size()));
  if (inserted) {
    terms_.push_back(std::move(t));
    parent_.push_back(it->second);
  }
  return it->second;
}

int Solver::FieldTerm(const std::string& f) {
  return Intern(Term{Kind::kField, f, Value(), 0, {}});
}

int Solver::ConstTerm(const Value& v) {
  if (v.is_tuple()) {
    Term t{Kind::kTuple, "", Value(), 0, {}};
    for (const Value& x : v.as_tuple()) t.kids.push_back(ConstTerm(x));
    return Intern(std::move(t));
  }
  return Intern(Term{Kind::kConst, "", v, 0, {}});
}

int Solver::ExprTerm(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kLit:
      return ConstTerm(e.lit);
    case Expr::Kind::kField:
      return FieldTerm(e.field);
    case Expr::Kind::kTuple: {
      Term t{Kind::kTuple, "", Value(), 0, {}};
      for (const Expr& x : e.elems) t.kids.push_back(ExprTerm(x));
      return Intern(std::move(t));
    }
  }
  return -1;
}

void Solver::Add(const Literal& lit) {
  const TestAtom& t = *lit.test;
  int a = -1, b = -1;
  switch (t.kind) {
    case TestAtom::Kind::kFieldValue:
      if (t.v.is_prefix()) {
        members_.push_back({FieldTerm(t.f1), t.v.as_prefix(), lit.positive});
        return;
      }
      a = FieldTerm(t.f1);
      b = ConstTerm(t.v);
      break;
    case TestAtom::Kind::kFieldField:
      a = FieldTerm(t.f1);
      b = FieldTerm(t.f2);
      break;
    case TestAtom::Kind::kState:
      a = Intern(Term{Kind::kCell, t.var, Value(), t.adjust, {ExprTerm(t.index)}});
      b = ExprTerm(t.rhs);
      if (lit.positive && t.adjust != 0) int_required_.push_back(a);
      break;
  }
  (lit.positive ? eqs_ : diseqs_).emplace_back(a, b);
}

int Solver::Find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool Solver::Union(int a, int b) {
  a = Find(a);
  b = Find(b);
  if (a == b) return false;
  parent_[std::max(a, b)] = std::min(a, b);
  return true;
}

const Value* Solver::ClassConst(int rep) {
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].kind == Kind::kConst && Find(static_cast<int>(i)) == rep) {
      return &terms_[i].value;
    }
  }
  return nullptr;
}

// Congruence closure with tuple injectivity. Returns false on a clash.
bool Solver::Closure() {
  bool changed = true;
  while (changed) {
    changed = false;
    const int n = static_cast<int>(terms_.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Term& x = terms_[i];
        const Term& y = terms_[j];
        bool same = Find(i) == Find(j);
        if (x.kind == Kind::kTuple && y.kind == Kind::kTuple) {
          if (same) {
            if (x.kids.size() != y.kids.size()) return false;
            for (size_t k = 0; k < x.kids.size(); ++k) {
              changed |= Union(x.kids[k], y.kids[k]);
            }
          } else if (x.kids.size() == y.kids.size()) {
            bool congruent = true;
            for (size_t k = 0; k < x.kids.size() && congruent; ++k) {
              congruent = Find(x.kids[k]) == Find(y.kids[k]);
            }
            if (congruent) changed |= Union(i, j);
          }
        } else if (x.kind == Kind::kCell && y.kind == Kind::kCell &&
                   x.name == y.name && Find(x.kids[0]) == Find(y.kids[0])) {
          if (x.adjust == y.adjust) {
            changed |= Union(i, j);
          } else if (same) {
            return false;
          }
        } else if (same) {
          if (x.kind == Kind::kConst && y.kind == Kind::kConst) return false;
          if ((x.kind == Kind::kTuple && y.kind == Kind::kConst) ||
              (x.kind == Kind::kConst && y.kind == Kind::kTuple)) {
            return false;
          }
        }
      }
    }
    if (!changed && !CellArithmetic(changed)) return false;
  }
  return true;
}

// Cells of one variable at one index differ by their offsets. A known value
// for one of them fixes all the others.
bool Solver::CellArithmetic(bool& changed) {
  absl::flat_hash_map<std::string, std::vector<int>> groups;
  for (size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (t.kind != Kind::kCell) continue;
    groups[absl::StrCat(t.name, std::string(1, '\0'), Find(t.kids[0]))].push_back(
        static_cast<int>(i));
  }
  absl::btree_set<int> needs_int;
  for (int c : int_required_) needs_int.insert(c);
  for (const auto& [key, cells] : groups) {
    std::optional<Value> base;
    bool int_needed = false;
    for (int c : cells) {
      if (needs_int.contains(c)) int_needed = true;
      const Value* k = ClassConst(Find(c));
      if (k == nullptr) continue;
      Value b = *k;
      int64_t adj = terms_[c].adjust;
      if (adj != 0) {
        int64_t raw = 0;
        if (!k->is_int() || __builtin_sub_overflow(k->as_int(), adj, &raw)) {
          return false;
        }
        b = Value::Int(raw);
      }
      if (base && !(*base == b)) return false;
      base = b;
    }
    if (!base) continue;
    if (int_needed && !base->is_int()) return false;
    for (int c : cells) {
      int64_t adj = terms_[c].adjust;
      if (adj == 0) {
        changed |= Union(c, ConstTerm(*base));
      } else if (base->is_int()) {
        int64_t v = 0;
        if (__builtin_add_overflow(base->as_int(), adj, &v)) {
          if (needs_int.contains(c)) return false;
          continue;
        }
        changed |= Union(c, ConstTerm(Value::Int(v)));
      }
    }
  }
  return true;
}

bool Solver::Memberships() {
  absl::flat_hash_map<int, std::vector<const Member*>> by_class;
  for (const Member& m : members_) by_class[Find(m.term)].push_back(&m);
  for (const auto& [rep, ms] : by_class) {
    if (const Value* k = ClassConst(rep)) {
      for (const Member* m : ms) {
        if (k->Matches(Value::MakePrefix(m->prefix.addr, m->prefix.len)) !=
            m->positive) {
          return false;
        }
      }
      continue;
    }
    std::optional<Prefix> p;
    std::vector<Prefix> negs;
    for (const Member* m : ms) {
      if (!m->positive) {
        negs.push_back(m->prefix);
        continue;
      }
      if (p && p->Disjoint(m->prefix)) return false;
      if (!p || m->prefix.len > p->len) p = m->prefix;
    }
    if (!p) continue;
    for (const Prefix& n : negs) {
      if (n.Contains(*p)) return false;
    }
    std::vector<Prefix> inner;
    for (const Prefix& n : negs) {
      if (p->Contains(n)) inner.push_back(n);
    }
    std::vector<uint32_t> excluded;
    for (const auto& [a, b] : diseqs_) {
      int other = -1;
      if (Find(a) == rep) other = Find(b);
      if (Find(b) == rep) other = Find(a);
      if (other < 0) continue;
      const Value* k = ClassConst(other);
      if (k != nullptr && k->is_ip() && p->Contains(k->as_ip())) {
        excluded.push_back(k->as_ip());
      }
    }
    auto blocked = [&](uint32_t ip) {
      for (const Prefix& n : inner) {
        if (n.Contains(ip)) return true;
      }
      return std::find(excluded.begin(), excluded.end(), ip) != excluded.end();
    };
    const uint64_t size = uint64_t{1} << (32 - p->len);
    if (size <= 64) {
      bool any = false;
      for (uint64_t off = 0; off < size && !any; ++off) {
        any = !blocked(p->addr + static_cast<uint32_t>(off));
      }
      if (!any) return false;
      continue;
    }
    std::sort(inner.begin(), inner.end(), [](const Prefix& a, const Prefix& b) {
      return a.addr != b.addr ? a.addr < b.addr : a.len < b.len;
    });
    uint64_t covered = 0;
    std::optional<Prefix> last;
    for (const Prefix& n : inner) {
      if (last && last->Contains(n)) continue;
      covered += uint64_t{1} << (32 - n.len);
      last = n;
    }
    std::sort(excluded.begin(), excluded.end());
    excluded.erase(std::unique(excluded.begin(), excluded.end()), excluded.end());
    for (uint32_t ip : excluded) {
      bool in_neg = false;
      for (const Prefix& n : inner) in_neg |= n.Contains(ip);
      if (!in_neg) ++covered;
    }
    if (covered >= size) return false;
  }
  return true;
}

bool Solver::Check() {
  for (const auto& [a, b] : eqs_) Union(a, b);
  if (!Closure()) return false;
  for (const auto& [a, b] : diseqs_) {
    if (Find(a) == Find(b)) return false;
  }
  return Memberships();
}

void Symbols(const TestAtom& t, absl::btree_set<std::string>& out) {
  switch (t.kind) {
    case TestAtom::Kind::kFieldValue:
      out.insert(t.f1);
      break;
    case TestAtom::Kind::kFieldField:
      out.insert(t.f1);
      out.insert(t.f2);
      break;
    case TestAtom::Kind::kState:
      out.insert(absl::StrCat("$", t.var));
      t.index.CollectFields(out);
      t.rhs.CollectFields(out);
      break;
  }
}

bool Run(const std::vector<Literal>& lits) {
  Solver s;
  for (const Literal& l : lits) s.Add(l);
  return s.Check();
}

}  // namespace

bool Satisfiable(const std::vector<Literal>& lits) { return Run(lits); }

Truth Decide(const std::vector<Literal>& lits, const TestAtom& t) {
  // Only literals connected to `t` through shared symbols can matter.
  absl::btree_set<std::string> syms;
  Symbols(t, syms);
  std::vector<absl::btree_set<std::string>> lit_syms(lits.size());
  for (size_t i = 0; i < lits.size(); ++i) Symbols(*lits[i].test, lit_syms[i]);
  std::vector<bool> used(lits.size(), false);
  std::vector<Literal> relevant;
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t i = 0; i < lits.size(); ++i) {
      if (used[i]) continue;
      bool touches = false;
      for (const std::string& s : lit_syms[i]) {
        if (syms.contains(s)) {
          touches = true;
          break;
        }
      }
      if (!touches) continue;
      used[i] = true;
      grew = true;
      relevant.push_back(lits[i]);
      syms.insert(lit_syms[i].begin(), lit_syms[i].end());
    }
  }
  relevant.push_back({&t, false});
  if (!Run(relevant)) return Truth::kTrue;
  relevant.back().positive = true;
  if (!Run(relevant)) return Truth::kFalse;
  return Truth::kUnknown;
}

}  // namespace snapnet
