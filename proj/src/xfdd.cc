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

#include "snapnet/xfdd.h"

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"

namespace snapnet {

struct Manager::CondNode {
  bool leaf = true;
  bool value = false;
  TestAtom test;
  Cond t, f;
};

namespace {

std::string OrderKey(const TestAtom& t, const OrderSpec& ord) {
  std::string out(1, static_cast<char>(t.kind));
  switch (t.kind) {
    case TestAtom::Kind::kFieldValue:
      absl::StrAppend(&out, t.f1, std::string(1, '\0'), t.v.Encode());
      break;
    case TestAtom::Kind::kFieldField:
      absl::StrAppend(&out, t.f1, std::string(1, '\0'), t.f2,
                      std::string(1, '\0'));
      break;
    case TestAtom::Kind::kState: {
      uint32_t rank = static_cast<uint32_t>(ord.Rank(t.var));
      for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((rank >> (8 * i)) & 0xff));
      out += t.Key().substr(1);
      break;
    }
  }
  return out;
}

std::optional<std::string> ConflictVar(const absl::btree_set<LogEntry>& a,
                                       const absl::btree_set<LogEntry>& b) {
  for (const LogEntry& w : a) {
    if (!w.write) continue;
    if (b.contains(LogEntry{true, w.var}) || b.contains(LogEntry{false, w.var})) {
      return w.var;
    }
  }
  for (const LogEntry& w : b) {
    if (!w.write) continue;
    if (a.contains(LogEntry{false, w.var})) return w.var;
  }
  return std::nullopt;
}

int64_t Checked(int64_t a, int64_t b, bool& ok) {
  int64_t out = 0;
  ok = !__builtin_add_overflow(a, b, &out);
  return out;
}

}  // namespace

Manager::Manager(OrderSpec ord) : ord_(std::move(ord)) {
  ctx_lits_.push_back({});
  ctx_ids_[{}] = kEmptyCtx;
}

Manager::~Manager() = default;

int Manager::InternTest(const TestAtom& t) {
  auto [it, inserted] =
      test_ids_.try_emplace(t.Key(), static_cast<int>(tests_.size()));
  if (inserted) {
    tests_.push_back(t);
    test_order_key_.push_back(OrderKey(t, ord_));
  }
  return it->second;
}

int Manager::InternSeq(const ActionSeq& s) {
  auto [it, inserted] =
      seq_ids_.try_emplace(s.Key(), static_cast<int>(seqs_.size()));
  if (inserted) seqs_.push_back(s);
  return it->second;
}

bool Manager::Before(int a, int b) const {
  return test_order_key_[a] < test_order_key_[b];
}

int Manager::CompareTests(const TestAtom& a, const TestAtom& b) const {
  return OrderKey(a, ord_).compare(OrderKey(b, ord_));
}

NodeId Manager::Leaf(const snapnet::Leaf& leaf) {
  auto [it, inserted] =
      leaf_ids_.try_emplace(leaf.Key(), static_cast<int>(leaves_.size()));
  if (inserted) leaves_.push_back(leaf);
  auto [nit, ninserted] =
      leaf_nodes_.try_emplace(it->second, static_cast<NodeId>(nodes_.size()));
  if (ninserted) nodes_.push_back(Node{-1, -1, -1, it->second});
  return nit->second;
}

NodeId Manager::IdLeaf() { return Leaf(snapnet::Leaf::Of({ActionSeq{}}, {})); }

NodeId Manager::DropLeaf() {
  ActionSeq d;
  d.drop = true;
  return Leaf(snapnet::Leaf::Of({d}, {}));
}

NodeId Manager::Mk(int test, NodeId hi, NodeId lo) {
  if (hi == lo) return hi;
  auto [it, inserted] = branch_ids_.try_emplace(
      std::make_tuple(test, hi, lo), static_cast<NodeId>(nodes_.size()));
  if (inserted) nodes_.push_back(Node{test, hi, lo, -1});
  return it->second;
}

NodeId Manager::Branch(const TestAtom& t, NodeId hi, NodeId lo) {
  return Mk(InternTest(t), hi, lo);
}

Manager::Ctx Manager::Extend(Ctx ctx, int test, bool positive) {
  std::vector<int> lits = ctx_lits_[ctx];
  int lit = test * 2 + (positive ? 0 : 1);
  auto pos = std::lower_bound(lits.begin(), lits.end(), lit);
  if (pos != lits.end() && *pos == lit) return ctx;
  lits.insert(pos, lit);
  auto [it, inserted] =
      ctx_ids_.try_emplace(lits, static_cast<Ctx>(ctx_lits_.size()));
  if (inserted) ctx_lits_.push_back(std::move(lits));
  return it->second;
}

Truth Manager::Decide(Ctx ctx, int test) {
  if (ctx == kEmptyCtx) {
    std::vector<Literal> none;
    auto key = std::make_pair(ctx, test);
    auto it = decide_memo_.find(key);
    if (it != decide_memo_.end()) return it->second;
    Truth r = snapnet::Decide(none, tests_[test]);
    decide_memo_[key] = r;
    return r;
  }
  auto key = std::make_pair(ctx, test);
  auto it = decide_memo_.find(key);
  if (it != decide_memo_.end()) return it->second;
  const std::vector<int>& ids = ctx_lits_[ctx];
  Truth r = Truth::kUnknown;
  if (std::binary_search(ids.begin(), ids.end(), test * 2)) {
    r = Truth::kTrue;
  } else if (std::binary_search(ids.begin(), ids.end(), test * 2 + 1)) {
    r = Truth::kFalse;
  } else {
    std::vector<Literal> lits;
    lits.reserve(ids.size());
    for (int id : ids) lits.push_back({&tests_[id / 2], id % 2 == 0});
    r = snapnet::Decide(lits, tests_[test]);
  }
  decide_memo_[key] = r;
  return r;
}

NodeId Manager::Peel(NodeId d, Ctx ctx) {
  while (!IsLeaf(d)) {
    Truth t = Decide(ctx, nodes_[d].test);
    if (t == Truth::kUnknown) break;
    d = t == Truth::kTrue ? nodes_[d].hi : nodes_[d].lo;
  }
  return d;
}

NodeId Manager::RefineIn(NodeId d, Ctx ctx) {
  d = Peel(d, ctx);
  if (IsLeaf(d)) return d;
  auto key = std::make_pair(d, ctx);
  auto it = refine_memo_.find(key);
  if (it != refine_memo_.end()) return it->second;
  int t = nodes_[d].test;
  NodeId hi = RefineIn(nodes_[d].hi, Extend(ctx, t, true));
  NodeId lo = RefineIn(nodes_[d].lo, Extend(ctx, t, false));
  NodeId r = Mk(t, hi, lo);
  refine_memo_[key] = r;
  return r;
}

NodeId Manager::Refine(NodeId d,
                       const std::vector<std::pair<TestAtom, bool>>& lits) {
  Ctx ctx = kEmptyCtx;
  for (const auto& [t, pos] : lits) ctx = Extend(ctx, InternTest(t), pos);
  return RefineIn(d, ctx);
}

// `t ? x : y` placed at its position in the test order.
NodeId Manager::Select(int t, NodeId x, NodeId y, Ctx ctx) {
  switch (Decide(ctx, t)) {
    case Truth::kTrue:
      return RefineIn(x, ctx);
    case Truth::kFalse:
      return RefineIn(y, ctx);
    case Truth::kUnknown:
      break;
  }
  auto key = std::make_tuple(t, x, y, ctx);
  auto it = select_memo_.find(key);
  if (it != select_memo_.end()) return it->second;
  Ctx ct = Extend(ctx, t, true);
  Ctx cf = Extend(ctx, t, false);
  NodeId xp = Peel(x, ct);
  NodeId yp = Peel(y, cf);
  int m = t;
  if (!IsLeaf(xp) && Before(nodes_[xp].test, m)) m = nodes_[xp].test;
  if (!IsLeaf(yp) && Before(nodes_[yp].test, m)) m = nodes_[yp].test;
  NodeId r;
  if (m == t) {
    r = Mk(t, RefineIn(xp, ct), RefineIn(yp, cf));
  } else {
    auto cof = [&](NodeId d, bool hi) {
      if (IsLeaf(d) || nodes_[d].test != m) return d;
      return hi ? nodes_[d].hi : nodes_[d].lo;
    };
    NodeId a = Select(t, cof(xp, true), cof(yp, true), Extend(ctx, m, true));
    NodeId b = Select(t, cof(xp, false), cof(yp, false), Extend(ctx, m, false));
    r = Mk(m, a, b);
  }
  select_memo_[key] = r;
  return r;
}

snapnet::Leaf Manager::CombineLeaves(const std::vector<const snapnet::Leaf*>& ls,
                                     bool checked,
                                     const snapnet::Leaf* base) const {
  for (const snapnet::Leaf* l : ls) {
    if (l->undefined) return *l;
  }
  if (checked) {
    for (size_t i = 0; i < ls.size(); ++i) {
      for (size_t j = i + 1; j < ls.size(); ++j) {
        if (auto var = ConflictVar(ls[i]->log, ls[j]->log)) {
          return snapnet::Leaf::Undefined(*var);
        }
      }
    }
  }
  std::vector<ActionSeq> seqs;
  absl::btree_set<LogEntry> log;
  if (base != nullptr) log = base->log;
  for (const snapnet::Leaf* l : ls) {
    seqs.insert(seqs.end(), l->seqs.begin(), l->seqs.end());
    log.insert(l->log.begin(), l->log.end());
  }
  return snapnet::Leaf::Of(std::move(seqs), std::move(log));
}

// Pointwise combination of several diagrams.
NodeId Manager::ApplyN(const std::vector<NodeId>& in, bool checked,
                       int base_leaf, Ctx ctx) {
  std::vector<NodeId> ds;
  ds.reserve(in.size());
  for (NodeId d : in) ds.push_back(Peel(d, ctx));
  std::string key = absl::StrCat(checked ? "c" : "u", base_leaf, ":", ctx);
  for (NodeId d : ds) absl::StrAppend(&key, ",", d);
  auto it = apply_memo_.find(key);
  if (it != apply_memo_.end()) return it->second;

  int m = -1;
  for (NodeId d : ds) {
    if (IsLeaf(d)) continue;
    if (m < 0 || Before(nodes_[d].test, m)) m = nodes_[d].test;
  }
  NodeId r;
  if (m < 0) {
    std::vector<const snapnet::Leaf*> ls;
    for (NodeId d : ds) ls.push_back(&LeafOf(d));
    r = Leaf(CombineLeaves(ls, checked,
                           base_leaf < 0 ? nullptr : &leaves_[base_leaf]));
  } else {
    std::vector<NodeId> his, los;
    for (NodeId d : ds) {
      bool split = !IsLeaf(d) && nodes_[d].test == m;
      his.push_back(split ? nodes_[d].hi : d);
      los.push_back(split ? nodes_[d].lo : d);
    }
    NodeId a = ApplyN(his, checked, base_leaf, Extend(ctx, m, true));
    NodeId b = ApplyN(los, checked, base_leaf, Extend(ctx, m, false));
    r = Mk(m, a, b);
  }
  apply_memo_[key] = r;
  return r;
}

NodeId Manager::Plus(NodeId a, NodeId b) {
  return ApplyN({std::min(a, b), std::max(a, b)}, true, -1, kEmptyCtx);
}

NodeId Manager::PlusUnchecked(NodeId a, NodeId b) {
  return ApplyN({std::min(a, b), std::max(a, b)}, false, -1, kEmptyCtx);
}

NodeId Manager::Seq(NodeId a, NodeId b) { return Seq(a, b, kEmptyCtx); }

NodeId Manager::Seq(NodeId x, NodeId y, Ctx ctx) {
  x = Peel(x, ctx);
  auto key = std::make_tuple(x, y, ctx);
  auto it = seq_memo_.find(key);
  if (it != seq_memo_.end()) return it->second;
  NodeId r;
  if (IsLeaf(x)) {
    r = SeqLeaf(x, y, ctx);
  } else {
    int t = nodes_[x].test;
    NodeId a = Seq(nodes_[x].hi, y, Extend(ctx, t, true));
    NodeId b = Seq(nodes_[x].lo, y, Extend(ctx, t, false));
    r = Select(t, a, b, ctx);
  }
  seq_memo_[key] = r;
  return r;
}

// Runs `y` on every packet the leaf `x` emits. All runs start from the
// store produced by the leaf, so each run is prefixed with the leaf's
// combined writes. Runs that emit equal packets are one run; the input
// space is split on the field equalities that decide this.
NodeId Manager::SeqLeaf(NodeId x, NodeId y, Ctx ctx) {
  const snapnet::Leaf& l = LeafOf(x);
  if (l.undefined) return x;
  absl::btree_map<std::string, WriteList> w;
  try {
    for (const std::string& var : WrittenVars(l)) w[var] = *DominantWrites(l, var);
  } catch (const EvalError& e) {
    throw CompileError(absl::StrCat("internal: ", e.what()));
  }
  std::vector<ActionSeq> runs;
  absl::flat_hash_set<std::string> seen;
  for (const ActionSeq& s : l.seqs) {
    if (s.drop) continue;
    ActionSeq r;
    r.writes = w;
    r.mods = s.mods;
    if (seen.insert(r.Key()).second) runs.push_back(std::move(r));
  }
  if (runs.empty()) return x;
  std::vector<size_t> active;
  return SplitRuns(runs, 0, active, y, nodes_[x].leaf, ctx);
}

NodeId Manager::SplitRuns(const std::vector<ActionSeq>& runs, size_t j,
                          std::vector<size_t>& active, NodeId y, int base_leaf,
                          Ctx ctx) {
  if (j == runs.size()) {
    std::vector<NodeId> ds;
    for (size_t i : active) ds.push_back(SeqAct(InternSeq(runs[i]), y, ctx));
    return ApplyN(ds, true, base_leaf, ctx);
  }
  // Does run j emit the same packet as an earlier included run?
  bool all_false = true;
  int undecided = -1;
  for (size_t i : active) {
    const auto& mi = runs[i].mods;
    const auto& mj = runs[j].mods;
    absl::btree_set<std::string> fields;
    for (const auto& [f, v] : mi) fields.insert(f);
    for (const auto& [f, v] : mj) fields.insert(f);
    bool eq_false = false;
    bool eq_true = true;
    int first_unknown = -1;
    for (const std::string& f : fields) {
      auto a = mi.find(f);
      auto b = mj.find(f);
      if (a != mi.end() && b != mj.end()) {
        if (!(a->second == b->second)) eq_false = true;
        continue;
      }
      const Value& v = a != mi.end() ? a->second : b->second;
      int t = InternTest(TestAtom::FieldValue(f, v));
      switch (Decide(ctx, t)) {
        case Truth::kFalse:
          eq_false = true;
          break;
        case Truth::kTrue:
          break;
        case Truth::kUnknown:
          eq_true = false;
          if (first_unknown < 0) first_unknown = t;
          break;
      }
      if (eq_false) break;
    }
    if (eq_false) continue;
    all_false = false;
    if (eq_true) return SplitRuns(runs, j + 1, active, y, base_leaf, ctx);
    if (undecided < 0) undecided = first_unknown;
  }
  if (all_false) {
    active.push_back(j);
    NodeId r = SplitRuns(runs, j + 1, active, y, base_leaf, ctx);
    active.pop_back();
    return r;
  }
  NodeId a = SplitRuns(runs, j, active, y, base_leaf, Extend(ctx, undecided, true));
  NodeId b = SplitRuns(runs, j, active, y, base_leaf, Extend(ctx, undecided, false));
  return Select(undecided, a, b, ctx);
}

ActionSeq Manager::Compose(const ActionSeq& as, const ActionSeq& b) const {
  ActionSeq out = as;
  for (const auto& [var, atoms] : b.writes) {
    WriteList& dst = out.writes[var];
    for (const StateAtom& a : atoms) {
      dst.push_back(StateAtom{a.op, SubstFields(a.index, as.mods),
                              SubstFields(a.value, as.mods)});
    }
  }
  for (const auto& [f, v] : b.mods) out.mods[f] = v;
  if (b.drop) {
    out.drop = true;
    out.mods.clear();
  }
  return out;
}

// `as ; y` with the tests of `y` rewritten to input terms.
NodeId Manager::SeqAct(int seq, NodeId y, Ctx ctx) {
  auto key = std::make_tuple(seq, y, ctx);
  auto it = seqact_memo_.find(key);
  if (it != seqact_memo_.end()) return it->second;
  NodeId r;
  if (IsLeaf(y)) {
    const snapnet::Leaf& l = LeafOf(y);
    if (l.undefined) {
      r = y;
    } else {
      std::vector<ActionSeq> out;
      for (const ActionSeq& b : l.seqs) out.push_back(Compose(seqs_[seq], b));
      absl::btree_set<LogEntry> log = l.log;
      r = Leaf(snapnet::Leaf::Of(std::move(out), std::move(log)));
    }
  } else {
    Cond c = Rewrite(tests_[nodes_[y].test], seqs_[seq]);
    NodeId hi = nodes_[y].hi;
    NodeId lo = nodes_[y].lo;
    r = IteCond(c, SeqAct(seq, hi, ctx), SeqAct(seq, lo, ctx), ctx);
  }
  seqact_memo_[key] = r;
  return r;
}

NodeId Manager::IteCond(const Cond& c, NodeId x, NodeId y, Ctx ctx) {
  if (c->leaf) return c->value ? x : y;
  int t = InternTest(c->test);
  switch (Decide(ctx, t)) {
    case Truth::kTrue:
      return IteCond(c->t, x, y, ctx);
    case Truth::kFalse:
      return IteCond(c->f, x, y, ctx);
    case Truth::kUnknown:
      break;
  }
  NodeId a = IteCond(c->t, x, y, Extend(ctx, t, true));
  NodeId b = IteCond(c->f, x, y, Extend(ctx, t, false));
  return Select(t, a, b, ctx);
}

Manager::Cond Manager::Const(bool b) const {
  auto n = std::make_shared<CondNode>();
  n->value = b;
  return n;
}

Manager::Cond Manager::Atom(const TestAtom& t) {
  auto n = std::make_shared<CondNode>();
  n->leaf = false;
  n->test = t;
  n->t = Const(true);
  n->f = Const(false);
  return n;
}

Manager::Cond Manager::Ite(const Cond& c, const Cond& a, const Cond& b) {
  if (c->leaf) return c->value ? a : b;
  auto n = std::make_shared<CondNode>();
  n->leaf = false;
  n->test = c->test;
  n->t = Ite(c->t, a, b);
  n->f = Ite(c->f, a, b);
  return n;
}

Manager::Cond Manager::And(const Cond& a, const Cond& b) {
  return Ite(a, b, Const(false));
}

Manager::Cond Manager::ExprEq(const Expr& a, const Expr& b) {
  if (a.is_tuple() || b.is_tuple()) {
    if (!a.is_tuple()) return ExprEq(b, a);
    std::vector<Expr> rhs;
    if (b.is_tuple()) {
      rhs = b.elems;
    } else if (b.is_lit() && b.lit.is_tuple()) {
      for (const Value& v : b.lit.as_tuple()) rhs.push_back(Expr::Lit(v));
    } else {
      return Const(false);
    }
    if (rhs.size() != a.elems.size()) return Const(false);
    Cond out = Const(true);
    for (size_t i = a.elems.size(); i-- > 0;) {
      out = And(ExprEq(a.elems[i], rhs[i]), out);
    }
    return out;
  }
  if (a.is_lit() && b.is_lit()) return Const(a.lit == b.lit);
  if (a.is_lit()) return Atom(TestAtom::FieldValue(b.field, a.lit));
  if (b.is_lit()) return Atom(TestAtom::FieldValue(a.field, b.lit));
  if (a.field == b.field) return Const(true);
  return Atom(TestAtom::FieldField(a.field, b.field));
}

Manager::Cond Manager::MakeStateTest(const std::string& var, const Expr& index,
                                     const Expr& rhs, int64_t adjust) {
  if (adjust != 0) {
    if (rhs.is_tuple()) return Const(false);
    if (rhs.is_lit()) {
      if (!rhs.lit.is_int()) return Const(false);
      bool ok = true;
      int64_t v = Checked(rhs.lit.as_int(), -adjust, ok);
      if (!ok) return Const(false);
      return Atom(TestAtom::State(var, index, Expr::Lit(Value::Int(v)), 0));
    }
  }
  return Atom(TestAtom::State(var, index, rhs, adjust));
}

// value + adjust == rhs
Manager::Cond Manager::ValueEq(const Expr& value, const Expr& rhs,
                               int64_t adjust) {
  if (adjust == 0) return ExprEq(value, rhs);
  if (value.is_tuple() || rhs.is_tuple()) return Const(false);
  bool ok = true;
  if (value.is_lit()) {
    if (!value.lit.is_int()) return Const(false);
    int64_t v = Checked(value.lit.as_int(), adjust, ok);
    if (!ok) return Const(false);
    return ExprEq(Expr::Lit(Value::Int(v)), rhs);
  }
  if (rhs.is_lit()) {
    if (!rhs.lit.is_int()) return Const(false);
    int64_t v = Checked(rhs.lit.as_int(), -adjust, ok);
    if (!ok) return Const(false);
    return ExprEq(value, Expr::Lit(Value::Int(v)));
  }
  throw CompileError(absl::StrCat("cannot compare ", value.ToString(),
                                  " plus a constant with ", rhs.ToString()));
}

// Value of var[index] + adjust == rhs after `writes[0..k]`, as a condition
// on the input.
Manager::Cond Manager::Resolve(const std::string& var, const WriteList& writes,
                               int k, const Expr& index, const Expr& rhs,
                               int64_t adjust) {
  if (k < 0) return MakeStateTest(var, index, rhs, adjust);
  const StateAtom& w = writes[k];
  Cond same = ExprEq(w.index, index);
  switch (w.op) {
    case StateAtom::Op::kSet:
      return Ite(same, ValueEq(w.value, rhs, adjust),
                 Resolve(var, writes, k - 1, index, rhs, adjust));
    case StateAtom::Op::kIncr:
    case StateAtom::Op::kDecr: {
      bool ok = true;
      int64_t shifted =
          Checked(adjust, w.op == StateAtom::Op::kIncr ? 1 : -1, ok);
      if (!ok) throw CompileError("offset overflow in state test");
      return Ite(same, Resolve(var, writes, k - 1, index, rhs, shifted),
                 Resolve(var, writes, k - 1, index, rhs, adjust));
    }
  }
  return Const(false);
}

Manager::Cond Manager::Rewrite(const TestAtom& t, const ActionSeq& as) {
  switch (t.kind) {
    case TestAtom::Kind::kFieldValue: {
      auto it = as.mods.find(t.f1);
      if (it == as.mods.end()) return Atom(t);
      return Const(it->second.Matches(t.v));
    }
    case TestAtom::Kind::kFieldField:
      return ExprEq(SubstFields(Expr::Field(t.f1), as.mods),
                    SubstFields(Expr::Field(t.f2), as.mods));
    case TestAtom::Kind::kState: {
      Expr index = SubstFields(t.index, as.mods);
      Expr rhs = SubstFields(t.rhs, as.mods);
      auto it = as.writes.find(t.var);
      if (it == as.writes.end()) {
        return MakeStateTest(t.var, index, rhs, t.adjust);
      }
      return Resolve(t.var, it->second, static_cast<int>(it->second.size()) - 1,
                     index, rhs, t.adjust);
    }
  }
  return Const(false);
}

NodeId Manager::Neg(NodeId a) { return Neg(a, kEmptyCtx); }

NodeId Manager::Neg(NodeId a, Ctx ctx) {
  auto key = std::make_pair(a, ctx);
  auto it = neg_memo_.find(key);
  if (it != neg_memo_.end()) return it->second;
  NodeId r;
  if (IsLeaf(a)) {
    const snapnet::Leaf& l = LeafOf(a);
    if (l.undefined) {
      r = a;
    } else if (l.IsIdLeaf() || l.IsDropLeaf()) {
      ActionSeq s;
      s.drop = l.IsIdLeaf();
      absl::btree_set<LogEntry> log = l.log;
      r = Leaf(snapnet::Leaf::Of({s}, std::move(log)));
    } else {
      throw CompileError("negation of a policy that is not a predicate");
    }
  } else {
    r = Mk(nodes_[a].test, Neg(nodes_[a].hi, ctx), Neg(nodes_[a].lo, ctx));
  }
  neg_memo_[key] = r;
  return r;
}

NodeId Manager::Restrict(NodeId d, const TestAtom& t, bool positive) {
  int id = InternTest(t);
  NodeId drop = DropLeaf();
  return positive ? Select(id, d, drop, kEmptyCtx)
                  : Select(id, drop, d, kEmptyCtx);
}

NodeId Manager::FromPolicy(const Policy& p) {
  switch (p.kind) {
    case PolicyKind::kId:
      return IdLeaf();
    case PolicyKind::kDrop:
      return DropLeaf();
    case PolicyKind::kTest:
      return Select(InternTest(TestAtom::FieldValue(p.name, p.value)), IdLeaf(),
                    DropLeaf(), kEmptyCtx);
    case PolicyKind::kStateTest: {
      absl::btree_set<LogEntry> log = {LogEntry{false, p.name}};
      ActionSeq drop;
      drop.drop = true;
      NodeId yes = Leaf(snapnet::Leaf::Of({ActionSeq{}}, log));
      NodeId no = Leaf(snapnet::Leaf::Of({drop}, log));
      return IteCond(MakeStateTest(p.name, p.index, p.rhs, 0), yes, no,
                     kEmptyCtx);
    }
    case PolicyKind::kMod: {
      ActionSeq s;
      s.mods[p.name] = p.value;
      return Leaf(snapnet::Leaf::Of({s}, {}));
    }
    case PolicyKind::kStateSet:
    case PolicyKind::kIncr:
    case PolicyKind::kDecr: {
      StateAtom a;
      a.op = p.kind == PolicyKind::kStateSet
                 ? StateAtom::Op::kSet
                 : (p.kind == PolicyKind::kIncr ? StateAtom::Op::kIncr
                                                : StateAtom::Op::kDecr);
      a.index = p.index;
      if (a.op == StateAtom::Op::kSet) a.value = p.rhs;
      ActionSeq s;
      s.writes[p.name].push_back(a);
      return Leaf(snapnet::Leaf::Of({s}, {LogEntry{true, p.name}}));
    }
    case PolicyKind::kNeg:
      return Neg(FromPolicy(*p.a));
    case PolicyKind::kOr:
    case PolicyKind::kPar:
      return Plus(FromPolicy(*p.a), FromPolicy(*p.b));
    case PolicyKind::kAnd:
    case PolicyKind::kSeq:
      return Seq(FromPolicy(*p.a), FromPolicy(*p.b));
    case PolicyKind::kIf: {
      NodeId x = FromPolicy(*p.a);
      NodeId yes = Seq(x, FromPolicy(*p.b));
      NodeId no = Seq(Neg(x), FromPolicy(*p.c));
      return PlusUnchecked(yes, no);
    }
    case PolicyKind::kAtomic:
      return FromPolicy(*p.a);
  }
  throw CompileError("unknown policy construct");
}

NodeId Manager::Walk(NodeId d, const Store& store, const Packet& pkt) const {
  while (!IsLeaf(d)) {
    d = TestOf(d).Eval(pkt, store) ? Hi(d) : Lo(d);
  }
  return d;
}

std::optional<EvalResult> Manager::Eval(NodeId d, const Store& store,
                                        const Packet& pkt) const {
  const snapnet::Leaf& l = LeafOf(Walk(d, store, pkt));
  if (l.undefined) return std::nullopt;
  EvalResult r;
  r.store = store;
  r.packets = ExecLeaf(l, pkt, r.store);
  r.log.assign(l.log.begin(), l.log.end());
  return r;
}

std::vector<NodeId> Manager::PreOrder(NodeId root) const {
  std::vector<NodeId> out;
  absl::flat_hash_set<NodeId> seen;
  std::vector<NodeId> stack = {root};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    out.push_back(n);
    if (!IsLeaf(n)) {
      stack.push_back(Lo(n));
      stack.push_back(Hi(n));
    }
  }
  return out;
}

std::string Manager::ToDot(NodeId root) const {
  std::vector<NodeId> order = PreOrder(root);
  absl::flat_hash_map<NodeId, int> num;
  for (size_t i = 0; i < order.size(); ++i) num[order[i]] = static_cast<int>(i) + 1;
  auto esc = [](const std::string& s) {
    return absl::StrReplaceAll(s, {{"\\", "\\\\"}, {"\"", "\\\""}});
  };
  std::string out = "digraph xfdd {\n";
  for (NodeId n : order) {
    if (IsLeaf(n)) {
      absl::StrAppend(&out, "  n", num[n], " [shape=box, label=\"", num[n], ": ",
                      esc(LeafOf(n).ToString()), "\"];\n");
    } else {
      absl::StrAppend(&out, "  n", num[n], " [shape=ellipse, label=\"", num[n],
                      ": ", esc(TestOf(n).ToString()), "\"];\n");
    }
  }
  for (NodeId n : order) {
    if (IsLeaf(n)) continue;
    absl::StrAppend(&out, "  n", num[n], " -> n", num[Hi(n)], ";\n");
    absl::StrAppend(&out, "  n", num[n], " -> n", num[Lo(n)],
                    " [style=dashed];\n");
  }
  out += "}\n";
  return out;
}

bool Manager::WellFormed(NodeId root, std::string* why) {
  absl::flat_hash_set<std::pair<NodeId, Ctx>> seen;
  std::function<bool(NodeId, Ctx, int)> visit = [&](NodeId n, Ctx ctx,
                                                    int prev) -> bool {
    if (IsLeaf(n)) return true;
    if (!seen.insert({n, ctx}).second) return true;
    int t = nodes_[n].test;
    if (prev >= 0 && !Before(prev, t)) {
      if (why) *why = absl::StrCat("test out of order: ", tests_[t].ToString());
      return false;
    }
    if (Decide(ctx, t) != Truth::kUnknown) {
      if (why) *why = absl::StrCat("redundant test: ", tests_[t].ToString());
      return false;
    }
    return visit(nodes_[n].hi, Extend(ctx, t, true), t) &&
           visit(nodes_[n].lo, Extend(ctx, t, false), t);
  };
  return visit(root, kEmptyCtx, -1);
}

void Manager::ForEachPath(
    NodeId root,
    const std::function<void(const std::vector<Literal>&, NodeId)>& fn) const {
  std::vector<Literal> path;
  std::function<void(NodeId)> visit = [&](NodeId n) {
    if (IsLeaf(n)) {
      fn(path, n);
      return;
    }
    path.push_back({&tests_[nodes_[n].test], true});
    visit(nodes_[n].hi);
    path.back().positive = false;
    visit(nodes_[n].lo);
    path.pop_back();
  };
  visit(root);
}

std::optional<RaceReport> CheckRaces(const Manager& m, NodeId root) {
  for (NodeId n : m.PreOrder(root)) {
    if (!m.IsLeaf(n)) continue;
    const Leaf& l = m.LeafOf(n);
    if (l.undefined) return RaceReport{n, l.race_var};
    for (const std::string& var : WrittenVars(l)) {
      try {
        DominantWrites(l, var);
      } catch (const EvalError&) {
        return RaceReport{n, var};
      }
    }
  }
  return std::nullopt;
}

NodeId Compile(Manager& m, const Policy& p) {
  NodeId d = m.FromPolicy(p);
  if (auto race = CheckRaces(m, d)) throw RaceError(race->var, race->leaf);
  return d;
}

}  // namespace snapnet
