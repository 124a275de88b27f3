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

#include "snapnet/ast.h"

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace snapnet {

const std::vector<std::string>& DefaultFields() {
  static const auto* fields = new std::vector<std::string>{
      "dstip", "dstport", "inport", "outport", "proto", "srcip", "srcport"};
  return *fields;
}

Expr Expr::Lit(Value v) {
  Expr e;
  e.kind = Kind::kLit;
  e.lit = std::move(v);
  return e;
}

Expr Expr::Field(std::string f) {
  Expr e;
  e.kind = Kind::kField;
  e.field = std::move(f);
  return e;
}

Expr Expr::Tuple(std::vector<Expr> elems) {
  Expr e;
  e.kind = Kind::kTuple;
  e.elems = std::move(elems);
  return e;
}

std::string Expr::ToString() const {
  switch (kind) {
    case Kind::kLit:
      return lit.ToString();
    case Kind::kField:
      return field;
    case Kind::kTuple:
      return absl::StrCat("(",
                          absl::StrJoin(elems, ", ",
                                        [](std::string* out, const Expr& e) {
                                          out->append(e.ToString());
                                        }),
                          ")");
  }
  return "";
}

std::string Expr::Key() const {
  switch (kind) {
    case Kind::kLit:
      return absl::StrCat("L", lit.Encode());
    case Kind::kField:
      return absl::StrCat("F", field, std::string(1, '\0'));
    case Kind::kTuple: {
      std::string out = "T";
      for (const Expr& e : elems) {
        out.push_back('\1');
        out.append(e.Key());
      }
      out.push_back('\0');
      return out;
    }
  }
  return "";
}

void Expr::CollectFields(absl::btree_set<std::string>& out) const {
  if (is_field()) out.insert(field);
  for (const Expr& e : elems) e.CollectFields(out);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::kLit:
      return a.lit == b.lit;
    case Expr::Kind::kField:
      return a.field == b.field;
    case Expr::Kind::kTuple:
      return a.elems == b.elems;
  }
  return false;
}

namespace {

PolicyPtr Make(PolicyKind kind) {
  auto p = std::make_shared<Policy>();
  p->kind = kind;
  return p;
}

std::shared_ptr<Policy> MakeMut(PolicyKind kind) {
  auto p = std::make_shared<Policy>();
  p->kind = kind;
  return p;
}

PolicyPtr Unary(PolicyKind kind, PolicyPtr x) {
  auto p = MakeMut(kind);
  p->a = std::move(x);
  return p;
}

PolicyPtr Binary(PolicyKind kind, PolicyPtr x, PolicyPtr y) {
  auto p = MakeMut(kind);
  p->a = std::move(x);
  p->b = std::move(y);
  return p;
}

void CollectStateVars(const Policy& p, absl::btree_set<std::string>& out) {
  switch (p.kind) {
    case PolicyKind::kStateTest:
    case PolicyKind::kStateSet:
    case PolicyKind::kIncr:
    case PolicyKind::kDecr:
      out.insert(p.name);
      break;
    default:
      break;
  }
  for (const PolicyPtr& child : {p.a, p.b, p.c}) {
    if (child) CollectStateVars(*child, out);
  }
}

}  // namespace

PolicyPtr Id() { return Make(PolicyKind::kId); }
PolicyPtr Drop() { return Make(PolicyKind::kDrop); }

PolicyPtr Test(std::string field, Value v) {
  auto p = MakeMut(PolicyKind::kTest);
  p->name = std::move(field);
  p->value = std::move(v);
  return p;
}

PolicyPtr Neg(PolicyPtr x) { return Unary(PolicyKind::kNeg, std::move(x)); }
PolicyPtr Or(PolicyPtr x, PolicyPtr y) {
  return Binary(PolicyKind::kOr, std::move(x), std::move(y));
}
PolicyPtr And(PolicyPtr x, PolicyPtr y) {
  return Binary(PolicyKind::kAnd, std::move(x), std::move(y));
}

PolicyPtr StateTest(std::string var, Expr index, Expr rhs) {
  auto p = MakeMut(PolicyKind::kStateTest);
  p->name = std::move(var);
  p->index = std::move(index);
  p->rhs = std::move(rhs);
  return p;
}

PolicyPtr Mod(std::string field, Value v) {
  auto p = MakeMut(PolicyKind::kMod);
  p->name = std::move(field);
  p->value = std::move(v);
  return p;
}

PolicyPtr StateSet(std::string var, Expr index, Expr rhs) {
  auto p = MakeMut(PolicyKind::kStateSet);
  p->name = std::move(var);
  p->index = std::move(index);
  p->rhs = std::move(rhs);
  return p;
}

PolicyPtr Incr(std::string var, Expr index) {
  auto p = MakeMut(PolicyKind::kIncr);
  p->name = std::move(var);
  p->index = std::move(index);
  return p;
}

PolicyPtr Decr(std::string var, Expr index) {
  auto p = MakeMut(PolicyKind::kDecr);
  p->name = std::move(var);
  p->index = std::move(index);
  return p;
}

PolicyPtr Par(PolicyPtr p, PolicyPtr q) {
  return Binary(PolicyKind::kPar, std::move(p), std::move(q));
}
PolicyPtr Seq(PolicyPtr p, PolicyPtr q) {
  return Binary(PolicyKind::kSeq, std::move(p), std::move(q));
}

PolicyPtr If(PolicyPtr cond, PolicyPtr p, PolicyPtr q) {
  auto r = MakeMut(PolicyKind::kIf);
  r->a = std::move(cond);
  r->b = std::move(p);
  r->c = std::move(q);
  return r;
}

PolicyPtr Atomic(PolicyPtr p) {
  return Unary(PolicyKind::kAtomic, std::move(p));
}

bool Equal(const Policy& x, const Policy& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case PolicyKind::kTest:
    case PolicyKind::kMod:
      if (x.name != y.name || !(x.value == y.value)) return false;
      break;
    case PolicyKind::kStateTest:
    case PolicyKind::kStateSet:
      if (x.name != y.name || !(x.index == y.index) || !(x.rhs == y.rhs)) {
        return false;
      }
      break;
    case PolicyKind::kIncr:
    case PolicyKind::kDecr:
      if (x.name != y.name || !(x.index == y.index)) return false;
      break;
    default:
      break;
  }
  auto eq = [](const PolicyPtr& a, const PolicyPtr& b) {
    if (!a || !b) return a == b;
    return Equal(*a, *b);
  };
  return eq(x.a, y.a) && eq(x.b, y.b) && eq(x.c, y.c);
}

bool IsPredicate(const Policy& p) {
  switch (p.kind) {
    case PolicyKind::kId:
    case PolicyKind::kDrop:
    case PolicyKind::kTest:
    case PolicyKind::kStateTest:
      return true;
    case PolicyKind::kNeg:
    case PolicyKind::kAtomic:
      return IsPredicate(*p.a);
    case PolicyKind::kOr:
    case PolicyKind::kAnd:
    case PolicyKind::kPar:
    case PolicyKind::kSeq:
      return IsPredicate(*p.a) && IsPredicate(*p.b);
    case PolicyKind::kIf:
      return IsPredicate(*p.a) && IsPredicate(*p.b) && IsPredicate(*p.c);
    case PolicyKind::kMod:
    case PolicyKind::kStateSet:
    case PolicyKind::kIncr:
    case PolicyKind::kDecr:
      return false;
  }
  return false;
}

const StateDecl* Program::FindState(const std::string& name) const {
  for (const StateDecl& d : states) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

bool Program::HasField(const std::string& name) const {
  return std::binary_search(fields.begin(), fields.end(), name);
}

PolicyPtr Program::Full() const {
  if (!assumption) return body;
  return Seq(assumption, body);
}

bool Equal(const Program& x, const Program& y) {
  if (x.fields != y.fields || x.states.size() != y.states.size()) return false;
  for (size_t i = 0; i < x.states.size(); ++i) {
    const StateDecl& a = x.states[i];
    const StateDecl& b = y.states[i];
    if (a.name != b.name || a.arity != b.arity ||
        !(a.default_value == b.default_value)) {
      return false;
    }
  }
  if ((x.assumption == nullptr) != (y.assumption == nullptr)) return false;
  if (x.assumption && !Equal(*x.assumption, *y.assumption)) return false;
  return Equal(*x.body, *y.body);
}

absl::btree_set<std::string> StateVars(const Policy& p) {
  absl::btree_set<std::string> out;
  CollectStateVars(p, out);
  return out;
}

}  // namespace snapnet
