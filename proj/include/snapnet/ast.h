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

#ifndef SNAPNET_AST_H_
#define SNAPNET_AST_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/btree_set.h"
#include "snapnet/value.h"

namespace snapnet {

// Packet fields every program has, in addition to declared ones.
const std::vector<std::string>& DefaultFields();

// e ::= v | f | (e, ..., e)
struct Expr {
  enum class Kind { kLit, kField, kTuple };

  Kind kind = Kind::kLit;
  Value lit;
  std::string field;
  std::vector<Expr> elems;

  static Expr Lit(Value v);
  static Expr Field(std::string f);
  static Expr Tuple(std::vector<Expr> elems);

  bool is_lit() const { return kind == Kind::kLit; }
  bool is_field() const { return kind == Kind::kField; }
  bool is_tuple() const { return kind == Kind::kTuple; }

  // Number of index components this expression supplies.
  int Arity() const { return is_tuple() ? static_cast<int>(elems.size()) : 1; }

  // Concrete syntax.
  std::string ToString() const;
  // Canonical encoding used for hashing and ordering.
  std::string Key() const;

  void CollectFields(absl::btree_set<std::string>& out) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator<(const Expr& a, const Expr& b) {
    return a.Key() < b.Key();
  }
};

struct Span {
  int line = 0;
  int col = 0;
};

enum class PolicyKind {
  kId,
  kDrop,
  kTest,       // f = v
  kNeg,        // !x
  kOr,         // x | y
  kAnd,        // x & y
  kStateTest,  // s[e1] = e2
  kMod,        // f <- v
  kStateSet,   // s[e1] <- e2
  kIncr,       // s[e]++
  kDecr,       // s[e]--
  kPar,        // p + q
  kSeq,        // p ; q
  kIf,         // if a then p else q
  kAtomic,     // atomic { p }
};

struct Policy;
using PolicyPtr = std::shared_ptr<const Policy>;

struct Policy {
  PolicyKind kind = PolicyKind::kId;
  // Field name for kTest/kMod, state variable for state operations.
  std::string name;
  Value value;
  Expr index;
  Expr rhs;
  PolicyPtr a, b, c;
  Span span;
};

PolicyPtr Id();
PolicyPtr Drop();
PolicyPtr Test(std::string field, Value v);
PolicyPtr Neg(PolicyPtr x);
PolicyPtr Or(PolicyPtr x, PolicyPtr y);
PolicyPtr And(PolicyPtr x, PolicyPtr y);
PolicyPtr StateTest(std::string var, Expr index, Expr rhs);
PolicyPtr Mod(std::string field, Value v);
PolicyPtr StateSet(std::string var, Expr index, Expr rhs);
PolicyPtr Incr(std::string var, Expr index);
PolicyPtr Decr(std::string var, Expr index);
PolicyPtr Par(PolicyPtr p, PolicyPtr q);
PolicyPtr Seq(PolicyPtr p, PolicyPtr q);
PolicyPtr If(PolicyPtr cond, PolicyPtr p, PolicyPtr q);
PolicyPtr Atomic(PolicyPtr p);

// Structural equality, ignoring source spans.
bool Equal(const Policy& x, const Policy& y);

// True if `p` cannot modify packets or state.
bool IsPredicate(const Policy& p);

struct StateDecl {
  std::string name;
  int arity = 1;
  Value default_value;
};

struct Program {
  // Full field schema, sorted; always contains the default fields.
  std::vector<std::string> fields;
  std::vector<StateDecl> states;
  PolicyPtr assumption;  // null when absent
  PolicyPtr body;

  const StateDecl* FindState(const std::string& name) const;
  bool HasField(const std::string& name) const;
  // `assumption ; body`, or just `body`.
  PolicyPtr Full() const;
};

bool Equal(const Program& x, const Program& y);

// Variables read (state tests, increments) and written anywhere in `p`.
absl::btree_set<std::string> StateVars(const Policy& p);

}  // namespace snapnet

#endif  // SNAPNET_AST_H_
