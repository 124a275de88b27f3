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

// Building blocks of decision diagrams: branch tests, action sequences and
// leaves, together with their run-time meaning.

#ifndef SNAPNET_ATOMS_H_
#define SNAPNET_ATOMS_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "absl/container/btree_map.h"
#include "absl/container/btree_set.h"
#include "snapnet/ast.h"
#include "snapnet/interp.h"
#include "snapnet/value.h"

namespace snapnet {

struct TestAtom {
  enum class Kind { kFieldValue = 0, kFieldField = 1, kState = 2 };

  Kind kind = Kind::kFieldValue;
  std::string f1;  // kFieldValue, kFieldField
  std::string f2;  // kFieldField; f1 < f2
  Value v;         // kFieldValue; may be a prefix
  std::string var;  // kState
  Expr index;
  Expr rhs;
  // kState holds when cell + adjust == rhs.
  int64_t adjust = 0;

  static TestAtom FieldValue(std::string f, Value v);
  // Orders the two fields; f != g.
  static TestAtom FieldField(std::string f, std::string g);
  static TestAtom State(std::string var, Expr index, Expr rhs, int64_t adjust = 0);

  // Identity of the test.
  std::string Key() const;
  std::string ToString() const;

  // Meaning over an input packet and store.
  bool Eval(const Packet& pkt, const Store& store) const;
};

struct StateAtom {
  enum class Op { kSet, kIncr, kDecr };
  Op op = Op::kSet;
  Expr index;
  Expr value;  // kSet only

  std::string Key() const;
  std::string ToString(const std::string& var) const;
  friend bool operator==(const StateAtom& a, const StateAtom& b) {
    return a.op == b.op && a.index == b.index && a.value == b.value;
  }
};

using WriteList = std::vector<StateAtom>;

// A normalized action sequence. All expressions refer to the packet as it
// entered the program; field modifications take effect at the end.
struct ActionSeq {
  absl::btree_map<std::string, WriteList> writes;
  absl::btree_map<std::string, Value> mods;
  bool drop = false;

  bool IsId() const { return writes.empty() && mods.empty() && !drop; }
  bool IsPureDrop() const { return drop && writes.empty(); }

  std::string Key() const;
  std::string ToString() const;
};

// Leaf of a decision diagram. `undefined` marks inputs on which the policy
// has no meaning because of conflicting state accesses.
struct Leaf {
  bool undefined = false;
  std::string race_var;
  std::vector<ActionSeq> seqs;  // sorted by Key, unique
  absl::btree_set<LogEntry> log;

  static Leaf Of(std::vector<ActionSeq> seqs, absl::btree_set<LogEntry> log);
  static Leaf Undefined(std::string var);

  bool IsIdLeaf() const;
  bool IsDropLeaf() const;

  std::string Key() const;
  std::string ToString() const;
};

// Applies `atoms` to `table` in order; expressions read `input`.
void ApplyAtoms(const WriteList& atoms, const Packet& input, Table& table);

// The write list of `var` that subsumes all others in the leaf, or nullptr
// if the leaf does not write `var`. Throws EvalError when two sequences
// disagree (not prefix-related).
const WriteList* DominantWrites(const Leaf& leaf, const std::string& var);

// Variables written by some sequence of the leaf.
absl::btree_set<std::string> WrittenVars(const Leaf& leaf);

// Runs a (defined) leaf: the store is updated in place and the output
// packets are returned.
std::set<Packet> ExecLeaf(const Leaf& leaf, const Packet& input, Store& store);

// The packet produced by one sequence, or nothing for a dropping sequence.
bool ApplyMods(const ActionSeq& seq, const Packet& input, Packet& out);

Expr SubstFields(const Expr& e, const absl::btree_map<std::string, Value>& mods);

}  // namespace snapnet

#endif  // SNAPNET_ATOMS_H_
