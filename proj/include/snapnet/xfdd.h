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

// Extended forwarding decision diagrams.
//
// A diagram is an ordered decision diagram whose branch nodes test packet
// fields or state cells and whose leaves hold sets of action sequences.
// Diagrams are hash-consed inside a `Manager`; a `NodeId` is only
// meaningful together with the manager that created it.
//
// Every test in a diagram refers to the packet and store as they were when
// the packet entered the program. Sequential composition rewrites the tests
// of its right operand through the actions of its left operand.
//
// Leaves may be undefined: the policy has no meaning on inputs reaching
// them because of conflicting state accesses. `CheckRaces` reports those.

#ifndef SNAPNET_XFDD_H_
#define SNAPNET_XFDD_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "snapnet/atoms.h"
#include "snapnet/context.h"
#include "snapnet/deps.h"
#include "snapnet/interp.h"

namespace snapnet {

using NodeId = int32_t;

// A policy construct the compiler cannot translate.
class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RaceError : public CompileError {
 public:
  RaceError(std::string var, NodeId leaf)
      : CompileError("conflicting accesses to state variable " + var),
        var_(std::move(var)),
        leaf_(leaf) {}
  const std::string& var() const { return var_; }
  NodeId leaf() const { return leaf_; }

 private:
  std::string var_;
  NodeId leaf_;
};

class Manager {
 public:
  using Ctx = int32_t;
  static constexpr Ctx kEmptyCtx = 0;

  explicit Manager(OrderSpec ord);
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;
  ~Manager();

  const OrderSpec& order() const { return ord_; }

  // Translation of a policy. Undefined leaves are kept; see CheckRaces.
  NodeId FromPolicy(const Policy& p);

  NodeId Leaf(const snapnet::Leaf& leaf);
  NodeId IdLeaf();
  NodeId DropLeaf();
  // Branch on `t` with `hi` and `lo` already ordered after it.
  NodeId Branch(const TestAtom& t, NodeId hi, NodeId lo);

  // Parallel composition; conflicting accesses give undefined leaves.
  NodeId Plus(NodeId a, NodeId b);
  // Union of leaves without the consistency check.
  NodeId PlusUnchecked(NodeId a, NodeId b);
  NodeId Seq(NodeId a, NodeId b);
  // Negation of a predicate diagram. Throws CompileError otherwise.
  NodeId Neg(NodeId a);
  // `t ? d : drop` (positive) or `t ? drop : d`.
  NodeId Restrict(NodeId d, const TestAtom& t, bool positive);
  // Removes tests decided by `lits` and prunes contradicting branches.
  NodeId Refine(NodeId d, const std::vector<std::pair<TestAtom, bool>>& lits);

  bool IsLeaf(NodeId n) const { return nodes_[n].test < 0; }
  const TestAtom& TestOf(NodeId n) const { return tests_[nodes_[n].test]; }
  int TestIdOf(NodeId n) const { return nodes_[n].test; }
  const TestAtom& TestById(int id) const { return tests_[id]; }
  NodeId Hi(NodeId n) const { return nodes_[n].hi; }
  NodeId Lo(NodeId n) const { return nodes_[n].lo; }
  const snapnet::Leaf& LeafOf(NodeId n) const { return leaves_[nodes_[n].leaf]; }

  // Negative if `a` precedes `b` in the global test order.
  int CompareTests(const TestAtom& a, const TestAtom& b) const;

  // Walks the diagram on an input. nullopt is the undefined result.
  // Throws EvalError like the reference interpreter.
  std::optional<EvalResult> Eval(NodeId d, const Store& store,
                                 const Packet& pkt) const;
  // The leaf reached by an input.
  NodeId Walk(NodeId d, const Store& store, const Packet& pkt) const;

  // Distinct nodes reachable from `root` in pre-order, high edge first.
  std::vector<NodeId> PreOrder(NodeId root) const;

  // Graphviz rendering with pre-order node numbers.
  std::string ToDot(NodeId root) const;

  // Checks test order and context consistency on every path. On failure
  // returns false and describes the problem in `why`.
  bool WellFormed(NodeId root, std::string* why);

  // Calls `fn(path, leaf)` for each root-to-leaf path. `path` lists the
  // tests taken and their outcomes.
  void ForEachPath(
      NodeId root,
      const std::function<void(const std::vector<Literal>&, NodeId)>& fn) const;

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    int test = -1;
    NodeId hi = -1;
    NodeId lo = -1;
    int leaf = -1;
  };
  struct CondNode;
  using Cond = std::shared_ptr<const CondNode>;

  int InternTest(const TestAtom& t);
  int InternSeq(const ActionSeq& s);
  NodeId Mk(int test, NodeId hi, NodeId lo);
  bool Before(int a, int b) const;

  Ctx Extend(Ctx ctx, int test, bool positive);
  Truth Decide(Ctx ctx, int test);
  NodeId Peel(NodeId d, Ctx ctx);
  NodeId RefineIn(NodeId d, Ctx ctx);
  NodeId Select(int t, NodeId x, NodeId y, Ctx ctx);
  NodeId ApplyN(const std::vector<NodeId>& ds, bool checked, int base_leaf,
                Ctx ctx);
  snapnet::Leaf CombineLeaves(const std::vector<const snapnet::Leaf*>& ls,
                              bool checked, const snapnet::Leaf* base) const;
  NodeId Seq(NodeId x, NodeId y, Ctx ctx);
  NodeId SeqLeaf(NodeId x, NodeId y, Ctx ctx);
  NodeId SplitRuns(const std::vector<ActionSeq>& runs, size_t j,
                   std::vector<size_t>& active, NodeId y, int base_leaf,
                   Ctx ctx);
  NodeId SeqAct(int seq, NodeId y, Ctx ctx);
  NodeId Neg(NodeId a, Ctx ctx);

  Cond Const(bool b) const;
  Cond Atom(const TestAtom& t);
  Cond And(const Cond& a, const Cond& b);
  Cond Ite(const Cond& c, const Cond& a, const Cond& b);
  Cond ExprEq(const Expr& a, const Expr& b);
  Cond MakeStateTest(const std::string& var, const Expr& index, const Expr& rhs,
                     int64_t adjust);
  Cond ValueEq(const Expr& value, const Expr& rhs, int64_t adjust);
  Cond Resolve(const std::string& var, const WriteList& writes, int k,
               const Expr& index, const Expr& rhs, int64_t adjust);
  Cond Rewrite(const TestAtom& t, const ActionSeq& as);
  NodeId IteCond(const Cond& c, NodeId x, NodeId y, Ctx ctx);
  ActionSeq Compose(const ActionSeq& as, const ActionSeq& b) const;

  OrderSpec ord_;
  std::vector<TestAtom> tests_;
  std::vector<std::string> test_order_key_;
  absl::flat_hash_map<std::string, int> test_ids_;
  std::vector<snapnet::Leaf> leaves_;
  absl::flat_hash_map<std::string, int> leaf_ids_;
  std::vector<ActionSeq> seqs_;
  absl::flat_hash_map<std::string, int> seq_ids_;
  std::vector<Node> nodes_;
  absl::flat_hash_map<std::tuple<int, NodeId, NodeId>, NodeId> branch_ids_;
  absl::flat_hash_map<int, NodeId> leaf_nodes_;

  std::vector<std::vector<int>> ctx_lits_;
  absl::flat_hash_map<std::vector<int>, Ctx> ctx_ids_;
  absl::flat_hash_map<std::pair<Ctx, int>, Truth> decide_memo_;
  absl::flat_hash_map<std::pair<NodeId, Ctx>, NodeId> refine_memo_;
  absl::flat_hash_map<std::tuple<int, NodeId, NodeId, Ctx>, NodeId> select_memo_;
  absl::flat_hash_map<std::string, NodeId> apply_memo_;
  absl::flat_hash_map<std::tuple<NodeId, NodeId, Ctx>, NodeId> seq_memo_;
  absl::flat_hash_map<std::tuple<int, NodeId, Ctx>, NodeId> seqact_memo_;
  absl::flat_hash_map<std::pair<NodeId, Ctx>, NodeId> neg_memo_;
};

struct RaceReport {
  NodeId leaf = -1;
  std::string var;
};

// The first undefined or conflicting leaf in pre-order, if any.
std::optional<RaceReport> CheckRaces(const Manager& m, NodeId root);

// Translates `p` and rejects it if any leaf is racy. Throws RaceError or
// CompileError.
NodeId Compile(Manager& m, const Policy& p);

}  // namespace snapnet

#endif  // SNAPNET_XFDD_H_
