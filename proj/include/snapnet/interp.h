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

// Reference semantics of the policy language. This is the oracle the
// compiler and the simulator are tested against.

#ifndef SNAPNET_INTERP_H_
#define SNAPNET_INTERP_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/container/btree_map.h"
#include "snapnet/ast.h"
#include "snapnet/value.h"

namespace snapnet {

// A total map from schema fields to values.
class Packet {
 public:
  Packet() = default;

  const Value& Get(const std::string& field) const;
  bool Has(const std::string& field) const { return fields_.contains(field); }
  void Set(const std::string& field, Value v) { fields_[field] = std::move(v); }
  const absl::btree_map<std::string, Value>& fields() const { return fields_; }

  std::string ToString() const;

  friend bool operator==(const Packet& a, const Packet& b) {
    return a.fields_ == b.fields_;
  }
  friend bool operator<(const Packet& a, const Packet& b) {
    return a.fields_ < b.fields_;
  }

 private:
  absl::btree_map<std::string, Value> fields_;
};

// Packet with every schema field zero, except as given.
Packet MakePacket(const Program& prog,
                  std::initializer_list<std::pair<std::string, Value>> init);

// One state variable: a sparse table over a default value. Cells holding
// the default are never stored, so structural equality is semantic
// equality.
struct Table {
  Value default_value;
  absl::btree_map<Value, Value> cells;

  const Value& Get(const Value& index) const;
  void Set(const Value& index, Value v);
  friend bool operator==(const Table& a, const Table& b) {
    return a.default_value == b.default_value && a.cells == b.cells;
  }
};

class Store {
 public:
  Store() = default;
  // All declared variables at their defaults.
  explicit Store(const Program& prog);

  const Table& table(const std::string& var) const;
  Table& mutable_table(const std::string& var);
  bool HasVar(const std::string& var) const { return tables_.contains(var); }
  void AddVar(const std::string& var, Value default_value);

  const absl::btree_map<std::string, Table>& tables() const { return tables_; }

  std::string ToString() const;

  friend bool operator==(const Store& a, const Store& b) {
    return a.tables_ == b.tables_;
  }

 private:
  absl::btree_map<std::string, Table> tables_;
};

struct LogEntry {
  bool write = false;
  std::string var;
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
  friend auto operator<=>(const LogEntry&, const LogEntry&) = default;
};

using Log = std::vector<LogEntry>;

struct EvalResult {
  Store store;
  std::set<Packet> packets;
  Log log;
};

// Evaluation of a state operation failed at run time (non-integer
// increment, overflow, malformed index).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Value EvalExpr(const Expr& e, const Packet& pkt);

// Increment or decrement with overflow checking. Throws EvalError.
Value AddInt(const Value& v, int64_t delta);

// nullopt is the undefined result of conflicting state accesses.
std::optional<EvalResult> Eval(const Policy& p, const Store& m,
                               const Packet& pkt);

bool Consistent(const Log& l1, const Log& l2);

// merge(m, m1, ..., mk): per variable, the first mi that changed it.
Store Merge(const Store& m, const std::vector<const Store*>& ms);

}  // namespace snapnet

#endif  // SNAPNET_INTERP_H_
