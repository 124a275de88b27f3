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

// Independent reference implementations used only by tests.

#ifndef SNAPNET_TESTS_ORACLES_H_
#define SNAPNET_TESTS_ORACLES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "snapnet/ast.h"
#include "snapnet/interp.h"
#include "snapnet/value.h"

namespace snapnet::testing {

// A second evaluator, written directly from the equations with its own data
// representation. `kError` stands for a run-time failure (bad increment).
struct OracleResult {
  enum Kind { kOk, kUndefined, kError } kind = kOk;
  std::map<std::string, std::map<Value, Value>> cells;  // non-default cells
  std::set<Packet> packets;
  std::set<std::pair<bool, std::string>> log;
};
OracleResult OracleEval(const Program& prog, const Policy& p, const Store& m,
                        const Packet& pkt);
// The same outcome computed by a Store-based evaluator, in oracle form.
OracleResult ToOracle(const std::optional<EvalResult>& r);

// Small universe for exhaustive checks: fields f, g, h over {0, 1, 2};
// single-cell variables `c` (integer counter) and `s`.
struct SmallUniverse {
  Program prog;
  std::vector<Packet> packets;
  std::vector<Store> stores;
  SmallUniverse();
};

PolicyPtr RandomPredicate(std::mt19937_64& rng, int depth);
PolicyPtr RandomPolicy(std::mt19937_64& rng, int depth);

// Minimal reader for the LP text format: counts constraint rows and the
// distinct variables that appear anywhere. Returns false on syntax errors.
struct LpCounts {
  int rows = 0;
  int columns = 0;
  int binaries = 0;
  std::map<std::string, double> objective;
};
bool ParseLp(const std::string& text, LpCounts* out, std::string* error);

}  // namespace snapnet::testing

#endif  // SNAPNET_TESTS_ORACLES_H_
