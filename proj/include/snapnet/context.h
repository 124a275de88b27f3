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

// Satisfiability of conjunctions of test literals. Used to prune decision
// diagram paths and to decide which tests a path already settles.
//
// The theory is equality with uninterpreted packet fields, state cells
// (with integer offsets), tuples and constants, plus IPv4 prefix
// membership. The procedure is sound for unsatisfiability: it never reports
// a satisfiable conjunction as unsatisfiable.

#ifndef SNAPNET_CONTEXT_H_
#define SNAPNET_CONTEXT_H_

#include <vector>

#include "snapnet/atoms.h"

namespace snapnet {

struct Literal {
  const TestAtom* test = nullptr;
  bool positive = true;
};

enum class Truth { kFalse, kTrue, kUnknown };

bool Satisfiable(const std::vector<Literal>& lits);

// kTrue if `lits` implies `t`, kFalse if it implies the negation.
Truth Decide(const std::vector<Literal>& lits, const TestAtom& t);

}  // namespace snapnet

#endif  // SNAPNET_CONTEXT_H_
