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

#ifndef SNAPNET_PARSER_H_
#define SNAPNET_PARSER_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "snapnet/ast.h"

namespace snapnet {

// Parses a policy source file. See docs/grammar.md for the grammar.
// Errors carry a `line:col:` prefix.
absl::StatusOr<Program> Parse(std::string_view text);

// Parses `text` as a bare policy against the declarations of `decls`
// (its fields and state variables). Used by tests and the CLI.
absl::StatusOr<PolicyPtr> ParsePolicy(std::string_view text,
                                      const Program& decls);

// Source text that re-parses to a structurally equal program.
std::string Pretty(const Program& program);
std::string Pretty(const Policy& policy);

}  // namespace snapnet

#endif  // SNAPNET_PARSER_H_
