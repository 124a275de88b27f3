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


// Access to the bundled example programs and random traffic for them.

#ifndef SNAPNET_CORPUS_H_
#define SNAPNET_CORPUS_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "snapnet/ast.h"
#include "snapnet/interp.h"
#include "snapnet/value.h"

namespace snapnet {

absl::StatusOr<Program> LoadProgram(const std::string& path);

// Path of a file in the example corpus.
std::string CorpusPath(const std::string& name);

// Corpus file names of the application catalog, without the egress
// assignment they are meant to be composed with.
const std::vector<std::string>& CatalogPolicies();

// `a ; b` with merged declarations. Both assumptions are kept, `a`'s first.
// Fails when a state variable is declared differently.
absl::StatusOr<Program> ComposeSeq(const Program& a, const Program& b);

// Random packets drawn from small per-field pools built from the literals
// of a program, so that state conditions recur. The inport field always
// equals the injection port.
class PacketGenerator {
 public:
  PacketGenerator(const Program& prog, std::vector<int> ports, uint64_t seed);

  // Injection port and packet.
  std::pair<int, Packet> Next();

 private:
  Value Pick(const std::vector<Value>& pool);

  const Program& prog_;
  std::vector<int> ports_;
  std::vector<std::pair<std::string, std::vector<Value>>> pools_;
  std::mt19937_64 rng_;
  static constexpr size_t kRecent = 16;
  std::vector<std::pair<int, Packet>> recent_;
  size_t next_slot_ = 0;
};

}  // namespace snapnet

#endif  // SNAPNET_CORPUS_H_
