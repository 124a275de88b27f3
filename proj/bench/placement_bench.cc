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

// Serial and OpenMP placement search on the example network and on
// generated ones.

#include <stdexcept>
#include <string>

#include "benchmark/benchmark.h"
#include "snapnet/corpus.h"
#include "snapnet/rulegen.h"
#include "snapnet/solver.h"
#include "snapnet/topology.h"

namespace snapnet {
namespace {

Program Example() {
  auto a = LoadProgram(CorpusPath("assumption.snap"));
  auto d = LoadProgram(CorpusPath("dns_tunnel.snap"));
  auto e = LoadProgram(CorpusPath("assign_egress.snap"));
  if (!a.ok() || !d.ok() || !e.ok()) throw std::runtime_error("corpus missing");
  auto de = ComposeSeq(*d, *e);
  auto all = ComposeSeq(*a, *de);
  if (!all.ok()) throw std::runtime_error(std::string(all.status().message()));
  return *all;
}

Topology Network(int switches) {
  if (switches == 0) {
    auto t = LoadTopology(CorpusPath("example.json"));
    if (!t.ok()) throw std::runtime_error(std::string(t.status().message()));
    return *t;
  }
  return GenerateTopology(switches, 0.3, 11);
}

template <bool kParallel>
void BM_Solve(benchmark::State& state) {
  Topology topo = Network(static_cast<int>(state.range(0)));
  CompileOptions opts;
  opts.solve.node_limit = 2000;
  auto r = CompileProgram(Example(), topo, opts);
  if (!r.ok()) {
    state.SkipWithError(std::string(r.status().message()).c_str());
    return;
  }
  PlacementProblem p(topo, r->demand, r->manager->order());
  SolveOptions so;
  so.node_limit = state.range(0) == 0 ? -1 : 2000;
  for (auto _ : state) {
    auto s = kParallel ? SolveParallel(p, so) : SolveSerial(p, so);
    benchmark::DoNotOptimize(s);
  }
}

BENCHMARK_TEMPLATE(BM_Solve, false)->Arg(0)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Solve, true)->Arg(0)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace snapnet

BENCHMARK_MAIN();
