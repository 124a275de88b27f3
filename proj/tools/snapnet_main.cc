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

// Command-line driver for the compiler, the optimizer and the simulator.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "nlohmann/json.hpp"
#include "snapnet/codec.h"
#include "snapnet/corpus.h"
#include "snapnet/deps.h"
#include "snapnet/milp.h"
#include "snapnet/psm.h"
#include "snapnet/rulegen.h"
#include "snapnet/simnet.h"
#include "snapnet/topology.h"
#include "snapnet/xfdd.h"

namespace snapnet {
namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCompile = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

constexpr const char* kPhaseNames[] = {
    "P1 state dependency", "P2 xFDD generation", "P3 packet-state map",
    "P4 MILP creation",    "P5 MILP solving",     "P6 rule generation"};

struct RunConfig {
  std::vector<std::string> policies;
  std::string topology;
  std::string out_dir;
  std::string output;  // file for single-document commands; empty: stdout
  std::string placement;
  std::string bundle;
  std::string trace;
  std::string mode = "serialized";
  uint64_t seed = 1;
  int64_t node_limit = -1;
  double time_limit = 0;
  double alpha = 1.0;
  bool parallel = false;
  bool quiet = false;
};

int ExitCode(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kDeadlineExceeded:
      return kExitInfeasible;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kPermissionDenied:
      return kExitIo;
    default:
      return kExitCompile;
  }
}

int Fail(const absl::Status& s) {
  if (s.ok()) return kExitOk;
  std::cerr << "snapnet: " << s.message() << "\n";
  return ExitCode(s);
}

absl::StatusOr<Program> LoadPolicies(const RunConfig& cfg) {
  if (cfg.policies.empty()) {
    return absl::InvalidArgumentError("no policy given (use -p)");
  }
  absl::StatusOr<Program> prog = LoadProgram(cfg.policies[0]);
  for (size_t i = 1; prog.ok() && i < cfg.policies.size(); ++i) {
    auto next = LoadProgram(cfg.policies[i]);
    if (!next.ok()) return next.status();
    prog = ComposeSeq(*prog, *next);
  }
  return prog;
}

absl::StatusOr<Topology> LoadTopo(const std::string& path) {
  if (path.empty()) return absl::InvalidArgumentError("no topology given (use -t)");
  auto t = LoadTopology(path);
  if (!t.ok() && t.status().code() == absl::StatusCode::kInvalidArgument) {
    // A malformed topology file is an input error, not a policy error.
    return absl::DataLossError(absl::StrCat(path, ": ", t.status().message()));
  }
  return t;
}

absl::Status Emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", cfg.output));
  return absl::OkStatus();
}

void PrintTimes(const RunConfig& cfg, const PhaseTimes& t) {
  if (cfg.quiet) return;
  for (size_t i = 0; i < t.size(); ++i) {
    std::cerr << absl::StrFormat("%-22s %10.4f s\n", kPhaseNames[i], t[i]);
  }
}

absl::StatusOr<Placement> LoadPlacement(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  Placement pl;
  try {
    json j = json::parse(ss.str());
    if (j.contains("placement")) j = j.at("placement");
    for (const auto& [var, sw] : j.items()) pl[var] = sw.get<std::string>();
  } catch (const json::exception& e) {
    return absl::DataLossError(absl::StrCat(path, ": ", e.what()));
  }
  return pl;
}

CompileOptions OptionsOf(const RunConfig& cfg) {
  CompileOptions o;
  o.solve.node_limit = cfg.node_limit;
  o.solve.time_limit_seconds = cfg.time_limit;
  o.solve.alpha = cfg.alpha;
  o.parallel = cfg.parallel;
  return o;
}

absl::StatusOr<CompileResult> RunCompile(const RunConfig& cfg,
                                         const Placement* fixed = nullptr) {
  auto prog = LoadPolicies(cfg);
  if (!prog.ok()) return prog.status();
  auto topo = LoadTopo(cfg.topology);
  if (!topo.ok()) return topo.status();
  CompileOptions opts = OptionsOf(cfg);
  opts.solve.fixed = fixed;
  auto r = CompileProgram(*prog, *topo, opts);
  if (r.ok()) PrintTimes(cfg, r->times);
  return r;
}

int CmdCompile(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) return Fail(absl::InvalidArgumentError("no output dir (use -o)"));
  auto r = RunCompile(cfg);
  if (!r.ok()) return Fail(r.status());
  absl::Status s = WriteBundle(r->bundle, cfg.out_dir);
  if (!s.ok()) return Fail(s);
  if (!cfg.quiet) {
    std::cerr << absl::StrFormat("objective %.6g%s, %d switches\n",
                                 r->solution.objective,
                                 r->solution.exact ? " (optimal)" : "",
                                 static_cast<int>(r->bundle.switches.size()));
  }
  return kExitOk;
}

// Front end only: phases P1 and P2.
struct FrontEnd {
  Program prog;
  DependencyGraph deps;
  std::unique_ptr<Manager> manager;
  NodeId root = 0;
};

absl::StatusOr<FrontEnd> RunFrontEnd(const RunConfig& cfg, bool diagram) {
  auto prog = LoadPolicies(cfg);
  if (!prog.ok()) return prog.status();
  FrontEnd f;
  f.prog = std::move(*prog);
  PolicyPtr full = f.prog.Full();
  f.deps = StDep(*full);
  f.manager = std::make_unique<Manager>(MakeOrderSpec(f.deps, f.prog.fields));
  if (diagram) {
    try {
      f.root = Compile(*f.manager, *full);
    } catch (const CompileError& e) {
      return absl::InvalidArgumentError(e.what());
    } catch (const EvalError& e) {
      return absl::InvalidArgumentError(e.what());
    }
  }
  return f;
}

int CmdDeps(const RunConfig& cfg) {
  auto f = RunFrontEnd(cfg, false);
  if (!f.ok()) return Fail(f.status());
  return Fail(Emit(cfg, DepsToDot(f->deps, f->manager->order())));
}

int CmdXfdd(const RunConfig& cfg) {
  auto f = RunFrontEnd(cfg, true);
  if (!f.ok()) return Fail(f.status());
  return Fail(Emit(cfg, f->manager->ToDot(f->root)));
}

int CmdMap(const RunConfig& cfg) {
  auto f = RunFrontEnd(cfg, true);
  if (!f.ok()) return Fail(f.status());
  auto topo = LoadTopo(cfg.topology);
  if (!topo.ok()) return Fail(topo.status());
  auto d = PacketStateMap(*f->manager, f->root, *topo);
  if (!d.ok()) return Fail(d.status());
  return Fail(Emit(cfg, d->ToJsonLines()));
}

int CmdExportLp(const RunConfig& cfg) {
  auto f = RunFrontEnd(cfg, true);
  if (!f.ok()) return Fail(f.status());
  auto topo = LoadTopo(cfg.topology);
  if (!topo.ok()) return Fail(topo.status());
  auto d = PacketStateMap(*f->manager, f->root, *topo);
  if (!d.ok()) return Fail(d.status());
  Placement fixed;
  if (!cfg.placement.empty()) {
    auto pl = LoadPlacement(cfg.placement);
    if (!pl.ok()) return Fail(pl.status());
    fixed = *pl;
  }
  try {
    MilpModel m = MilpModel::Build(
        *topo, *d, f->manager->order(),
        cfg.placement.empty() ? MilpModel::Mode::kPlaceAndRoute
                              : MilpModel::Mode::kRouteOnly,
        cfg.placement.empty() ? nullptr : &fixed);
    return Fail(Emit(cfg, ExportLp(m)));
  } catch (const std::invalid_argument& e) {
    return Fail(absl::InvalidArgumentError(e.what()));
  }
}

int CmdPlace(const RunConfig& cfg) {
  auto r = RunCompile(cfg);
  if (!r.ok()) return Fail(r.status());
  return Fail(Emit(cfg, BundleFiles(r->bundle).at("placement.json")));
}

int CmdReroute(const RunConfig& cfg) {
  if (cfg.placement.empty()) {
    return Fail(absl::InvalidArgumentError("reroute needs --placement"));
  }
  auto pl = LoadPlacement(cfg.placement);
  if (!pl.ok()) return Fail(pl.status());
  auto r = RunCompile(cfg, &*pl);
  if (!r.ok()) return Fail(r.status());
  return Fail(Emit(cfg, BundleFiles(r->bundle).at("routing.json")));
}

// Routing of a bundle in optimizer form.
absl::StatusOr<Routing> BundleRouting(const DeploymentBundle& b, const Topology& topo) {
  Routing rt;
  for (const auto& [uv, p] : b.paths) {
    WeightedPath wp;
    for (const std::string& id : p.first) {
      int n = topo.NodeIndex(id);
      if (n < 0) return absl::InvalidArgumentError(absl::StrCat("unknown switch ", id));
      wp.nodes.push_back(n);
    }
    rt[uv] = {wp};
  }
  return rt;
}

int CmdCheck(const RunConfig& cfg) {
  if (cfg.bundle.empty()) return Fail(absl::InvalidArgumentError("check needs --bundle"));
  auto b = ReadBundle(cfg.bundle);
  if (!b.ok()) return Fail(b.status());
  auto topo = LoadTopo(cfg.topology);
  if (!topo.ok()) return Fail(topo.status());
  std::vector<std::string> problems = ValidateBundle(*b, *topo);
  if (!cfg.policies.empty()) {
    auto f = RunFrontEnd(cfg, true);
    if (!f.ok()) return Fail(f.status());
    auto d = PacketStateMap(*f->manager, f->root, *topo);
    if (!d.ok()) return Fail(d.status());
    auto rt = BundleRouting(*b, *topo);
    if (!rt.ok()) return Fail(rt.status());
    try {
      MilpModel m = MilpModel::Build(*topo, *d, f->manager->order());
      for (const auto& v : CheckSolution(m, *topo, b->placement, *rt)) {
        problems.push_back(v.ToString());
      }
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
  }
  for (const std::string& p : problems) std::cerr << "check: " << p << "\n";
  if (!problems.empty()) return kExitCompile;
  if (!cfg.quiet) std::cerr << "check: ok\n";
  return kExitOk;
}

// One injection per line: {"port": 1, "packet": {...}, "time": 0}.
absl::StatusOr<std::vector<std::tuple<int, Packet, int64_t>>> ReadTrace(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::vector<std::tuple<int, Packet, int64_t>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      out.emplace_back(j.at("port").get<int>(), PacketFromJson(j.at("packet")),
                       j.value("time", int64_t{0}));
    } catch (const std::exception& e) {
      return absl::DataLossError(absl::StrCat(path, ":", lineno, ": ", e.what()));
    }
  }
  return out;
}

int CmdSimulate(const RunConfig& cfg) {
  if (cfg.bundle.empty() || cfg.trace.empty()) {
    return Fail(absl::InvalidArgumentError("simulate needs --bundle and --trace"));
  }
  auto b = ReadBundle(cfg.bundle);
  if (!b.ok()) return Fail(b.status());
  auto topo = LoadTopo(cfg.topology);
  if (!topo.ok()) return Fail(topo.status());
  auto trace = ReadTrace(cfg.trace);
  if (!trace.ok()) return Fail(trace.status());
  auto net = SimNetwork::Load(*b, *topo);
  if (!net.ok()) return Fail(net.status());
  std::string out;
  auto append = [&out](const SimNetwork::Result& r) {
    for (const TraceEvent& e : r.trace) absl::StrAppend(&out, e.ToJson(), "\n");
  };
  if (cfg.mode == "serialized") {
    for (const auto& [port, pkt, time] : *trace) {
      auto r = net->Inject(port, pkt);
      if (!r.ok()) return Fail(r.status());
      append(*r);
    }
  } else {
    for (const auto& [port, pkt, time] : *trace) net->Schedule(port, pkt, time);
    auto r = net->Run(cfg.seed);
    if (!r.ok()) return Fail(r.status());
    append(*r);
  }
  return Fail(Emit(cfg, out));
}

}  // namespace
}  // namespace snapnet

int main(int argc, char** argv) {
  using snapnet::RunConfig;
  RunConfig cfg;
  CLI::App app{"snapnet: compiler for stateful network programs"};
  app.require_subcommand(1);

  auto add_policy = [&cfg](CLI::App* c, bool required) {
    auto* o = c->add_option("-p,--policy", cfg.policies,
                            "policy file; repeat to compose in sequence");
    if (required) o->required();
  };
  auto add_topo = [&cfg](CLI::App* c, bool required) {
    auto* o = c->add_option("-t,--topo", cfg.topology, "topology JSON file");
    if (required) o->required();
  };
  auto add_output = [&cfg](CLI::App* c) {
    c->add_option("-o,--output", cfg.output, "output file (default: stdout)");
  };
  auto add_solver = [&cfg](CLI::App* c) {
    c->add_option("--node-limit", cfg.node_limit, "search node budget (heuristic mode)");
    c->add_option("--time-limit", cfg.time_limit, "search time budget in seconds");
    c->add_option("--alpha", cfg.alpha, "weight of link load in routing costs");
    c->add_flag("--parallel", cfg.parallel, "parallel placement search");
    c->add_flag("-q,--quiet", cfg.quiet, "no phase timings");
  };

  auto* compile = app.add_subcommand("compile", "compile to a deployment bundle");
  add_policy(compile, true);
  add_topo(compile, true);
  compile->add_option("-o,--out", cfg.out_dir, "bundle directory")->required();
  add_solver(compile);

  auto* deps = app.add_subcommand("deps", "state dependency graph (dot)");
  add_policy(deps, true);
  add_output(deps);

  auto* xfdd = app.add_subcommand("xfdd", "decision diagram (dot)");
  add_policy(xfdd, true);
  add_output(xfdd);

  auto* map = app.add_subcommand("map", "packet-state map (JSON lines)");
  add_policy(map, true);
  add_topo(map, true);
  add_output(map);

  auto* place = app.add_subcommand("place", "state placement (JSON)");
  add_policy(place, true);
  add_topo(place, true);
  add_output(place);
  add_solver(place);

  auto* reroute = app.add_subcommand("reroute", "routing for a fixed placement (JSON)");
  add_policy(reroute, true);
  add_topo(reroute, true);
  reroute->add_option("--placement", cfg.placement, "placement JSON")->required();
  add_output(reroute);
  add_solver(reroute);

  auto* lp = app.add_subcommand("export-lp", "optimization model in LP format");
  add_policy(lp, true);
  add_topo(lp, true);
  lp->add_option("--placement", cfg.placement, "fixed placement (routing-only model)");
  add_output(lp);

  auto* sim = app.add_subcommand("simulate", "run a packet trace through a bundle");
  sim->add_option("--bundle", cfg.bundle, "bundle directory")->required();
  add_topo(sim, true);
  sim->add_option("--trace", cfg.trace, "injections, one JSON object per line")
      ->required();
  sim->add_option("--mode", cfg.mode, "serialized or interleaved")
      ->check(CLI::IsMember({"serialized", "interleaved"}));
  sim->add_option("--seed", cfg.seed, "scheduler seed (SNAPNET_SEED overrides)");
  add_output(sim);

  auto* check = app.add_subcommand("check", "validate a bundle and its solution");
  check->add_option("--bundle", cfg.bundle, "bundle directory")->required();
  add_topo(check, true);
  add_policy(check, false);
  check->add_flag("-q,--quiet", cfg.quiet, "only report problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (const char* env = std::getenv("SNAPNET_SEED"); env != nullptr && *env) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "snapnet: SNAPNET_SEED is not a number\n";
      return snapnet::kExitCompile;
    }
  }

  if (compile->parsed()) return snapnet::CmdCompile(cfg);
  if (deps->parsed()) return snapnet::CmdDeps(cfg);
  if (xfdd->parsed()) return snapnet::CmdXfdd(cfg);
  if (map->parsed()) return snapnet::CmdMap(cfg);
  if (place->parsed()) return snapnet::CmdPlace(cfg);
  if (reroute->parsed()) return snapnet::CmdReroute(cfg);
  if (lp->parsed()) return snapnet::CmdExportLp(cfg);
  if (sim->parsed()) return snapnet::CmdSimulate(cfg);
  if (check->parsed()) return snapnet::CmdCheck(cfg);
  return snapnet::kExitCompile;
}
