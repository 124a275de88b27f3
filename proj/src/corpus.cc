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


#include "snapnet/corpus.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "snapnet/parser.h"

namespace snapnet {

namespace {

void Collect(const Policy& p, std::map<std::string, std::set<Value>>& lits) {
  switch (p.kind) {
    case PolicyKind::kTest:
    case PolicyKind::kMod:
      lits[p.name].insert(p.value);
      break;
    default:
      break;
  }
  for (const PolicyPtr& c : {p.a, p.b, p.c}) {
    if (c) Collect(*c, lits);
  }
}

// A few addresses inside `v` (or `v` itself).
std::vector<Value> Hosts(const Value& v) {
  if (!v.is_prefix()) return {v};
  const Prefix& p = v.as_prefix();
  std::vector<Value> out;
  uint32_t span = p.len >= 32 ? 1 : (p.len == 0 ? 0xffffffffu : (1u << (32 - p.len)));
  for (uint32_t h : {1u, 2u, 6u, 10u}) {
    if (h < span) out.push_back(Value::Ip(p.addr + h));
  }
  if (out.empty()) out.push_back(Value::Ip(p.addr));
  return out;
}

}  // namespace

absl::StatusOr<Program> LoadProgram(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  auto prog = Parse(ss.str());
  if (!prog.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ":", prog.status().message()));
  }
  return prog;
}

std::string CorpusPath(const std::string& name) {
  return absl::StrCat(SNAPNET_CORPUS_DIR, "/", name);
}

const std::vector<std::string>& CatalogPolicies() {
  static const auto* names = new std::vector<std::string>{
      "conn_affinity.snap",  "dns_amplification.snap", "dns_ttl_change.snap",
      "dns_tunnel.snap",     "elephant_flow.snap",     "flow_size_detect.snap",
      "ftp_monitoring.snap", "heavy_hitter.snap",      "many_domain_ips.snap",
      "many_ip_domains.snap", "sampling.snap",         "selective_drop.snap",
      "sidejacking.snap",    "snort_flowbits.snap",    "spam_detection.snap",
      "stateful_fw.snap",    "super_spreader.snap",    "syn_flood.snap",
      "tcp_state.snap",      "udp_flood.snap"};
  return *names;
}

absl::StatusOr<Program> ComposeSeq(const Program& a, const Program& b) {
  Program out;
  std::set<std::string> fields(a.fields.begin(), a.fields.end());
  fields.insert(b.fields.begin(), b.fields.end());
  out.fields.assign(fields.begin(), fields.end());
  out.states = a.states;
  for (const StateDecl& d : b.states) {
    const StateDecl* prev = a.FindState(d.name);
    if (prev == nullptr) {
      out.states.push_back(d);
    } else if (prev->arity != d.arity || !(prev->default_value == d.default_value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("state ", d.name, " is declared differently"));
    }
  }
  if (a.assumption && b.assumption) {
    out.assumption = Seq(a.assumption, b.assumption);
  } else {
    out.assumption = a.assumption ? a.assumption : b.assumption;
  }
  out.body = Seq(a.body, b.body);
  return out;
}

PacketGenerator::PacketGenerator(const Program& prog, std::vector<int> ports,
                                 uint64_t seed)
    : prog_(prog), ports_(std::move(ports)), rng_(seed) {
  std::map<std::string, std::set<Value>> lits;
  Collect(*prog.Full(), lits);
  std::set<Value> ips;
  for (int subnet = 1; subnet <= 6; ++subnet) {
    for (uint32_t h : {1u, 2u}) ips.insert(Value::Ip((10u << 24) | (subnet << 8) | h));
  }
  for (const std::string& f : {"srcip", "dstip"}) {
    for (const Value& v : lits[f]) {
      for (const Value& h : Hosts(v)) ips.insert(h);
    }
  }
  for (const std::string& f : prog.fields) {
    if (f == "inport") continue;
    std::set<Value> pool;
    if (f == "srcip" || f == "dstip") {
      pool = ips;
    } else if (f == "outport") {
      for (int p : ports_) pool.insert(Value::Int(p));
    } else {
      for (const Value& v : lits[f]) {
        for (const Value& h : Hosts(v)) pool.insert(h);
      }
      if (f == "srcport" || f == "dstport") {
        for (int p : {53, 80, 1234}) pool.insert(Value::Int(p));
      }
      if (pool.empty() || f == "proto") pool.insert(Value::Int(0));
      // Fields compared with addresses in state need addresses too.
      bool has_ip = std::any_of(pool.begin(), pool.end(),
                                [](const Value& v) { return v.is_ip(); });
      if (has_ip || pool.size() == 1) {
        auto it = ips.begin();
        for (int i = 0; i < 3 && it != ips.end(); ++i, ++it) pool.insert(*it);
      }
    }
    pools_.emplace_back(f, std::vector<Value>(pool.begin(), pool.end()));
  }
}

Value PacketGenerator::Pick(const std::vector<Value>& pool) {
  return pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng_)];
}

std::pair<int, Packet> PacketGenerator::Next() {
  // Repeat a recent packet now and then so that per-flow counters grow.
  if (!recent_.empty() && std::bernoulli_distribution(0.4)(rng_)) {
    return recent_[std::uniform_int_distribution<size_t>(0, recent_.size() - 1)(rng_)];
  }
  int port = ports_[std::uniform_int_distribution<size_t>(0, ports_.size() - 1)(rng_)];
  Packet p;
  for (const std::string& f : prog_.fields) p.Set(f, Value::Int(0));
  for (const auto& [f, pool] : pools_) p.Set(f, Pick(pool));
  p.Set("inport", Value::Int(port));
  // Mostly send from the sender's own subnet.
  if (prog_.HasField("srcip") && std::bernoulli_distribution(0.5)(rng_)) {
    uint32_t h = std::uniform_int_distribution<uint32_t>(1, 2)(rng_);
    p.Set("srcip", Value::Ip((10u << 24) | (static_cast<uint32_t>(port) << 8) | h));
  }
  if (recent_.size() < kRecent) {
    recent_.emplace_back(port, p);
  } else {
    recent_[next_slot_++ % kRecent] = {port, p};
  }
  return {port, std::move(p)};
}

}  // namespace snapnet
