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


#include "snapnet/simnet.h"

#include <algorithm>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "snapnet/codec.h"

namespace snapnet {

namespace {

uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string HeaderString(const SnapHeader& h) {
  return absl::StrCat("(", h.obs_inport, ",", h.obs_outport, ") node ", h.resume_node,
                      " target ", h.target, " hop ", h.hop);
}

}  // namespace

const char* KindName(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::kIngress:
      return "ingress";
    case TraceEvent::Kind::kHop:
      return "hop";
    case TraceEvent::Kind::kStateRead:
      return "state-read";
    case TraceEvent::Kind::kStateWrite:
      return "state-write";
    case TraceEvent::Kind::kEmit:
      return "emit";
    case TraceEvent::Kind::kDrop:
      return "drop";
  }
  return "?";
}

std::string TraceEvent::ToJson() const {
  nlohmann::json j = {{"time", time},       {"switch", sw},
                      {"packet_id", packet_id}, {"kind", KindName(kind)},
                      {"packet", PacketToJson(packet)}, {"detail", detail}};
  return j.dump();
}

absl::StatusOr<SimNetwork> SimNetwork::Load(const DeploymentBundle& b,
                                            const Topology& topo) {
  SimNetwork net;
  net.bundle_ = std::make_shared<const DeploymentBundle>(b);
  net.topo_ = std::make_shared<const Topology>(topo);
  net.switches_.resize(topo.nodes.size());
  net.links_.resize(topo.links.size());
  net.link_last_.assign(topo.links.size(), -1);
  for (const auto& [id, c] : net.bundle_->switches) {
    int idx = topo.NodeIndex(id);
    if (idx < 0) return absl::InvalidArgumentError(absl::StrCat("unknown switch ", id));
    Switch& s = net.switches_[idx];
    s.config = &c;
    for (const StateDecl& t : c.tables) s.store.AddVar(t.name, t.default_value);
    for (const SteerRule& r : c.steer) s.steer[{r.inport, r.node, r.after}] = &r;
    for (const auto& [r, next] : c.forward) {
      int to = topo.NodeIndex(next);
      if (to < 0 || topo.LinkIndex(idx, to) < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown link ", id, " -> ", next));
      }
      s.forward[{r.inport, r.outport, r.hop}] = next;
    }
    for (const auto& [r, g] : c.process) s.process[{r.inport, r.outport, r.hop}].push_back(g);
    for (const PathRule& r : c.emit) s.emit[{r.inport, r.outport, r.hop}] = true;
    try {
      for (const auto& [node, g] : c.entries) net.Lower(s, node, g);
    } catch (const SimError& e) {
      return absl::InvalidArgumentError(absl::StrCat(id, ": ", e.what()));
    }
  }
  return net;
}

int SimNetwork::Lower(Switch& s, int node, int group) {
  auto memo = s.entry.find({node, group});
  if (memo != s.entry.end()) return memo->second;
  const SwitchConfig& c = *s.config;
  auto br = std::find_if(c.branches.begin(), c.branches.end(), [&](const FragmentBranch& x) {
    return x.id == node && x.group == group;
  });
  int pc;
  if (br != c.branches.end()) {
    SwitchInstr in;
    in.op = SwitchInstr::Op::kBranch;
    in.test = br->test;
    in.state_test = br->group != kIngress;
    in.on_true = Lower(s, br->hi, group);
    in.on_false = Lower(s, br->lo, group);
    s.program.push_back(std::move(in));
    pc = static_cast<int>(s.program.size()) - 1;
  } else {
    auto bd = std::find_if(c.boundaries.begin(), c.boundaries.end(), [&](const Boundary& x) {
      return x.node == node && x.after == group;
    });
    if (bd == c.boundaries.end()) {
      throw SimError(absl::StrCat("dangling resume point ", node, " after group ", group));
    }
    SwitchInstr tail;
    tail.after = group;
    tail.node = node;
    if (bd->next == kEgress) {
      auto lf = std::find_if(c.leaves.begin(), c.leaves.end(),
                             [&](const FragmentLeaf& x) { return x.id == node; });
      if (lf == c.leaves.end()) throw SimError(absl::StrCat("missing leaf ", node));
      tail.op = lf->seqs.empty() ? SwitchInstr::Op::kDrop : SwitchInstr::Op::kApplyAtom;
      tail.seqs = lf->seqs;
      s.program.push_back(std::move(tail));
    } else {
      tail.op = SwitchInstr::Op::kForwardGroup;
      s.program.push_back(tail);
      SwitchInstr tag;
      tag.op = SwitchInstr::Op::kTagResume;
      tag.node = node;
      tag.group = bd->next;
      tag.next = static_cast<int>(s.program.size()) - 1;
      s.program.push_back(std::move(tag));
    }
    pc = static_cast<int>(s.program.size()) - 1;
    for (auto it = bd->writes.rbegin(); it != bd->writes.rend(); ++it) {
      SwitchInstr w;
      w.op = SwitchInstr::Op::kStateWrite;
      w.var = it->first;
      w.atoms = it->second;
      w.next = pc;
      s.program.push_back(std::move(w));
      pc = static_cast<int>(s.program.size()) - 1;
    }
  }
  s.entry[{node, group}] = pc;
  return pc;
}

void SimNetwork::Trace(Result& out, int sw, const InFlight& f, TraceEvent::Kind k,
                       std::string detail) {
  if (!tracing_) return;
  out.trace.push_back(TraceEvent{now_, topo_->nodes[sw].id, f.id, f.input, k,
                                 std::move(detail)});
}

void SimNetwork::RunProgram(int sw, InFlight f, int pc, std::vector<InFlight>& next,
                            Result& out) {
  Switch& s = switches_[sw];
  while (true) {
    const SwitchInstr& in = s.program[pc];
    switch (in.op) {
      case SwitchInstr::Op::kBranch: {
        bool r = in.test.Eval(f.input, s.store);
        if (in.state_test) {
          Trace(out, sw, f, TraceEvent::Kind::kStateRead,
                absl::StrCat(in.test.ToString(), r ? " true" : " false"));
        }
        pc = r ? in.on_true : in.on_false;
        break;
      }
      case SwitchInstr::Op::kStateWrite:
        if (!s.store.HasVar(in.var)) {
          throw SimError(absl::StrCat(topo_->nodes[sw].id, " has no table ", in.var));
        }
        ApplyAtoms(in.atoms, f.input, s.store.mutable_table(in.var));
        Trace(out, sw, f, TraceEvent::Kind::kStateWrite, in.var);
        pc = in.next;
        break;
      case SwitchInstr::Op::kTagResume:
        f.h.resume_node = in.node;
        f.h.target = in.group;
        pc = in.next;
        break;
      case SwitchInstr::Op::kForwardGroup: {
        auto it = s.steer.find({f.h.obs_inport, in.node, in.after});
        if (it == s.steer.end()) {
          throw SimError(absl::StrCat(topo_->nodes[sw].id, " has no steering rule for ",
                                      HeaderString(f.h)));
        }
        const SteerRule& rule = *it->second;
        std::vector<double>& cur = s.wrr[{rule.inport, rule.node, rule.after}];
        cur.resize(rule.choices.size(), 0.0);
        double total = 0;
        size_t best = 0;
        for (size_t i = 0; i < cur.size(); ++i) {
          cur[i] += rule.choices[i].weight;
          total += rule.choices[i].weight;
          if (cur[i] > cur[best]) best = i;
        }
        cur[best] -= total;
        f.h.obs_outport = rule.choices[best].outport;
        f.h.hop = rule.choices[best].hop;
        f.h.after = in.after;
        ++steer_counts_[{f.h.obs_inport, f.h.obs_outport}];
        next.push_back(std::move(f));
        return;
      }
      case SwitchInstr::Op::kApplyAtom: {
        std::set<Packet> outs;
        for (const ActionSeq& seq : in.seqs) {
          Packet o;
          if (ApplyMods(seq, f.input, o)) outs.insert(std::move(o));
        }
        if (outs.empty()) Trace(out, sw, f, TraceEvent::Kind::kDrop, "leaf drops");
        for (const Packet& o : outs) {
          const Value& port = o.Get("outport");
          int v = port.is_int() ? static_cast<int>(port.as_int()) : -1;
          InFlight copy{f.id, o, f.h};
          if (!port.is_int() || topo_->SwitchOfPort(v) < 0) {
            Trace(out, sw, copy, TraceEvent::Kind::kDrop, "outport is not external");
            continue;
          }
          copy.h.obs_outport = v;
          copy.h.resolved = true;
          copy.h.target = kEgress;
          copy.h.after = in.after;
          copy.h.hop = 0;
          const auto& path = bundle_->paths.at({f.h.obs_inport, v});
          if (in.after != kIngress) {
            copy.h.hop = -1;
            for (const auto& [g, hop] : path.second) {
              if (g == in.after) copy.h.hop = hop;
            }
          }
          if (copy.h.hop < 0 || path.first[copy.h.hop] != topo_->nodes[sw].id) {
            throw SimError(absl::StrCat("path (", f.h.obs_inport, ",", v,
                                        ") does not pass ", topo_->nodes[sw].id));
          }
          next.push_back(std::move(copy));
        }
        return;
      }
      case SwitchInstr::Op::kDrop:
        Trace(out, sw, f, TraceEvent::Kind::kDrop, "leaf drops");
        return;
    }
  }
}

void SimNetwork::Arrive(int sw, InFlight f, bool ingress, Result& out) {
  Switch& s = switches_[sw];
  if (s.config == nullptr) {
    throw SimError(absl::StrCat("switch ", topo_->nodes[sw].id, " has no configuration"));
  }
  std::vector<InFlight> work;
  if (ingress) {
    Trace(out, sw, f, TraceEvent::Kind::kIngress);
    auto it = s.entry.find({1, kIngress});
    if (it == s.entry.end()) throw SimError("ingress switch lacks the diagram root");
    RunProgram(sw, std::move(f), it->second, work, out);
  } else {
    Trace(out, sw, f, TraceEvent::Kind::kHop, HeaderString(f.h));
    work.push_back(std::move(f));
  }
  while (!work.empty()) {
    InFlight cur = std::move(work.back());
    work.pop_back();
    std::tuple<int, int, int> key{cur.h.obs_inport, cur.h.obs_outport, cur.h.hop};
    if (!cur.h.resolved) {
      auto p = s.process.find(key);
      if (p != s.process.end() &&
          std::find(p->second.begin(), p->second.end(), cur.h.target) != p->second.end()) {
        auto e = s.entry.find({cur.h.resume_node, cur.h.target});
        if (e == s.entry.end()) {
          throw SimError(absl::StrCat(s.config->id, " cannot resume ", HeaderString(cur.h)));
        }
        RunProgram(sw, std::move(cur), e->second, work, out);
        continue;
      }
    } else if (s.emit.contains(key)) {
      Trace(out, sw, cur, TraceEvent::Kind::kEmit, absl::StrCat("port ", cur.h.obs_outport));
      out.emitted.push_back(Emission{cur.h.obs_outport, std::move(cur.input)});
      continue;
    }
    auto fw = s.forward.find(key);
    if (fw == s.forward.end()) {
      throw SimError(absl::StrCat(s.config->id, " has no rule for ", HeaderString(cur.h)));
    }
    Send(sw, fw->second, std::move(cur), out);
  }
}

void SimNetwork::Send(int sw, const std::string& to, InFlight f, Result&) {
  int li = topo_->LinkIndex(sw, topo_->NodeIndex(to));
  f.h.hop += 1;
  int64_t serial = serial_++;
  links_[li].push_back({serial, std::move(f)});
  events_.push(Event{now_ + 1, Mix(seed_ ^ Mix(serial)), serial, li, 0, Packet()});
}

void SimNetwork::Drain(Result& out) {
  while (!events_.empty()) {
    Event e = events_.top();
    events_.pop();
    now_ = e.time;
    if (e.link < 0) {
      InFlight f;
      f.id = next_packet_++;
      f.input = std::move(e.pkt);
      f.h.obs_inport = e.port;
      f.h.obs_outport = e.port;
      f.h.resume_node = 1;
      Arrive(topo_->SwitchOfPort(e.port), std::move(f), true, out);
      continue;
    }
    auto& q = links_[e.link];
    if (q.empty()) throw SimError("link event without a packet");
    auto [serial, f] = std::move(q.front());
    q.pop_front();
    if (serial <= link_last_[e.link]) throw SimError("link delivered out of order");
    link_last_[e.link] = serial;
    Arrive(topo_->links[e.link].to, std::move(f), false, out);
  }
}

absl::Status SimNetwork::CheckPacket(int port, const Packet& pkt) const {
  if (topo_->SwitchOfPort(port) < 0) {
    return absl::InvalidArgumentError(absl::StrCat("port ", port, " is not external"));
  }
  std::vector<std::string> have;
  for (const auto& [f, v] : pkt.fields()) have.push_back(f);
  if (have != bundle_->fields) {
    return absl::InvalidArgumentError("packet fields do not match the schema");
  }
  if (!(pkt.Get("inport") == Value::Int(port))) {
    return absl::InvalidArgumentError(
        absl::StrCat("packet inport ", pkt.Get("inport").ToString(), " injected at ", port));
  }
  return absl::OkStatus();
}

void SimNetwork::Schedule(int port, const Packet& pkt, int64_t time) {
  events_.push(Event{time, 0, serial_++, -1, port, pkt});
}

absl::StatusOr<SimNetwork::Result> SimNetwork::Run(uint64_t seed) {
  seed_ = seed;
  Result out;
  // Re-key pending injections with the run's seed.
  std::vector<Event> pending;
  while (!events_.empty()) {
    Event e = events_.top();
    events_.pop();
    if (e.link < 0) {
      absl::Status st = CheckPacket(e.port, e.pkt);
      if (!st.ok()) return st;
    }
    e.tie = Mix(seed_ ^ Mix(e.serial));
    pending.push_back(std::move(e));
  }
  for (Event& e : pending) events_.push(std::move(e));
  try {
    Drain(out);
  } catch (const SimError& e) {
    return absl::InternalError(e.what());
  } catch (const EvalError& e) {
    return absl::OutOfRangeError(e.what());
  }
  return out;
}

absl::StatusOr<SimNetwork::Result> SimNetwork::Inject(int port, const Packet& pkt) {
  absl::Status st = CheckPacket(port, pkt);
  if (!st.ok()) return st;
  events_.push(Event{now_, 0, serial_++, -1, port, pkt});
  Result out;
  try {
    Drain(out);
  } catch (const SimError& e) {
    return absl::InternalError(e.what());
  } catch (const EvalError& e) {
    return absl::OutOfRangeError(e.what());
  }
  return out;
}

Store SimNetwork::CombinedStore(const Program& prog) const {
  Store st(prog);
  for (const Switch& s : switches_) {
    for (const auto& [var, t] : s.store.tables()) st.mutable_table(var) = t;
  }
  return st;
}

const Store& SimNetwork::SwitchStore(const std::string& id) const {
  return switches_.at(topo_->NodeIndex(id)).store;
}

const std::vector<SwitchInstr>& SimNetwork::ProgramOf(const std::string& id) const {
  return switches_.at(topo_->NodeIndex(id)).program;
}

absl::StatusOr<RaceObservation> RaceProbe(const SimNetwork& net, const Program& prog,
                                          const RaceScenario& s) {
  SimNetwork copy = net;
  copy.set_tracing(false);
  for (const auto& [port, pkt, time] : s.packets) copy.Schedule(port, pkt, time);
  auto run = copy.Run(s.seed);
  if (!run.ok()) return run.status();
  Store st = copy.CombinedStore(prog);
  const Table& ta = st.table(s.var_a);
  const Table& tb = st.table(s.var_b);
  const Value& a = ta.Get(s.index);
  const Value& b = tb.Get(s.index);
  RaceObservation obs;
  if (a == ta.default_value && b == tb.default_value) return obs;
  obs.consistent = std::any_of(s.packets.begin(), s.packets.end(), [&](const auto& p) {
    const Packet& pkt = std::get<1>(p);
    return pkt.Get(s.field_a) == a && pkt.Get(s.field_b) == b;
  });
  obs.detail = absl::StrCat(s.var_a, "=", a.ToString(), " ", s.var_b, "=", b.ToString());
  return obs;
}

}  // namespace snapnet
