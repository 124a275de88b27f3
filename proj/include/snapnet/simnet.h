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


// Software switches and a discrete-event network that executes deployment
// bundles.
//
// Each switch fragment is lowered to a loop-free instruction program. A
// packet's processing at one switch runs to completion before any other
// packet is handled there. Links deliver in FIFO order after one tick.

#ifndef SNAPNET_SIMNET_H_
#define SNAPNET_SIMNET_H_

#include <cstdint>
#include <deque>
#include <memory>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "snapnet/interp.h"
#include "snapnet/rulegen.h"
#include "snapnet/topology.h"

namespace snapnet {

struct SwitchInstr {
  enum class Op {
    kBranch,        // test ? on_true : on_false
    kStateWrite,    // apply `atoms` to `var`, then `next`
    kTagResume,     // header resumes at `node` for group `group`, then `next`
    kForwardGroup,  // weighted choice of a designated path
    kApplyAtom,     // run the leaf `seqs`; each copy heads for its egress
    kDrop,
  };
  Op op = Op::kDrop;
  TestAtom test;
  bool state_test = false;
  int on_true = -1, on_false = -1;
  std::string var;
  WriteList atoms;
  int node = 0;
  int group = 0;
  int after = kIngress;
  std::vector<ActionSeq> seqs;
  int next = -1;
};

struct TraceEvent {
  enum class Kind { kIngress, kHop, kStateRead, kStateWrite, kEmit, kDrop };
  int64_t time = 0;
  std::string sw;
  int64_t packet_id = 0;
  Packet packet;
  Kind kind = Kind::kIngress;
  std::string detail;

  std::string ToJson() const;
};

const char* KindName(TraceEvent::Kind k);

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Emission {
  int port = 0;
  Packet packet;
  friend bool operator==(const Emission& a, const Emission& b) {
    return a.port == b.port && a.packet == b.packet;
  }
  friend bool operator<(const Emission& a, const Emission& b) {
    return a.port < b.port || (a.port == b.port && a.packet < b.packet);
  }
};

class SimNetwork {
 public:
  enum class Mode { kSerialized, kInterleaved };

  struct Result {
    std::vector<Emission> emitted;
    std::vector<TraceEvent> trace;
  };

  // Lowers every fragment. Fails on dangling resume ids or links missing
  // from the topology.
  static absl::StatusOr<SimNetwork> Load(const DeploymentBundle& b, const Topology& topo);

  // Serialized mode: drives one packet to completion.
  absl::StatusOr<Result> Inject(int port, const Packet& pkt);

  // Interleaved mode: queue packets, then run them together. Events at the
  // same tick are ordered by a hash of `seed`.
  void Schedule(int port, const Packet& pkt, int64_t time = 0);
  absl::StatusOr<Result> Run(uint64_t seed);

  // Union of all switch tables over the declared defaults of `prog`.
  Store CombinedStore(const Program& prog) const;
  const Store& SwitchStore(const std::string& id) const;
  const std::vector<SwitchInstr>& ProgramOf(const std::string& id) const;

  void set_tracing(bool on) { tracing_ = on; }
  int64_t now() const { return now_; }

  // Designated-path choices made so far: (inport, outport) -> count.
  const std::map<std::pair<int, int>, int64_t>& steer_counts() const {
    return steer_counts_;
  }

 private:
  struct InFlight {
    int64_t id = 0;
    Packet input;
    SnapHeader h;
  };
  struct Switch {
    const SwitchConfig* config = nullptr;
    std::vector<SwitchInstr> program;
    absl::flat_hash_map<std::pair<int, int>, int> entry;
    absl::flat_hash_map<std::tuple<int, int, int>, const SteerRule*> steer;
    absl::flat_hash_map<std::tuple<int, int, int>, std::vector<double>> wrr;
    absl::flat_hash_map<std::tuple<int, int, int>, std::string> forward;
    absl::flat_hash_map<std::tuple<int, int, int>, std::vector<int>> process;
    absl::flat_hash_map<std::tuple<int, int, int>, bool> emit;
    Store store;
  };
  struct Event {
    int64_t time;
    uint64_t tie;
    int64_t serial;
    int link;  // -1: injection
    int port;
    Packet pkt;
    friend bool operator>(const Event& a, const Event& b) {
      return std::tie(a.time, a.tie, a.serial) > std::tie(b.time, b.tie, b.serial);
    }
  };

  int Lower(Switch& s, int node, int group);
  void Arrive(int sw, InFlight f, bool ingress, Result& out);
  void RunProgram(int sw, InFlight f, int entry, std::vector<InFlight>& next, Result& out);
  void Send(int sw, const std::string& to, InFlight f, Result& out);
  void Drain(Result& out);
  absl::Status CheckPacket(int port, const Packet& pkt) const;
  void Trace(Result& out, int sw, const InFlight& f, TraceEvent::Kind k,
             std::string detail = "");

  std::shared_ptr<const DeploymentBundle> bundle_;
  std::shared_ptr<const Topology> topo_;
  std::vector<Switch> switches_;
  std::vector<std::deque<std::pair<int64_t, InFlight>>> links_;
  std::vector<int64_t> link_last_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::map<std::pair<int, int>, int64_t> steer_counts_;
  uint64_t seed_ = 0;
  int64_t now_ = 0;
  int64_t serial_ = 0;
  int64_t next_packet_ = 0;
  bool tracing_ = true;
};

// Two packets racing through the two tables `var_a` and `var_b`, whose
// cells at `index` record fields `field_a` and `field_b` of the last packet
// that wrote them.
struct RaceScenario {
  std::vector<std::tuple<int, Packet, int64_t>> packets;  // port, packet, time
  uint64_t seed = 0;
  std::string var_a, field_a, var_b, field_b;
  Value index;
};

struct RaceObservation {
  bool consistent = true;
  std::string detail;
};

// Runs the scenario on a copy of `net` in interleaved mode.
absl::StatusOr<RaceObservation> RaceProbe(const SimNetwork& net, const Program& prog,
                                          const RaceScenario& s);

}  // namespace snapnet

#endif  // SNAPNET_SIMNET_H_
