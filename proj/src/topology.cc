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


#include "snapnet/topology.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace snapnet {

using json = nlohmann::json;

int Topology::NodeIndex(const std::string& id) const {
  auto it = std::lower_bound(
      nodes.begin(), nodes.end(), id,
      [](const Node& n, const std::string& k) { return n.id < k; });
  if (it == nodes.end() || it->id != id) return -1;
  return static_cast<int>(it - nodes.begin());
}

std::vector<int> Topology::Ports() const {
  std::vector<int> out;
  for (const Node& n : nodes) out.insert(out.end(), n.ports.begin(), n.ports.end());
  std::sort(out.begin(), out.end());
  return out;
}

int Topology::SwitchOfPort(int port) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (int p : nodes[i].ports) {
      if (p == port) return static_cast<int>(i);
    }
  }
  return -1;
}

double Topology::Demand(int u, int v) const {
  auto it = demands.find({u, v});
  return it == demands.end() ? 0.0 : it->second;
}

int Topology::LinkIndex(int from, int to) const {
  auto it = std::lower_bound(links.begin(), links.end(), std::make_pair(from, to),
                             [](const Link& l, const std::pair<int, int>& k) {
                               return std::make_pair(l.from, l.to) < k;
                             });
  if (it == links.end() || it->from != from || it->to != to) return -1;
  return static_cast<int>(it - links.begin());
}

std::vector<std::vector<int>> Topology::OutLinks() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (size_t i = 0; i < links.size(); ++i) {
    out[links[i].from].push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

absl::Status Invalid(const std::string& msg) {
  return absl::InvalidArgumentError(absl::StrCat("topology: ", msg));
}

void SortLinks(Topology& t) {
  std::sort(t.links.begin(), t.links.end(),
            [](const Topology::Link& a, const Topology::Link& b) {
              return std::make_pair(a.from, a.to) < std::make_pair(b.from, b.to);
            });
}

void UniformDemands(Topology& t) {
  std::vector<int> ports = t.Ports();
  for (int u : ports) {
    for (int v : ports) {
      if (u != v) t.demands[{u, v}] = 1.0;
    }
  }
}

}  // namespace

absl::StatusOr<Topology> ParseTopology(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    return Invalid(e.what());
  }
  Topology t;
  try {
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
      return Invalid("missing node list");
    }
    for (const json& n : doc["nodes"]) {
      Topology::Node node;
      node.id = n.at("id").get<std::string>();
      if (n.contains("external_ports")) {
        node.ports = n["external_ports"].get<std::vector<int>>();
      }
      t.nodes.push_back(std::move(node));
    }
    std::sort(t.nodes.begin(), t.nodes.end(),
              [](const Topology::Node& a, const Topology::Node& b) {
                return a.id < b.id;
              });
    std::set<int> seen_ports;
    for (size_t i = 0; i < t.nodes.size(); ++i) {
      if (i > 0 && t.nodes[i].id == t.nodes[i - 1].id) {
        return Invalid(absl::StrCat("duplicate node ", t.nodes[i].id));
      }
      for (int p : t.nodes[i].ports) {
        if (!seen_ports.insert(p).second) {
          return Invalid(absl::StrCat("port ", p, " attached twice"));
        }
      }
    }
    if (t.nodes.empty()) return Invalid("no nodes");
    if (doc.contains("links")) {
      std::set<std::pair<int, int>> seen;
      for (const json& l : doc["links"]) {
        std::string from = l.at("from").get<std::string>();
        std::string to = l.at("to").get<std::string>();
        int a = t.NodeIndex(from), b = t.NodeIndex(to);
        if (a < 0 || b < 0) return Invalid(absl::StrCat("unknown link end ", from, "-", to));
        if (a == b) return Invalid(absl::StrCat("self loop at ", from));
        double cap = l.at("capacity").get<double>();
        if (!(cap > 0)) return Invalid(absl::StrCat("capacity of ", from, "-", to, " must be positive"));
        bool directed = l.value("directed", false);
        std::vector<std::pair<int, int>> dirs = {{a, b}};
        if (!directed) dirs.push_back({b, a});
        for (auto [x, y] : dirs) {
          if (!seen.insert({x, y}).second) {
            return Invalid(absl::StrCat("duplicate link ", t.nodes[x].id, "-", t.nodes[y].id));
          }
          t.links.push_back({x, y, cap});
        }
      }
    }
    SortLinks(t);
    if (doc.contains("demands")) {
      for (const json& d : doc["demands"]) {
        int u = d.at("u").get<int>(), v = d.at("v").get<int>();
        double vol = d.at("volume").get<double>();
        if (!seen_ports.count(u) || !seen_ports.count(v)) {
          return Invalid(absl::StrCat("demand between unknown ports ", u, ", ", v));
        }
        if (vol < 0) return Invalid("negative demand");
        t.demands[{u, v}] = vol;
      }
    } else {
      UniformDemands(t);
    }
  } catch (const json::exception& e) {
    return Invalid(e.what());
  }
  return t;
}

absl::StatusOr<Topology> LoadTopology(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseTopology(ss.str());
}

std::string TopologyToJson(const Topology& topo) {
  json doc;
  doc["nodes"] = json::array();
  for (const Topology::Node& n : topo.nodes) {
    json j = {{"id", n.id}};
    if (!n.ports.empty()) j["external_ports"] = n.ports;
    doc["nodes"].push_back(j);
  }
  doc["links"] = json::array();
  for (const Topology::Link& l : topo.links) {
    doc["links"].push_back({{"from", topo.nodes[l.from].id},
                            {"to", topo.nodes[l.to].id},
                            {"capacity", l.capacity},
                            {"directed", true}});
  }
  doc["demands"] = json::array();
  for (const auto& [uv, vol] : topo.demands) {
    doc["demands"].push_back({{"u", uv.first}, {"v", uv.second}, {"volume", vol}});
  }
  return doc.dump(2);
}

Topology GenerateTopology(int switches, double edge_fraction, uint64_t seed,
                          double capacity) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> pos(switches);
  for (auto& p : pos) p = {unit(rng), unit(rng)};
  auto dist = [&](int a, int b) {
    return std::hypot(pos[a].first - pos[b].first, pos[a].second - pos[b].second);
  };
  std::set<std::pair<int, int>> edges;
  auto add = [&](int a, int b) { edges.insert({std::min(a, b), std::max(a, b)}); };
  // Prim's tree over Euclidean distances keeps the graph connected.
  std::vector<bool> in(switches, false);
  std::vector<double> best(switches, 1e18);
  std::vector<int> parent(switches, -1);
  best[0] = 0;
  for (int it = 0; it < switches; ++it) {
    int u = -1;
    for (int v = 0; v < switches; ++v) {
      if (!in[v] && (u < 0 || best[v] < best[u])) u = v;
    }
    in[u] = true;
    if (parent[u] >= 0) add(u, parent[u]);
    for (int v = 0; v < switches; ++v) {
      if (!in[v] && dist(u, v) < best[v]) {
        best[v] = dist(u, v);
        parent[v] = u;
      }
    }
  }
  // Redundancy: each node also links to its nearest non-neighbour with
  // probability one half.
  for (int a = 0; a < switches; ++a) {
    if (unit(rng) < 0.5) continue;
    int pick = -1;
    for (int b = 0; b < switches; ++b) {
      if (b == a || edges.count({std::min(a, b), std::max(a, b)})) continue;
      if (pick < 0 || dist(a, b) < dist(a, pick)) pick = b;
    }
    if (pick >= 0) add(a, pick);
  }

  Topology t;
  int width = static_cast<int>(std::to_string(switches).size());
  std::vector<std::string> names(switches);
  for (int i = 0; i < switches; ++i) {
    std::string num = std::to_string(i);
    names[i] = "S" + std::string(width - num.size(), '0') + num;
    t.nodes.push_back({names[i], {}});
  }
  std::vector<int> degree(switches, 0);
  for (auto [a, b] : edges) {
    t.links.push_back({a, b, capacity});
    t.links.push_back({b, a, capacity});
    ++degree[a];
    ++degree[b];
  }
  SortLinks(t);
  std::vector<int> order(switches);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return degree[a] < degree[b]; });
  int edge_count = static_cast<int>(std::lround(edge_fraction * switches));
  std::vector<int> edge_nodes(order.begin(), order.begin() + edge_count);
  std::sort(edge_nodes.begin(), edge_nodes.end());
  int port = 1;
  for (int n : edge_nodes) t.nodes[n].ports.push_back(port++);
  UniformDemands(t);
  return t;
}

}  // namespace snapnet
