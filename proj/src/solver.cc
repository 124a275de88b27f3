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


#include "snapnet/solver.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <queue>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace snapnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Tol(double x) { return 1e-9 * std::max(1.0, std::fabs(x)); }

}  // namespace

Routing Solution::ToRouting() const {
  Routing rt;
  for (const auto& [uv, r] : routes) rt[uv] = {WeightedPath{r.nodes, 1.0}};
  return rt;
}

PlacementProblem::PlacementProblem(const Topology& topo, const StateDemand& demand,
                                   const OrderSpec& ord)
    : topo_(topo), ord_(ord) {
  std::vector<int> ports = topo.Ports();
  for (int u : ports) {
    for (int v : ports) {
      FlowInfo f;
      f.u = u;
      f.v = v;
      f.src = topo.SwitchOfPort(u);
      f.dst = topo.SwitchOfPort(v);
      f.demand = u == v ? 0.0 : topo.Demand(u, v);
      f.counted = f.demand > 0;
      for (const std::string& s : demand.Of(u, v)) {
        int g = ord.group_of.at(s);
        if (std::find(f.groups.begin(), f.groups.end(), g) == f.groups.end()) {
          f.groups.push_back(g);
        }
      }
      std::sort(f.groups.begin(), f.groups.end());
      flows_.push_back(std::move(f));
    }
  }
  std::vector<double> weight(ord.groups.size(), 0.0);
  for (const FlowInfo& f : flows_) {
    for (int g : f.groups) weight[g] += f.demand;
  }
  for (int g = 0; g < num_groups(); ++g) branch_order_.push_back(g);
  std::stable_sort(branch_order_.begin(), branch_order_.end(),
                   [&](int a, int b) { return weight[a] > weight[b]; });

  const int n = static_cast<int>(topo.nodes.size());
  dist_.assign(n, std::vector<double>(n, kInf));
  for (int i = 0; i < n; ++i) dist_[i][i] = 0;
  for (const Topology::Link& l : topo.links) {
    dist_[l.from][l.to] = std::min(dist_[l.from][l.to], 1.0 / l.capacity);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (dist_[i][k] == kInf) continue;
      for (int j = 0; j < n; ++j) {
        double via = dist_[i][k] + dist_[k][j];
        if (via < dist_[i][j]) dist_[i][j] = via;
      }
    }
  }
}

double PlacementProblem::LowerBound(const std::vector<int>& owner) const {
  double total = 0;
  for (const FlowInfo& f : flows_) {
    if (!f.counted) continue;
    int at = f.src;
    double cost = 0;
    for (int g : f.groups) {
      if (owner[g] < 0) continue;
      cost += dist_[at][owner[g]];
      at = owner[g];
    }
    cost += dist_[at][f.dst];
    total += f.demand * cost;
  }
  return total;
}

Placement PlacementProblem::ToPlacement(const std::vector<int>& owner) const {
  Placement pl;
  for (int g = 0; g < num_groups(); ++g) {
    for (const std::string& s : ord_.groups[g]) pl[s] = topo_.nodes[owner[g]].id;
  }
  return pl;
}

namespace {

bool Simple(std::vector<int> nodes) {
  std::sort(nodes.begin(), nodes.end());
  return std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end();
}

}  // namespace

std::optional<FlowRoute> PlacementProblem::SegmentRoute(const FlowInfo& f,
                                                        const std::vector<int>& owner,
                                                        const std::vector<double>& load,
                                                        double alpha) const {
  const int n = static_cast<int>(topo_.nodes.size());
  const auto out_links = topo_.OutLinks();
  // Waypoints with the groups served at each.
  std::vector<std::pair<int, std::vector<int>>> way = {{f.src, {}}};
  for (int g : f.groups) {
    if (owner[g] != way.back().first) way.push_back({owner[g], {}});
    way.back().second.push_back(g);
  }
  if (way.back().first != f.dst) way.push_back({f.dst, {}});
  std::vector<char> used(n, 0);
  for (size_t i = 0; i < way.size(); ++i) {
    if (used[way[i].first]) return std::nullopt;
    used[way[i].first] = 1;
  }
  FlowRoute route;
  route.nodes.push_back(f.src);
  for (int g : way[0].second) route.stops.push_back({g, 0});
  for (size_t i = 1; i < way.size(); ++i) {
    int from = way[i - 1].first, to = way[i].first;
    std::vector<double> d(n, kInf);
    std::vector<int> pred(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[from] = 0;
    pq.push({0.0, from});
    while (!pq.empty()) {
      auto [dd, x] = pq.top();
      pq.pop();
      if (dd > d[x] || x == to) continue;
      for (int li : out_links[x]) {
        const Topology::Link& l = topo_.links[li];
        if (used[l.to] && l.to != to) continue;
        double w = (1.0 / l.capacity) * (1.0 + alpha * load[li] / l.capacity);
        if (dd + w < d[l.to]) {
          d[l.to] = dd + w;
          pred[l.to] = x;
          pq.push({d[l.to], l.to});
        }
      }
    }
    if (d[to] == kInf) return std::nullopt;
    std::vector<int> seg;
    for (int x = to; x != from; x = pred[x]) seg.push_back(x);
    std::reverse(seg.begin(), seg.end());
    for (int x : seg) {
      used[x] = 1;
      route.nodes.push_back(x);
    }
    for (int g : way[i].second) {
      route.stops.push_back({g, static_cast<int>(route.nodes.size()) - 1});
    }
  }
  return route;
}

std::optional<Solution> PlacementProblem::Route(const std::vector<int>& owner,
                                                double alpha) const {
  const int n = static_cast<int>(topo_.nodes.size());
  const auto out_links = topo_.OutLinks();
  std::vector<double> load(topo_.links.size(), 0.0);
  std::vector<int> order(flows_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return flows_[a].demand > flows_[b].demand;
  });

  Solution sol;
  sol.placement = ToPlacement(owner);
  for (int fi : order) {
    const FlowInfo& f = flows_[fi];
    const int layers = static_cast<int>(f.groups.size()) + 1;
    auto id = [&](int k, int node) { return k * n + node; };
    std::vector<double> d(layers * n, kInf);
    std::vector<int> pred(layers * n, -1);
    using Item = std::tuple<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[id(0, f.src)] = 0;
    pq.push({0.0, id(0, f.src)});
    while (!pq.empty()) {
      auto [dd, x] = pq.top();
      pq.pop();
      if (dd > d[x]) continue;
      int k = x / n, node = x % n;
      auto relax = [&](int y, double w) {
        if (dd + w < d[y]) {
          d[y] = dd + w;
          pred[y] = x;
          pq.push({d[y], y});
        }
      };
      if (k + 1 < layers && owner[f.groups[k]] == node) relax(id(k + 1, node), 0.0);
      for (int li : out_links[node]) {
        const Topology::Link& l = topo_.links[li];
        relax(id(k, l.to), (1.0 / l.capacity) * (1.0 + alpha * load[li] / l.capacity));
      }
    }
    int target = id(layers - 1, f.dst);
    if (d[target] == kInf) return std::nullopt;
    std::vector<int> trail;
    for (int x = target; x >= 0; x = pred[x]) trail.push_back(x);
    std::reverse(trail.begin(), trail.end());
    FlowRoute route;
    for (size_t i = 0; i < trail.size(); ++i) {
      int k = trail[i] / n, node = trail[i] % n;
      if (i > 0 && k != trail[i - 1] / n) {
        route.stops.push_back({f.groups[k - 1], static_cast<int>(route.nodes.size()) - 1});
        continue;
      }
      route.nodes.push_back(node);
    }
    if (f.counted) {
      if (!Simple(route.nodes)) {
        std::optional<FlowRoute> alt = SegmentRoute(f, owner, load, alpha);
        if (!alt) return std::nullopt;
        route = std::move(*alt);
      }
      for (size_t i = 0; i + 1 < route.nodes.size(); ++i) {
        int li = topo_.LinkIndex(route.nodes[i], route.nodes[i + 1]);
        load[li] += f.demand;
        sol.objective += f.demand / topo_.links[li].capacity;
      }
    }
    sol.routes[{f.u, f.v}] = std::move(route);
  }
  for (size_t li = 0; li < load.size(); ++li) {
    if (load[li] > topo_.links[li].capacity + Tol(topo_.links[li].capacity)) {
      return std::nullopt;
    }
  }
  double lb = LowerBound(owner);
  sol.exact = std::fabs(sol.objective - lb) <= Tol(lb);
  return sol;
}

namespace {

using Clock = std::chrono::steady_clock;

// Incumbent shared by the search workers.
class Incumbent {
 public:
  // True if a subtree with bound `lb` and branching prefix `key` may still
  // hold a better solution.
  bool Promising(double lb, const std::vector<int>& key) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!best_) return true;
    if (lb > best_->objective + Tol(best_->objective)) return false;
    if (lb >= best_->objective - Tol(best_->objective)) {
      return std::lexicographical_compare(key.begin(), key.end(), key_.begin(),
                                          key_.begin() + key.size());
    }
    return true;
  }

  void Offer(Solution sol, const std::vector<int>& key) {
    std::lock_guard<std::mutex> lock(mu_);
    if (best_) {
      double b = best_->objective;
      if (sol.objective > b + Tol(b)) return;
      if (sol.objective >= b - Tol(b) && !(key < key_)) return;
    }
    best_ = std::move(sol);
    key_ = key;
  }

  std::optional<Solution> Take() { return std::move(best_); }

 private:
  std::mutex mu_;
  std::optional<Solution> best_;
  std::vector<int> key_;
};

struct Limits {
  explicit Limits(const SolveOptions& opts)
      : node_limit(opts.node_limit),
        deadline(Clock::now()),
        timed(opts.time_limit_seconds > 0) {
    if (timed) {
      deadline += std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(opts.time_limit_seconds));
    }
  }

  int64_t node_limit;
  Clock::time_point deadline;
  bool timed;
  std::atomic<int64_t> nodes{0};
  std::atomic<int64_t> routed{0};
  std::atomic<bool> hit{false};

  bool Spend() {
    int64_t n = ++nodes;
    if ((node_limit >= 0 && n > node_limit) || (timed && Clock::now() > deadline)) {
      hit = true;
    }
    return !hit;
  }
};

// Candidate switches for group `g`, cheapest bound first.
std::vector<int> ChildOrder(const PlacementProblem& p, std::vector<int> owner, int g) {
  const int width = static_cast<int>(p.topo().nodes.size());
  std::vector<std::pair<double, int>> by_bound;
  by_bound.reserve(width);
  for (int n = 0; n < width; ++n) {
    owner[g] = n;
    by_bound.emplace_back(p.LowerBound(owner), n);
  }
  std::sort(by_bound.begin(), by_bound.end());
  std::vector<int> out;
  out.reserve(width);
  for (const auto& [lb, n] : by_bound) out.push_back(n);
  return out;
}

void Dfs(const PlacementProblem& p, double alpha, int depth, std::vector<int>& owner,
         std::vector<int>& key, Incumbent& inc, Limits& lim) {
  if (!lim.Spend()) return;
  if (!inc.Promising(p.LowerBound(owner), key)) return;
  if (depth == p.num_groups()) {
    ++lim.routed;
    if (auto sol = p.Route(owner, alpha)) inc.Offer(std::move(*sol), key);
    return;
  }
  int g = p.branch_order()[depth];
  for (int n : ChildOrder(p, owner, g)) {
    owner[g] = n;
    key.push_back(n);
    Dfs(p, alpha, depth + 1, owner, key, inc, lim);
    key.pop_back();
    owner[g] = -1;
    if (lim.hit) return;
  }
}

std::optional<std::vector<int>> FixedOwners(const PlacementProblem& p,
                                            const Placement& fixed,
                                            std::string* error) {
  std::vector<int> owner(p.num_groups(), -1);
  for (int g = 0; g < p.num_groups(); ++g) {
    for (const std::string& s : p.order().groups[g]) {
      auto it = fixed.find(s);
      if (it == fixed.end()) {
        *error = absl::StrCat("placement misses variable ", s);
        return std::nullopt;
      }
      int n = p.topo().NodeIndex(it->second);
      if (n < 0) {
        *error = absl::StrCat("placement names unknown switch ", it->second);
        return std::nullopt;
      }
      if (owner[g] >= 0 && owner[g] != n) {
        *error = absl::StrCat("placement separates tied variables of ", s);
        return std::nullopt;
      }
      owner[g] = n;
    }
  }
  return owner;
}

absl::StatusOr<Solution> Finish(std::optional<Solution> best, Limits& lim) {
  if (!best) {
    if (lim.hit) {
      return absl::DeadlineExceededError("search limit reached before any feasible placement");
    }
    return absl::FailedPreconditionError(
        "infeasible: no placement admits order-respecting paths within capacity");
  }
  best->exact = best->exact && !lim.hit;
  best->nodes_explored = lim.nodes;
  best->placements_routed = lim.routed;
  return std::move(*best);
}

absl::StatusOr<Solution> RouteFixed(const PlacementProblem& p, const SolveOptions& opts) {
  std::string error;
  auto owner = FixedOwners(p, *opts.fixed, &error);
  if (!owner) return absl::InvalidArgumentError(error);
  auto sol = p.Route(*owner, opts.alpha);
  if (!sol) {
    return absl::FailedPreconditionError("infeasible: the fixed placement admits no routing");
  }
  sol->placements_routed = 1;
  return std::move(*sol);
}

}  // namespace

absl::StatusOr<Solution> SolveSerial(const PlacementProblem& p, const SolveOptions& opts) {
  if (opts.fixed) return RouteFixed(p, opts);
  Limits lim(opts);
  Incumbent inc;
  std::vector<int> owner(p.num_groups(), -1), key;
  Dfs(p, opts.alpha, 0, owner, key, inc, lim);
  return Finish(inc.Take(), lim);
}

absl::StatusOr<Solution> SolveParallel(const PlacementProblem& p,
                                       const SolveOptions& opts) {
  if (opts.fixed) return RouteFixed(p, opts);
  if (p.num_groups() == 0) return SolveSerial(p, opts);
  Limits lim(opts);
  Incumbent inc;
  const int first = p.branch_order()[0];
  const std::vector<int> children =
      ChildOrder(p, std::vector<int>(p.num_groups(), -1), first);
  const int width = static_cast<int>(children.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < width; ++i) {
    if (lim.hit) continue;
    const int n = children[i];
    std::vector<int> owner(p.num_groups(), -1), key = {n};
    owner[first] = n;
    Dfs(p, opts.alpha, 1, owner, key, inc, lim);
  }
  return Finish(inc.Take(), lim);
}

absl::StatusOr<Solution> Solve(const Topology& topo, const StateDemand& demand,
                               const OrderSpec& ord, const SolveOptions& opts,
                               bool parallel) {
  PlacementProblem p(topo, demand, ord);
  return parallel ? SolveParallel(p, opts) : SolveSerial(p, opts);
}

}  // namespace snapnet
