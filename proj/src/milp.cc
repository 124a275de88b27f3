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


#include "snapnet/milp.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"

namespace snapnet {

namespace {

// LP names may not contain '-'.
std::string Clean(const std::string& s) {
  return absl::StrReplaceAll(s, {{"-", "_"}, {" ", "_"}});
}

std::string Num(double x) { return absl::StrFormat("%.12g", x); }

std::string FlowTag(const MilpModel::Flow& f) {
  return absl::StrCat("u", f.u, "_v", f.v);
}

}  // namespace

std::string MilpModel::Violation::ToString() const {
  return absl::StrCat(row, ": lhs ", Num(lhs), " ",
                      sense == '<' ? "<=" : sense == '>' ? ">=" : "=", " ",
                      Num(rhs));
}

MilpModel MilpModel::Build(const Topology& topo, const StateDemand& demand,
                           const OrderSpec& ord, Mode mode,
                           const Placement* fixed) {
  MilpModel m;
  m.mode_ = mode;
  m.num_switches_ = static_cast<int>(topo.nodes.size());
  for (const Topology::Node& n : topo.nodes) m.node_names_.push_back(n.id);
  std::vector<int> ports = topo.Ports();
  for (int p : ports) m.node_names_.push_back(absl::StrCat("port", p));
  for (const Topology::Link& l : topo.links) {
    m.arcs_.push_back({l.from, l.to, l.capacity, false});
  }
  for (int p : ports) {
    int sw = topo.SwitchOfPort(p);
    int pn = m.PortNode(p);
    m.arcs_.push_back({pn, sw, 0, true});
    m.arcs_.push_back({sw, pn, 0, true});
  }
  std::sort(m.arcs_.begin(), m.arcs_.end(), [](const Arc& a, const Arc& b) {
    return std::make_pair(a.from, a.to) < std::make_pair(b.from, b.to);
  });
  m.in_arcs_.assign(m.num_nodes(), {});
  m.out_arcs_.assign(m.num_nodes(), {});
  for (size_t i = 0; i < m.arcs_.size(); ++i) {
    m.arc_index_[{m.arcs_[i].from, m.arcs_[i].to}] = static_cast<int>(i);
    m.out_arcs_[m.arcs_[i].from].push_back(static_cast<int>(i));
    m.in_arcs_[m.arcs_[i].to].push_back(static_cast<int>(i));
  }

  m.vars_ = ord.StateOrder();
  for (const auto& [uv, vars] : demand.flows) {
    for (const std::string& s : vars) {
      if (m.VarIndex(s) < 0) m.vars_.push_back(s);
    }
  }
  for (const auto& [s, t] : ord.tied) {
    m.tied_.push_back({m.VarIndex(s), m.VarIndex(t)});
  }
  for (const auto& [s, t] : ord.dep) {
    m.dep_.push_back({m.VarIndex(s), m.VarIndex(t)});
  }
  for (const auto& [uv, vol] : topo.demands) {
    if (vol <= 0 || uv.first == uv.second) continue;
    Flow f{uv.first, uv.second, vol, {}};
    for (const std::string& s : demand.Of(uv.first, uv.second)) {
      f.vars.push_back(m.VarIndex(s));
    }
    std::sort(f.vars.begin(), f.vars.end());
    m.flows_.push_back(std::move(f));
  }
  if (mode == Mode::kRouteOnly) {
    if (fixed == nullptr) throw std::invalid_argument("route-only mode needs a placement");
    m.fixed_.assign(m.vars_.size(), -1);
    for (size_t s = 0; s < m.vars_.size(); ++s) {
      auto it = fixed->find(m.vars_[s]);
      if (it == fixed->end()) {
        throw std::invalid_argument("placement misses variable " + m.vars_[s]);
      }
      int n = topo.NodeIndex(it->second);
      if (n < 0) throw std::invalid_argument("placement names unknown switch " + it->second);
      m.fixed_[s] = n;
    }
    for (auto [s, t] : m.tied_) {
      if (m.fixed_[s] != m.fixed_[t]) {
        throw std::invalid_argument("placement separates tied variables " +
                                    m.vars_[s] + " and " + m.vars_[t]);
      }
    }
  }
  return m;
}

int MilpModel::PortNode(int port) const {
  std::string name = absl::StrCat("port", port);
  for (int n = num_switches_; n < num_nodes(); ++n) {
    if (node_names_[n] == name) return n;
  }
  return -1;
}

int MilpModel::ArcIndex(int from, int to) const {
  auto it = arc_index_.find({from, to});
  return it == arc_index_.end() ? -1 : it->second;
}

int MilpModel::VarIndex(const std::string& var) const {
  for (size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i] == var) return static_cast<int>(i);
  }
  return -1;
}

std::string MilpModel::VarName(const Var& v) const {
  switch (v.kind) {
    case Var::kR: {
      const Arc& a = arcs_[v.b];
      return absl::StrCat("R_", FlowTag(flows_[v.a]), "_", Clean(node_names_[a.from]),
                          "_", Clean(node_names_[a.to]));
    }
    case Var::kP:
      return absl::StrCat("P_", Clean(vars_[v.a]), "_", Clean(node_names_[v.b]));
    case Var::kPS: {
      const Arc& a = arcs_[v.c];
      return absl::StrCat("PS_", Clean(vars_[v.a]), "_", FlowTag(flows_[v.b]), "_",
                          Clean(node_names_[a.from]), "_", Clean(node_names_[a.to]));
    }
  }
  return "";
}

void MilpModel::ForEachRow(const std::function<void(const Row&)>& fn) const {
  const bool place = mode_ == Mode::kPlaceAndRoute;
  auto R = [](int f, int a) { return Var{Var::kR, f, a, 0}; };
  auto P = [](int s, int n) { return Var{Var::kP, s, n, 0}; };
  auto PS = [](int s, int f, int a) { return Var{Var::kPS, s, f, a}; };
  // Value of P_sn when it is a constant.
  auto fixed_p = [&](int s, int n) { return fixed_[s] == n ? 1.0 : 0.0; };
  Row row;
  auto emit = [&](std::string name, char sense, double rhs) {
    row.name = std::move(name);
    row.sense = sense;
    row.rhs = rhs;
    if (!row.terms.empty()) fn(row);
    row.terms.clear();
  };

  for (size_t fi = 0; fi < flows_.size(); ++fi) {
    const Flow& f = flows_[fi];
    int fidx = static_cast<int>(fi);
    int un = PortNode(f.u), vn = PortNode(f.v);
    std::string tag = FlowTag(f);
    for (int a : out_arcs_[un]) row.terms.push_back({R(fidx, a), 1});
    emit(absl::StrCat("src_", tag), '=', 1);
    for (int a : in_arcs_[vn]) row.terms.push_back({R(fidx, a), 1});
    emit(absl::StrCat("snk_", tag), '=', 1);
    for (int n = 0; n < num_nodes(); ++n) {
      std::string nn = Clean(node_names_[n]);
      if (n != un && n != vn) {
        for (int a : in_arcs_[n]) row.terms.push_back({R(fidx, a), 1});
        for (int a : out_arcs_[n]) row.terms.push_back({R(fidx, a), -1});
        emit(absl::StrCat("cons_", tag, "_", nn), '=', 0);
      }
      for (int a : in_arcs_[n]) row.terms.push_back({R(fidx, a), 1});
      emit(absl::StrCat("once_", tag, "_", nn), '<', 1);
    }
  }
  for (size_t a = 0; a < arcs_.size(); ++a) {
    if (arcs_[a].is_virtual) continue;
    for (size_t fi = 0; fi < flows_.size(); ++fi) {
      row.terms.push_back({R(static_cast<int>(fi), static_cast<int>(a)), flows_[fi].demand});
    }
    emit(absl::StrCat("cap_", Clean(node_names_[arcs_[a].from]), "_",
                      Clean(node_names_[arcs_[a].to])),
         '<', arcs_[a].capacity);
  }

  for (size_t si = 0; si < vars_.size(); ++si) {
    int s = static_cast<int>(si);
    std::string sn = Clean(vars_[s]);
    if (place) {
      for (int n = 0; n < num_switches_; ++n) row.terms.push_back({P(s, n), 1});
      emit(absl::StrCat("place_", sn), '=', 1);
    }
    for (size_t fi = 0; fi < flows_.size(); ++fi) {
      const Flow& f = flows_[fi];
      int fidx = static_cast<int>(fi);
      if (std::find(f.vars.begin(), f.vars.end(), s) == f.vars.end()) continue;
      std::string tag = absl::StrCat(sn, "_", FlowTag(f));
      int vn = PortNode(f.v);
      for (int n = 0; n < num_switches_; ++n) {
        std::string nn = Clean(node_names_[n]);
        for (int a : in_arcs_[n]) row.terms.push_back({R(fidx, a), 1});
        double rhs = 0;
        if (place) {
          row.terms.push_back({P(s, n), -1});
        } else {
          rhs = fixed_p(s, n);
        }
        emit(absl::StrCat("visit_", tag, "_", nn), '>', rhs);
      }
      for (size_t a = 0; a < arcs_.size(); ++a) {
        int ai = static_cast<int>(a);
        row.terms.push_back({PS(s, fidx, ai), 1});
        row.terms.push_back({R(fidx, ai), -1});
        emit(absl::StrCat("pass_", tag, "_", Clean(node_names_[arcs_[a].from]), "_",
                          Clean(node_names_[arcs_[a].to])),
             '<', 0);
      }
      for (int n = 0; n < num_nodes(); ++n) {
        if (n == vn) continue;
        double rhs = 0;
        if (n < num_switches_) {
          if (place) {
            row.terms.push_back({P(s, n), 1});
          } else {
            rhs = -fixed_p(s, n);
          }
        }
        for (int a : in_arcs_[n]) row.terms.push_back({PS(s, fidx, a), 1});
        for (int a : out_arcs_[n]) row.terms.push_back({PS(s, fidx, a), -1});
        emit(absl::StrCat("pcons_", tag, "_", Clean(node_names_[n])), '=', rhs);
      }
      for (int a : in_arcs_[vn]) row.terms.push_back({PS(s, fidx, a), 1});
      emit(absl::StrCat("sink_", tag), '=', 1);
    }
  }
  if (place) {
    for (auto [s, t] : tied_) {
      for (int n = 0; n < num_switches_; ++n) {
        row.terms.push_back({P(s, n), 1});
        row.terms.push_back({P(t, n), -1});
        emit(absl::StrCat("tied_", Clean(vars_[s]), "_", Clean(vars_[t]), "_",
                          Clean(node_names_[n])),
             '=', 0);
      }
    }
  }
  for (auto [s, t] : dep_) {
    for (size_t fi = 0; fi < flows_.size(); ++fi) {
      const Flow& f = flows_[fi];
      int fidx = static_cast<int>(fi);
      auto has = [&](int x) {
        return std::find(f.vars.begin(), f.vars.end(), x) != f.vars.end();
      };
      if (!has(s) || !has(t)) continue;
      for (int n = 0; n < num_switches_; ++n) {
        double rhs = 0;
        if (place) {
          row.terms.push_back({P(s, n), 1});
          row.terms.push_back({P(t, n), -1});
        } else {
          rhs = fixed_p(t, n) - fixed_p(s, n);
        }
        for (int a : in_arcs_[n]) row.terms.push_back({PS(s, fidx, a), 1});
        emit(absl::StrCat("order_", Clean(vars_[s]), "_", Clean(vars_[t]), "_",
                          FlowTag(f), "_", Clean(node_names_[n])),
             '>', rhs);
      }
    }
  }
}

std::vector<std::pair<MilpModel::Var, double>> MilpModel::Objective() const {
  std::vector<std::pair<Var, double>> out;
  for (size_t fi = 0; fi < flows_.size(); ++fi) {
    for (size_t a = 0; a < arcs_.size(); ++a) {
      if (arcs_[a].is_virtual) continue;
      out.push_back({Var{Var::kR, static_cast<int>(fi), static_cast<int>(a), 0},
                     flows_[fi].demand / arcs_[a].capacity});
    }
  }
  return out;
}

MilpModel::Assignment MilpModel::Zero() const {
  Assignment x;
  x.r.assign(flows_.size() * arcs_.size(), 0.0);
  x.p.assign(vars_.size() * num_switches_, 0.0);
  x.ps.assign(vars_.size() * flows_.size() * arcs_.size(), 0.0);
  return x;
}

double MilpModel::Value(const Assignment& x, const Var& v) const {
  switch (v.kind) {
    case Var::kR:
      return x.r[v.a * arcs_.size() + v.b];
    case Var::kP:
      return x.p[v.a * num_switches_ + v.b];
    case Var::kPS:
      return x.ps[(v.a * flows_.size() + v.b) * arcs_.size() + v.c];
  }
  return 0;
}

double MilpModel::ObjectiveValue(const Assignment& x) const {
  double total = 0;
  for (const auto& [v, c] : Objective()) total += c * Value(x, v);
  return total;
}

std::string ExportLp(const MilpModel& m) {
  std::string out = "\\ snapnet placement and routing model\nMinimize\n obj:";
  auto terms_text = [&](const std::vector<std::pair<MilpModel::Var, double>>& terms) {
    std::string s;
    int on_line = 0;
    bool first = true;
    for (const auto& [v, c] : terms) {
      if (c == 0) continue;
      if (on_line == 6) {
        s += "\n   ";
        on_line = 0;
      }
      if (c < 0) {
        absl::StrAppend(&s, " - ", Num(-c), " ", m.VarName(v));
      } else {
        absl::StrAppend(&s, first ? " " : " + ", Num(c), " ", m.VarName(v));
      }
      first = false;
      ++on_line;
    }
    return first ? std::string(" 0") : s;
  };
  out += terms_text(m.Objective());
  out += "\nSubject To\n";
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<MilpModel::Var> used;
  m.ForEachRow([&](const MilpModel::Row& r) {
    std::string text = absl::StrCat(" ", r.name, ":", terms_text(r.terms), " ",
                                    r.sense == '<' ? "<=" : r.sense == '>' ? ">=" : "=",
                                    " ", Num(r.rhs), "\n");
    rows.push_back({r.name, std::move(text)});
    for (const auto& [v, c] : r.terms) used.push_back(v);
  });
  std::sort(rows.begin(), rows.end());
  for (const auto& [name, text] : rows) out += text;
  for (const auto& [v, c] : m.Objective()) used.push_back(v);
  std::vector<std::string> continuous, binary;
  for (const MilpModel::Var& v : used) {
    (m.IsBinary(v) ? binary : continuous).push_back(m.VarName(v));
  }
  for (auto* list : {&continuous, &binary}) {
    std::sort(list->begin(), list->end());
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }
  if (!continuous.empty()) {
    out += "Bounds\n";
    for (const std::string& n : continuous) absl::StrAppend(&out, " 0 <= ", n, " <= 1\n");
  }
  if (!binary.empty()) {
    out += "Binary\n";
    for (const std::string& n : binary) absl::StrAppend(&out, " ", n, "\n");
  }
  out += "End\n";
  return out;
}

MilpModel::Assignment ToAssignment(const MilpModel& m, const Topology& topo,
                                   const Placement& pl, const Routing& rt) {
  MilpModel::Assignment x = m.Zero();
  const size_t arcs = m.arcs().size();
  const size_t flows = m.flows().size();
  std::vector<int> owner(m.vars().size(), -1);
  for (size_t s = 0; s < m.vars().size(); ++s) {
    auto it = pl.find(m.vars()[s]);
    if (it == pl.end()) continue;
    owner[s] = topo.NodeIndex(it->second);
    if (owner[s] >= 0) x.p[s * m.num_switches() + owner[s]] = 1.0;
  }
  for (size_t fi = 0; fi < flows; ++fi) {
    const MilpModel::Flow& f = m.flows()[fi];
    auto it = rt.find({f.u, f.v});
    if (it == rt.end()) continue;
    for (const WeightedPath& p : it->second) {
      std::vector<int> full = {m.PortNode(f.u)};
      full.insert(full.end(), p.nodes.begin(), p.nodes.end());
      full.push_back(m.PortNode(f.v));
      std::vector<int> path_arcs;
      for (size_t k = 0; k + 1 < full.size(); ++k) {
        int a = m.ArcIndex(full[k], full[k + 1]);
        if (a < 0) {
          throw std::invalid_argument("routing uses a missing link " +
                                      m.node_name(full[k]) + "-" +
                                      m.node_name(full[k + 1]));
        }
        path_arcs.push_back(a);
        x.r[fi * arcs + a] += p.weight;
      }
      for (int s : f.vars) {
        if (owner[s] < 0) continue;
        auto pos = std::find(full.begin(), full.end(), owner[s]);
        if (pos == full.end()) continue;
        for (size_t k = pos - full.begin(); k < path_arcs.size(); ++k) {
          x.ps[(s * flows + fi) * arcs + path_arcs[k]] += p.weight;
        }
      }
    }
  }
  return x;
}

std::vector<MilpModel::Violation> CheckAssignment(const MilpModel& m,
                                                  const MilpModel::Assignment& x) {
  std::vector<MilpModel::Violation> out;
  m.ForEachRow([&](const MilpModel::Row& r) {
    double lhs = 0;
    for (const auto& [v, c] : r.terms) lhs += c * m.Value(x, v);
    bool ok = r.sense == '<'   ? lhs <= r.rhs + kCheckTolerance
              : r.sense == '>' ? lhs >= r.rhs - kCheckTolerance
                               : std::fabs(lhs - r.rhs) <= kCheckTolerance;
    if (!ok) out.push_back({r.name, lhs, r.sense, r.rhs});
  });
  auto bound = [&](const std::string& name, double v, bool binary) {
    bool ok = v >= -kCheckTolerance && v <= 1 + kCheckTolerance;
    if (binary) ok = std::fabs(v) <= kCheckTolerance || std::fabs(v - 1) <= kCheckTolerance;
    if (!ok) out.push_back({"bound_" + name, v, binary ? '=' : '<', 1});
  };
  const size_t arcs = m.arcs().size();
  const size_t flows = m.flows().size();
  for (size_t i = 0; i < x.r.size(); ++i) {
    if (x.r[i] != 0) {
      bound(m.VarName({MilpModel::Var::kR, static_cast<int>(i / arcs),
                       static_cast<int>(i % arcs), 0}),
            x.r[i], false);
    }
  }
  if (m.mode() == MilpModel::Mode::kPlaceAndRoute) {
    for (size_t i = 0; i < x.p.size(); ++i) {
      bound(m.VarName({MilpModel::Var::kP, static_cast<int>(i / m.num_switches()),
                       static_cast<int>(i % m.num_switches()), 0}),
            x.p[i], true);
    }
  }
  for (size_t i = 0; i < x.ps.size(); ++i) {
    if (x.ps[i] == 0) continue;
    int s = static_cast<int>(i / (flows * arcs));
    int f = static_cast<int>((i / arcs) % flows);
    MilpModel::Var v{MilpModel::Var::kPS, s, f, static_cast<int>(i % arcs)};
    const auto& need = m.flows()[f].vars;
    if (std::find(need.begin(), need.end(), s) == need.end()) {
      out.push_back({"unused_" + m.VarName(v), x.ps[i], '=', 0});
    } else {
      bound(m.VarName(v), x.ps[i], false);
    }
  }
  return out;
}

std::vector<MilpModel::Violation> CheckSolution(const MilpModel& m,
                                                const Topology& topo,
                                                const Placement& pl,
                                                const Routing& rt) {
  return CheckAssignment(m, ToAssignment(m, topo, pl, rt));
}

}  // namespace snapnet
