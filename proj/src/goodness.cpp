#include "resched/goodness.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace resched {

Rat LightPlacement::machine_load(int machine, int num_machines) const {
  (void)num_machines;
  Rat load(0);
  for (const auto& [type, split] : onto) {
    if (type.first == machine) load += split.first;
    if (type.second == machine) load += split.second;
  }
  return load;
}

MaxFlowResult max_flow(const FlowNetwork& net) {
  struct Edge {
    int to;
    Rat cap;
    int rev;
    bool forward;
  };
  std::vector<std::vector<Edge>> g(net.num_nodes);
  std::vector<std::pair<int, int>> arc_pos;  // (node, edge index) per input arc
  arc_pos.reserve(net.arcs.size());
  for (const auto& a : net.arcs) {
    if (a.cap.sign() < 0) throw std::invalid_argument("max_flow: negative cap");
    g[a.from].push_back({a.to, a.cap, static_cast<int>(g[a.to].size()), true});
    g[a.to].push_back({a.from, Rat(0), static_cast<int>(g[a.from].size()) - 1,
                       false});
    arc_pos.push_back({a.from, static_cast<int>(g[a.from].size()) - 1});
  }
  Rat total(0);
  while (true) {
    // BFS for a shortest augmenting path
    std::vector<int> prev_node(net.num_nodes, -1), prev_edge(net.num_nodes, -1);
    std::deque<int> queue{net.source};
    prev_node[net.source] = net.source;
    while (!queue.empty() && prev_node[net.sink] < 0) {
      int u = queue.front();
      queue.pop_front();
      for (size_t ei = 0; ei < g[u].size(); ++ei) {
        const Edge& e = g[u][ei];
        if (e.cap.sign() > 0 && prev_node[e.to] < 0) {
          prev_node[e.to] = u;
          prev_edge[e.to] = static_cast<int>(ei);
          queue.push_back(e.to);
        }
      }
    }
    if (prev_node[net.sink] < 0) break;
    Rat aug = g[prev_node[net.sink]][prev_edge[net.sink]].cap;
    for (int v = net.sink; v != net.source; v = prev_node[v])
      aug = rat_min(aug, g[prev_node[v]][prev_edge[v]].cap);
    for (int v = net.sink; v != net.source; v = prev_node[v]) {
      Edge& e = g[prev_node[v]][prev_edge[v]];
      e.cap -= aug;
      g[v][e.rev].cap += aug;
    }
    total += aug;
  }
  MaxFlowResult res;
  res.value = total;
  res.flow.reserve(net.arcs.size());
  for (size_t i = 0; i < net.arcs.size(); ++i) {
    auto [u, ei] = arc_pos[i];
    const Edge& e = g[u][ei];
    res.flow.push_back(g[e.to][e.rev].cap);  // reverse residual = shipped flow
  }
  return res;
}

std::pair<bool, LightPlacement> is_delta_good(const CanonicalInstance& ci,
                                              const HeavyAssignment& f,
                                              const Rat& delta) {
  if (delta > Rat(1))
    throw std::invalid_argument("is_delta_good: delta must be at most 1");
  int m = ci.num_machines();
  auto covered = f.covered(m);

  FlowNetwork net;
  // nodes: 0 = source, 1..T = type nodes, T+1..T+m = machines, last = sink
  int t_count = static_cast<int>(ci.w.size());
  net.num_nodes = 2 + t_count + m;
  net.source = 0;
  net.sink = net.num_nodes - 1;
  auto machine_node = [&](int i) { return 1 + t_count + i; };

  std::vector<std::pair<int, int>> types;
  types.reserve(ci.w.size());
  Rat demand(0);
  int tn = 1;
  std::vector<int> type_arc, h_arc, k_arc;
  for (const auto& [type, load] : ci.w) {
    types.push_back(type);
    type_arc.push_back(static_cast<int>(net.arcs.size()));
    net.arcs.push_back({net.source, tn, load});
    h_arc.push_back(static_cast<int>(net.arcs.size()));
    net.arcs.push_back({tn, machine_node(type.first), load});
    if (type.second != type.first) {
      k_arc.push_back(static_cast<int>(net.arcs.size()));
      net.arcs.push_back({tn, machine_node(type.second), load});
    } else {
      k_arc.push_back(-1);
    }
    demand += load;
    ++tn;
  }
  for (int i = 0; i < m; ++i) {
    Rat cap = Rat(covered[i] ? 0 : 1) + Rat(1) - delta;
    if (cap.sign() < 0) cap = Rat(0);
    net.arcs.push_back({machine_node(i), net.sink, cap});
  }

  auto res = max_flow(net);
  LightPlacement placement;
  for (size_t t = 0; t < types.size(); ++t) {
    Rat to_h = res.flow[h_arc[t]];
    Rat to_k = k_arc[t] >= 0 ? res.flow[k_arc[t]] : Rat(0);
    placement.onto[types[t]] = {to_h, to_k};
  }
  return {res.value == demand, placement};
}

namespace {

Rat w_internal(const CanonicalInstance& ci, const std::vector<char>& in_s) {
  Rat sum(0);
  for (const auto& [type, load] : ci.w)
    if (in_s[type.first] && in_s[type.second]) sum += load;
  return sum;
}

}  // namespace

bool weakly_connected_in_light_graph(const CanonicalInstance& ci,
                                     const std::vector<int>& s) {
  if (s.empty()) return true;
  std::vector<char> in_s(ci.num_machines(), 0);
  for (int i : s) in_s[i] = 1;
  std::vector<std::vector<int>> adj(ci.num_machines());
  for (const auto& [type, load] : ci.w) {
    (void)load;
    auto [h, k] = type;
    if (h != k && in_s[h] && in_s[k]) {
      adj[h].push_back(k);
      adj[k].push_back(h);
    }
  }
  std::vector<char> seen(ci.num_machines(), 0);
  std::deque<int> queue{s[0]};
  seen[s[0]] = 1;
  size_t reached = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        queue.push_back(v);
      }
  }
  return reached == s.size();
}

std::pair<bool, std::optional<Witness>> delta_good_bruteforce(
    const CanonicalInstance& ci, const HeavyAssignment& f, const Rat& delta) {
  int m = ci.num_machines();
  if (m > 25)
    throw std::invalid_argument("delta_good_bruteforce: more than 25 machines");
  auto covered = f.covered(m);
  Rat two_minus_delta = Rat(2) - delta;

  std::optional<Witness> worst;
  for (uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<char> in_s(m, 0);
    int size = 0, t_count = 0;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) {
        in_s[i] = 1;
        ++size;
        if (covered[i]) ++t_count;
      }
    Rat wss = w_internal(ci, in_s);
    Rat slack = Rat(t_count) + wss - two_minus_delta * Rat(size);
    if (slack.sign() > 0 && (!worst || slack > worst->slack)) {
      Witness w;
      for (int i = 0; i < m; ++i)
        if (in_s[i]) {
          w.S.push_back(i);
          if (covered[i]) w.T.push_back(i);
        }
      w.delta = delta;
      w.slack = slack;
      w.connected = weakly_connected_in_light_graph(ci, w.S);
      worst = std::move(w);
    }
  }
  return {!worst.has_value(), worst};
}

Rat deficiency(const CanonicalInstance& ci, int h) {
  Rat load = ci.machine_load(h);
  return Rat(1) - load;
}

Rat CanonicalInstance::machine_load(int h) const {
  Rat load = z[h];
  Rat one_minus_zh = Rat(1) - z[h];
  for (const auto& [type, wl] : w) {
    if (type.first == h) load += wl * z[type.second];
    if (type.second == h) load += wl * one_minus_zh;
  }
  return load;
}

SubsetStats subset_stats(const CanonicalInstance& ci,
                         const std::vector<int>& s) {
  SubsetStats st{Rat(0), Rat(0), Rat(0), Rat(0)};
  std::vector<char> in_s(ci.num_machines(), 0);
  for (int i : s) in_s[i] = 1;
  for (int i : s) {
    st.z_sum += ci.z[i];
    st.phi += deficiency(ci, i);
  }
  // bnd(S) = sum_{h in S, k notin S} (w[k][h]*(1-z_h) + w[h][k]*z_k)
  for (const auto& [type, load] : ci.w) {
    auto [a, b] = type;  // load of type (a,b): owner b, overflow target a
    if (in_s[a] && in_s[b]) {
      st.w_ss += load;
      continue;
    }
    if (in_s[b] && !in_s[a]) st.bnd += load * (Rat(1) - ci.z[b]);
    if (in_s[a] && !in_s[b]) st.bnd += load * ci.z[b];
  }
  return st;
}

IntegralPlacement integral_light_assignment(const CanonicalInstance& ci,
                                            const HeavyAssignment& f,
                                            const LightPlacement& placement,
                                            const Rat& unit) {
  (void)f;
  if (unit.sign() <= 0)
    throw std::invalid_argument("integral_light_assignment: unit must be > 0");
  IntegralPlacement out;

  // Supplies must be whole numbers of units.
  std::vector<std::pair<int, int>> types;
  std::vector<long long> supply;
  bool already_integral = true;
  for (const auto& [type, load] : ci.w) {
    Rat n = load / unit;
    if (!n.is_integer())
      throw std::invalid_argument(
          "integral_light_assignment: load of type (" +
          std::to_string(type.first) + "," + std::to_string(type.second) +
          ") is not a multiple of the unit");
    types.push_back(type);
    supply.push_back(n.num());
    auto it = placement.onto.find(type);
    Rat to_h = it == placement.onto.end() ? Rat(0) : it->second.first;
    Rat to_k = it == placement.onto.end() ? Rat(0) : it->second.second;
    if (!(to_h / unit).is_integer() || !(to_k / unit).is_integer())
      already_integral = false;
  }
  if (already_integral) {
    for (size_t t = 0; t < types.size(); ++t) {
      auto it = placement.onto.find(types[t]);
      Rat to_h = it == placement.onto.end() ? Rat(0) : it->second.first;
      Rat to_k = it == placement.onto.end() ? Rat(0) : it->second.second;
      out.units[types[t]] = {(to_h / unit).num(), (to_k / unit).num()};
    }
    return out;
  }

  int m = ci.num_machines();
  // Per-machine fractional unit loads; capacities are their ceilings, so
  // integral loads exceed the fractional ones by less than one unit.
  std::vector<Rat> frac_units(m, Rat(0));
  for (const auto& [type, split] : placement.onto) {
    frac_units[type.first] += split.first / unit;
    frac_units[type.second] += split.second / unit;
  }
  FlowNetwork net;
  int t_count = static_cast<int>(types.size());
  net.num_nodes = 2 + t_count + m;
  net.source = 0;
  net.sink = net.num_nodes - 1;
  auto machine_node = [&](int i) { return 1 + t_count + i; };
  std::vector<int> h_arc(t_count, -1), k_arc(t_count, -1);
  long long total_units = 0;
  for (int t = 0; t < t_count; ++t) {
    net.arcs.push_back({net.source, 1 + t, Rat(supply[t])});
    h_arc[t] = static_cast<int>(net.arcs.size());
    net.arcs.push_back({1 + t, machine_node(types[t].first), Rat(supply[t])});
    if (types[t].second != types[t].first) {
      k_arc[t] = static_cast<int>(net.arcs.size());
      net.arcs.push_back(
          {1 + t, machine_node(types[t].second), Rat(supply[t])});
    }
    total_units += supply[t];
  }
  for (int i = 0; i < m; ++i)
    net.arcs.push_back({machine_node(i), net.sink, Rat(frac_units[i].ceil())});

  auto res = max_flow(net);
  if (res.value != Rat(total_units))
    throw std::runtime_error(
        "integral_light_assignment: rounding network failed to saturate");
  for (int t = 0; t < t_count; ++t) {
    long long uh = res.flow[h_arc[t]].num();
    long long uk = k_arc[t] >= 0 ? res.flow[k_arc[t]].num() : 0;
    out.units[types[t]] = {uh, uk};
  }
  return out;
}

}  // namespace resched
