#include "resched/baselines.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "resched/detail/cycles.hpp"
#include "resched/goodness.hpp"
#include "resched/linprog.hpp"

namespace resched {

namespace {

// Hopcroft-Karp maximum matching; left vertices are jobs, right are slots.
class BipartiteMatcher {
 public:
  BipartiteMatcher(int n_left, int n_right)
      : n_left_(n_left), n_right_(n_right), adj_(n_left) {}

  void add_edge(int l, int r) { adj_[l].push_back(r); }

  int solve() {
    match_l_.assign(n_left_, -1);
    match_r_.assign(n_right_, -1);
    int matched = 0;
    while (bfs()) {
      for (int u = 0; u < n_left_; ++u)
        if (match_l_[u] < 0 && dfs(u)) ++matched;
    }
    return matched;
  }

  int pair_of(int l) const { return match_l_[l]; }

 private:
  bool bfs() {
    dist_.assign(n_left_, -1);
    std::deque<int> queue;
    for (int u = 0; u < n_left_; ++u)
      if (match_l_[u] < 0) {
        dist_[u] = 0;
        queue.push_back(u);
      }
    bool found = false;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj_[u]) {
        int w = match_r_[v];
        if (w < 0)
          found = true;
        else if (dist_[w] < 0) {
          dist_[w] = dist_[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (int v : adj_[u]) {
      int w = match_r_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = -1;
    return false;
  }

  int n_left_, n_right_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_l_, match_r_, dist_;
};

void check_gap_fractional(const GapInstance& gap, const GapFractional& frac) {
  std::vector<Rat> item_sum(gap.num_items, Rat(0));
  std::vector<Rat> group_load(gap.num_groups, Rat(0));
  for (const auto& [key, y] : frac) {
    if (y.sign() < 0)
      throw std::invalid_argument("lst_round: negative fractional value");
    if (!gap.load.count(key))
      throw std::invalid_argument("lst_round: fractional mass on an excluded pair");
    item_sum[key.first] += y;
    group_load[key.second] += gap.load.at(key) * y;
  }
  for (int i = 0; i < gap.num_items; ++i)
    if (item_sum[i] != Rat(1))
      throw std::invalid_argument("lst_round: item " + std::to_string(i) +
                                  " mass " + item_sum[i].str() + " != 1");
  for (int g = 0; g < gap.num_groups; ++g)
    if (group_load[g] > gap.capacity[g])
      throw std::invalid_argument("lst_round: group " + std::to_string(g) +
                                  " fractional load exceeds its budget");
}

}  // namespace

std::vector<int> lst_round(const GapInstance& gap, const GapFractional& frac) {
  check_gap_fractional(gap, frac);
  std::vector<int> out(gap.num_items, -1);

  bool integral = true;
  for (const auto& [key, y] : frac)
    if (y != Rat(0) && y != Rat(1)) {
      integral = false;
      break;
    }
  if (integral) {
    for (const auto& [key, y] : frac)
      if (y == Rat(1)) out[key.first] = key.second;
    return out;
  }

  // Move to an extreme point of {sum_g y = 1 per item, load <= budget}.
  LpModel lp;
  std::vector<std::pair<int, int>> var_key;
  std::map<std::pair<int, int>, int> var_of;
  for (const auto& [key, load] : gap.load) {
    (void)load;
    var_of[key] = lp.num_vars;
    var_key.push_back(key);
    ++lp.num_vars;
  }
  for (int i = 0; i < gap.num_items; ++i) {
    LpRow row{RowTag::Bound, Rel::Eq, Rat(1), {}, "item " + std::to_string(i)};
    for (const auto& [key, v] : var_of)
      if (key.first == i) row.coeffs.push_back({v, Rat(1)});
    lp.rows.push_back(std::move(row));
  }
  for (int g = 0; g < gap.num_groups; ++g) {
    LpRow row{RowTag::Bound, Rel::Le, gap.capacity[g], {},
              "group " + std::to_string(g)};
    for (const auto& [key, v] : var_of)
      if (key.second == g) row.coeffs.push_back({v, gap.load.at(key)});
    lp.rows.push_back(std::move(row));
  }
  auto vertex = solve_feasibility_exact(lp);
  if (vertex.status != SolveStatus::Feasible)
    throw std::logic_error("lst_round: vertex LP unexpectedly " +
                           vertex.detail);

  // Integral part of the vertex.
  std::vector<std::pair<int, int>> frac_pairs;
  for (size_t v = 0; v < var_key.size(); ++v) {
    const Rat& y = vertex.values[v];
    if (y == Rat(1))
      out[var_key[v].first] = var_key[v].second;
    else if (y.sign() > 0)
      frac_pairs.push_back(var_key[v]);
  }

  // The fractional support is a pseudoforest (at most one cycle per
  // component); match every fractional item to one incident group so that
  // each group receives at most one item.
  int n_nodes = gap.num_items + gap.num_groups;
  auto item_node = [&](int i) { return i; };
  auto group_node = [&](int g) { return gap.num_items + g; };
  std::vector<std::pair<int, int>> edges;
  for (auto [i, g] : frac_pairs)
    edges.push_back({item_node(i), group_node(g)});
  std::vector<std::vector<int>> adj(n_nodes);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<char> on_cycle(n_nodes, 0), seen(n_nodes, 0);
  auto cyc = detail::find_cycle(n_nodes, edges);
  while (!cyc.empty()) {
    // orient the cycle: match each cycle item to the next group around it
    std::vector<int> cyc_nodes;
    for (size_t idx = 0; idx < cyc.size(); ++idx) {
      auto [a, b] = edges[cyc[idx]];
      auto [c, d] = edges[cyc[(idx + 1) % cyc.size()]];
      int shared = (a == c || a == d) ? a : b;
      int other = shared == a ? b : a;
      cyc_nodes.push_back(other);  // node entering edge idx, not shared
      (void)shared;
    }
    for (size_t idx = 0; idx < cyc_nodes.size(); ++idx) {
      int u = cyc_nodes[idx];
      int v = cyc_nodes[(idx + 1) % cyc_nodes.size()];
      on_cycle[u] = 1;
      if (u < gap.num_items) out[u] = v - gap.num_items;
    }
    // a pseudoforest has at most one cycle per component; remove this
    // component's edges and look again
    std::deque<int> queue{cyc_nodes[0]};
    seen[cyc_nodes[0]] = 1;
    std::set<int> comp{cyc_nodes[0]};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          comp.insert(v);
          queue.push_back(v);
        }
    }
    std::vector<std::pair<int, int>> rest;
    for (auto e : edges)
      if (!comp.count(e.first)) rest.push_back(e);
    // trees hanging off the cycle: orient away from the cycle
    for (int start : comp)
      if (on_cycle[start]) {
        std::deque<int> q2{start};
        std::map<int, int> parent{{start, -1}};
        while (!q2.empty()) {
          int u = q2.front();
          q2.pop_front();
          for (int v : adj[u]) {
            if (parent.count(v) || on_cycle[v]) continue;
            parent[v] = u;
            q2.push_back(v);
            if (v < gap.num_items) {
              // item: match to its lowest-id child group
              int child = -1;
              for (int w : adj[v])
                if (w != u && (child < 0 || w < child)) child = w;
              if (child < 0)
                throw std::logic_error("lst_round: fractional leaf item");
              out[v] = child - gap.num_items;
            }
          }
        }
      }
    edges = std::move(rest);
    adj.assign(n_nodes, {});
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    cyc = detail::find_cycle(n_nodes, edges);
  }

  // pure tree components: root at the lowest group node
  std::vector<char> done(n_nodes, 0);
  for (int g = 0; g < gap.num_groups; ++g) {
    int root = group_node(g);
    if (done[root] || adj[root].empty()) continue;
    std::deque<int> queue{root};
    std::map<int, int> parent{{root, -1}};
    done[root] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (parent.count(v)) continue;
        parent[v] = u;
        done[v] = 1;
        queue.push_back(v);
        if (v < gap.num_items) {
          int child = -1;
          for (int w : adj[v])
            if (w != u && (child < 0 || w < child)) child = w;
          if (child < 0)
            throw std::logic_error("lst_round: fractional item of degree one");
          out[v] = child - gap.num_items;
        }
      }
    }
  }

  for (int i = 0; i < gap.num_items; ++i)
    if (out[i] < 0)
      throw std::logic_error("lst_round: item " + std::to_string(i) +
                             " left unassigned");
  return out;
}

std::optional<Schedule> matching_baseline(const Instance& inst, const Rat& T) {
  if (T.sign() <= 0)
    throw std::invalid_argument("matching_baseline: T must be positive");
  int m = static_cast<int>(inst.machines.size());
  long long heavy_slots = T.floor();
  long long light_slots = (T / inst.eps).floor() - heavy_slots;
  auto midx = inst.machine_index();

  int n_jobs = static_cast<int>(inst.heavy.size() + inst.light.size());
  long long slots_per_machine = heavy_slots + light_slots;
  if (slots_per_machine * m > 2000000)
    throw std::invalid_argument("matching_baseline: slot count out of budget");
  auto slot_base = [&](int mi) { return mi * slots_per_machine; };

  BipartiteMatcher matcher(n_jobs, static_cast<int>(slots_per_machine * m));
  // heavy jobs may only use heavy slots; light jobs may use either kind
  for (size_t j = 0; j < inst.heavy.size(); ++j)
    for (long long mid : inst.heavy[j].eligible) {
      int mi = midx.at(mid);
      for (long long s = 0; s < heavy_slots; ++s)
        matcher.add_edge(static_cast<int>(j),
                         static_cast<int>(slot_base(mi) + s));
    }
  for (size_t j = 0; j < inst.light.size(); ++j)
    for (long long mid : inst.light[j].eligible) {
      int mi = midx.at(mid);
      for (long long s = 0; s < slots_per_machine; ++s)
        matcher.add_edge(static_cast<int>(inst.heavy.size() + j),
                         static_cast<int>(slot_base(mi) + s));
    }
  if (matcher.solve() != n_jobs) return std::nullopt;

  Schedule sched;
  for (size_t j = 0; j < inst.heavy.size(); ++j) {
    int slot = matcher.pair_of(static_cast<int>(j));
    sched.assignment[inst.heavy[j].id] =
        inst.machines[slot / slots_per_machine];
  }
  for (size_t j = 0; j < inst.light.size(); ++j) {
    int slot = matcher.pair_of(static_cast<int>(inst.heavy.size() + j));
    sched.assignment[inst.light[j].id] =
        inst.machines[slot / slots_per_machine];
  }
  return sched;
}

std::vector<Rat> candidate_makespans(const Instance& inst) {
  std::set<Rat> set;
  long long nh = static_cast<long long>(inst.heavy.size());
  long long nl = static_cast<long long>(inst.light.size());
  for (long long a = 0; a <= nh; ++a)
    for (long long b = 0; b <= nl; ++b) {
      if (a == 0 && b == 0) continue;
      set.insert(Rat(a) + Rat(b) * inst.eps);
    }
  return {set.begin(), set.end()};
}

BaselineResult matching_baseline_auto(const Instance& inst) {
  auto candidates = candidate_makespans(inst);
  if (candidates.empty()) return {Schedule{}, Rat(0)};
  // feasibility is monotone in T: binary search the smallest feasible level
  size_t lo = 0, hi = candidates.size() - 1;
  if (!matching_baseline(inst, candidates[hi]))
    throw std::logic_error("matching_baseline_auto: infeasible at max load");
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (matching_baseline(inst, candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  auto sched = matching_baseline(inst, candidates[lo]);
  return {*sched, candidates[lo]};
}

namespace {

// Optimal completion: can the light jobs be placed so no machine exceeds T?
bool lights_fit(const Instance& inst,
                const std::unordered_map<long long, int>& midx,
                const std::vector<Rat>& heavy_load, const Rat& T,
                std::vector<int>* placement) {
  int m = static_cast<int>(inst.machines.size());
  int nl = static_cast<int>(inst.light.size());
  if (nl == 0) {
    for (int i = 0; i < m; ++i)
      if (heavy_load[i] > T) return false;
    return true;
  }
  FlowNetwork net;
  net.num_nodes = 2 + nl + m;
  net.source = 0;
  net.sink = net.num_nodes - 1;
  auto machine_node = [&](int i) { return 1 + nl + i; };
  std::vector<std::vector<int>> arcs_of(nl);
  for (int j = 0; j < nl; ++j) {
    net.arcs.push_back({net.source, 1 + j, Rat(1)});
    for (long long mid : inst.light[j].eligible) {
      int mi = midx.at(mid);
      arcs_of[j].push_back(static_cast<int>(net.arcs.size()));
      net.arcs.push_back({1 + j, machine_node(mi), Rat(1)});
    }
  }
  for (int i = 0; i < m; ++i) {
    Rat room = T - heavy_load[i];
    long long units = room.sign() < 0 ? 0 : (room / inst.eps).floor();
    net.arcs.push_back({machine_node(i), net.sink, Rat(units)});
  }
  auto res = max_flow(net);
  if (res.value != Rat(nl)) return false;
  if (placement) {
    placement->assign(nl, -1);
    for (int j = 0; j < nl; ++j)
      for (int a : arcs_of[j])
        if (res.flow[a] == Rat(1)) {
          (*placement)[j] = net.arcs[a].to - (1 + nl);
          break;
        }
  }
  return true;
}

}  // namespace

BruteForceResult brute_force_opt(const Instance& inst, int max_machines,
                                 int max_jobs, long long max_leaves) {
  int m = static_cast<int>(inst.machines.size());
  if (m > max_machines)
    throw std::invalid_argument("brute_force_opt: machine budget exceeded");
  if (inst.total_jobs() > max_jobs)
    throw std::invalid_argument("brute_force_opt: job budget exceeded");
  double leaves = 1;
  for (const auto& j : inst.heavy) leaves *= static_cast<double>(j.eligible.size());
  if (leaves > static_cast<double>(max_leaves))
    throw std::invalid_argument("brute_force_opt: search space out of budget");
  auto midx = inst.machine_index();
  auto candidates = candidate_makespans(inst);
  if (candidates.empty()) return {Rat(0), Schedule{}};

  std::vector<Rat> heavy_load(m, Rat(0));
  std::vector<int> heavy_choice(inst.heavy.size(), -1);
  std::optional<Rat> best;
  std::vector<int> best_heavy, best_lights;

  // smallest candidate >= lo for which the lights fit
  auto complete = [&](const Rat& lo, std::vector<int>* placement) {
    size_t a = std::lower_bound(candidates.begin(), candidates.end(), lo) -
               candidates.begin();
    size_t b = candidates.size();
    if (a == b) return std::optional<Rat>{};
    if (!lights_fit(inst, midx, heavy_load, candidates[b - 1], nullptr))
      return std::optional<Rat>{};
    while (a < b) {  // binary search, fit is monotone in T
      size_t mid = (a + b) / 2;
      if (lights_fit(inst, midx, heavy_load, candidates[mid], nullptr))
        b = mid;
      else
        a = mid + 1;
    }
    lights_fit(inst, midx, heavy_load, candidates[a], placement);
    return std::optional<Rat>{candidates[a]};
  };

  std::function<void(size_t, Rat)> dfs = [&](size_t j, Rat heavy_max) {
    if (best && heavy_max >= *best) return;  // cannot strictly improve
    if (j == inst.heavy.size()) {
      std::vector<int> placement;
      auto t = complete(heavy_max, &placement);
      if (t && (!best || *t < *best)) {
        best = *t;
        best_heavy = heavy_choice;
        best_lights = placement;
      }
      return;
    }
    for (long long mid : inst.heavy[j].eligible) {
      int mi = midx.at(mid);
      heavy_load[mi] += Rat(1);
      heavy_choice[j] = mi;
      dfs(j + 1, rat_max(heavy_max, heavy_load[mi]));
      heavy_load[mi] -= Rat(1);
      heavy_choice[j] = -1;
    }
  };
  dfs(0, Rat(0));

  if (!best) throw std::logic_error("brute_force_opt: no schedule found");
  BruteForceResult res;
  res.opt = *best;
  for (size_t j = 0; j < inst.heavy.size(); ++j)
    res.schedule.assignment[inst.heavy[j].id] = inst.machines[best_heavy[j]];
  for (size_t j = 0; j < inst.light.size(); ++j)
    res.schedule.assignment[inst.light[j].id] = inst.machines[best_lights[j]];
  return res;
}

LstScheduleResult lst_schedule(const Instance& inst) {
  auto candidates = candidate_makespans(inst);
  if (candidates.empty()) return {Schedule{}, Rat(0)};
  auto midx = inst.machine_index();
  int m = static_cast<int>(inst.machines.size());

  auto build_lp = [&](const Rat& T, GapInstance* gap) {
    LpModel lp;
    std::vector<std::pair<int, int>> var_key;
    int item = 0;
    gap->num_groups = m;
    gap->capacity.assign(m, T);
    auto add_jobs = [&](const std::vector<JobRec>& jobs, const Rat& size) {
      for (const auto& j : jobs) {
        for (long long mid : j.eligible) {
          if (size > T) continue;  // job too large for this level
          gap->load[{item, midx.at(mid)}] = size;
        }
        ++item;
      }
    };
    add_jobs(inst.heavy, Rat(1));
    add_jobs(inst.light, inst.eps);
    gap->num_items = item;

    std::map<std::pair<int, int>, int> var_of;
    for (const auto& [key, load] : gap->load) {
      (void)load;
      var_of[key] = lp.num_vars++;
      var_key.push_back(key);
    }
    for (int i = 0; i < gap->num_items; ++i) {
      LpRow row{RowTag::Bound, Rel::Eq, Rat(1), {}, "item"};
      for (const auto& [key, v] : var_of)
        if (key.first == i) row.coeffs.push_back({v, Rat(1)});
      if (row.coeffs.empty()) return std::pair<LpModel, std::vector<std::pair<int, int>>>{};  // some job cannot run at T
      lp.rows.push_back(std::move(row));
    }
    for (int g = 0; g < m; ++g) {
      LpRow row{RowTag::Bound, Rel::Le, T, {}, "group"};
      for (const auto& [key, v] : var_of)
        if (key.second == g) row.coeffs.push_back({v, gap->load.at(key)});
      lp.rows.push_back(std::move(row));
    }
    return std::pair{std::move(lp), std::move(var_key)};
  };

  auto feasible_at = [&](const Rat& T) {
    GapInstance gap;
    auto [lp, keys] = build_lp(T, &gap);
    (void)keys;
    if (lp.rows.empty() && gap.num_items > 0) return false;
    return solve_feasibility(lp).status == SolveStatus::Feasible;
  };

  size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (feasible_at(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  // confirm exactly, stepping up if the float search was borderline
  for (size_t at = lo; at < candidates.size(); ++at) {
    GapInstance gap;
    auto [lp, var_key] = build_lp(candidates[at], &gap);
    if (lp.rows.empty() && gap.num_items > 0) continue;
    auto exact = solve_feasibility_exact(lp);
    if (exact.status != SolveStatus::Feasible) continue;
    GapFractional frac;
    for (size_t v = 0; v < var_key.size(); ++v)
      if (exact.values[v].sign() > 0) frac[var_key[v]] = exact.values[v];
    auto pick = lst_round(gap, frac);
    Schedule sched;
    int item = 0;
    for (const auto& j : inst.heavy) sched.assignment[j.id] = inst.machines[pick[item++]];
    for (const auto& j : inst.light) sched.assignment[j.id] = inst.machines[pick[item++]];
    return {sched, candidates[at]};
  }
  throw std::logic_error("lst_schedule: no feasible candidate level");
}

}  // namespace resched
