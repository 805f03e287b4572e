#include "resched/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "resched/detail/cycles.hpp"

namespace resched {

namespace {

constexpr long long kSnapMaxDen = 1000000000000LL;  // 1e12

// Simplest fraction within the solver tolerance of v: walking the
// continued-fraction convergents and stopping at the first one inside the
// tolerance recovers the exact vertex coordinate instead of chasing
// floating-point noise into huge denominators.
Rat snap_value(double v) {
  for (long long cap : {100LL, 100000LL, 100000000LL, kSnapMaxDen}) {
    Rat r = Rat::approx(v, cap);
    if (std::abs(r.to_double() - v) <= 4.0 * kLpTolerance) return r;
  }
  return Rat::approx(v, kSnapMaxDen);
}

using detail::find_cycle;

}  // namespace

ExactSolution snap_solution(const Instance& inst, const LpModel& model,
                            const std::vector<double>& values) {
  // snap = nullptr means the dyadic grid (common denominator 2^40), used
  // with margin-tightened rows; otherwise per-coordinate snapping.
  auto snap_once = [&](const std::vector<double>& vals,
                       Rat (*snap)(double)) {
    ExactSolution sol;
    sol.z.assign(inst.machines.size(), Rat(0));
    auto snap_job = [&](const std::vector<std::pair<int, int>>& vars, int j,
                        std::map<std::pair<int, int>, Rat>& table) {
      Rat sum(0);
      std::pair<int, int> largest_key{-1, -1};
      Rat largest(-1);
      for (auto [v, mi] : vars) {
        double d = vals[v];
        if (d < 1e-12) continue;
        Rat r = snap ? snap(d) : Rat::quantize(d, 40, false);
        if (r.sign() <= 0) continue;
        table[{j, mi}] = r;
        sum += r;
        if (r > largest) {
          largest = r;
          largest_key = {j, mi};
        }
      }
      if (largest_key.first < 0) {
        // whole job snapped away; put the full unit on its best machine
        int best_v = vars.front().first, best_m = vars.front().second;
        for (auto [v, mi] : vars)
          if (vals[v] > vals[best_v]) {
            best_v = v;
            best_m = mi;
          }
        table[{j, best_m}] = Rat(1);
        return;
      }
      table[largest_key] += Rat(1) - sum;  // restore the cover row exactly
      if (table[largest_key].sign() <= 0)
        throw std::runtime_error("snap_solution: renormalization failed");
    };
    for (size_t j = 0; j < inst.heavy.size(); ++j)
      snap_job(model.heavy_vars[j], static_cast<int>(j), sol.x_heavy);
    for (size_t j = 0; j < inst.light.size(); ++j)
      snap_job(model.light_vars[j], static_cast<int>(j), sol.x_light);
    for (const auto& [key, x] : sol.x_heavy) sol.z[key.second] += x;
    return sol;
  };

  // Per-machine sums mix coordinate denominators, so the per-coordinate
  // snap is only safe while their common denominator stays small.
  auto lcm_small = [](const ExactSolution& s) {
    unsigned __int128 lcm = 1;
    auto feed = [&](const Rat& r) {
      if (lcm > 1000000000ULL) return;
      unsigned __int128 d = static_cast<unsigned __int128>(r.den());
      unsigned __int128 a = lcm, b = d;
      while (b) {
        auto t = a % b;
        a = b;
        b = t;
      }
      lcm = lcm / a * d;
    };
    for (const auto& [k, v] : s.x_heavy) feed(v);
    for (const auto& [k, v] : s.x_light) feed(v);
    return lcm <= 1000000000ULL;
  };

  ExactSolution sol = snap_once(values, &snap_value);
  if (lcm_small(sol) &&
      exact_solution_residual(inst, model.rho, model.delta, sol).sign() == 0)
    return sol;

  // Margin retries: shrink every inequality right-hand side, re-solve, and
  // snap onto the dyadic grid; the margin absorbs both the solver residual
  // and the grid error, so the original rows hold exactly.
  for (Rat margin : {Rat(1, 10000000), Rat(1, 100000000)}) {
    LpModel tight = model;
    for (auto& row : tight.rows)
      if (row.rel == Rel::Le) row.rhs -= margin;
    auto out = solve_feasibility(tight);
    if (out.status != SolveStatus::Feasible) continue;
    ExactSolution cand = snap_once(out.values, nullptr);
    if (exact_solution_residual(inst, model.rho, model.delta, cand).sign() ==
        0)
      return cand;
  }

  // Last resort: exact simplex.
  auto exact = solve_feasibility_exact(model);
  if (exact.status != SolveStatus::Feasible)
    throw std::runtime_error(
        "snap_solution: exact re-solve failed: " + exact.detail);
  ExactSolution sol2;
  sol2.z.assign(inst.machines.size(), Rat(0));
  for (size_t j = 0; j < inst.heavy.size(); ++j)
    for (auto [v, mi] : model.heavy_vars[j])
      if (exact.values[v].sign() > 0)
        sol2.x_heavy[{static_cast<int>(j), mi}] = exact.values[v];
  for (size_t j = 0; j < inst.light.size(); ++j)
    for (auto [v, mi] : model.light_vars[j])
      if (exact.values[v].sign() > 0)
        sol2.x_light[{static_cast<int>(j), mi}] = exact.values[v];
  for (const auto& [key, x] : sol2.x_heavy) sol2.z[key.second] += x;
  if (exact_solution_residual(inst, model.rho, model.delta, sol2).sign() != 0)
    throw std::runtime_error("snap_solution: exact point fails rows");
  return sol2;
}

Rat exact_solution_residual(const Instance& inst, const Rat& rho,
                            const Rat& delta, const ExactSolution& sol) {
  Rat worst(0);
  auto bump_eq = [&](const Rat& lhs, const Rat& rhs) {
    Rat r = rat_abs(lhs - rhs);
    if (r > worst) worst = r;
  };
  auto bump_le = [&](const Rat& lhs, const Rat& rhs) {
    Rat r = lhs - rhs;
    if (r > worst) worst = r;
  };
  int m = static_cast<int>(inst.machines.size());
  std::vector<Rat> heavy_on(m, Rat(0)), light_cnt(m, Rat(0));
  std::vector<Rat> job_sum_h(inst.heavy.size(), Rat(0)),
      job_sum_l(inst.light.size(), Rat(0));
  for (const auto& [key, x] : sol.x_heavy) {
    job_sum_h[key.first] += x;
    heavy_on[key.second] += x;
    if (x.sign() < 0) bump_le(-x, Rat(0));
  }
  for (const auto& [key, x] : sol.x_light) {
    job_sum_l[key.first] += x;
    light_cnt[key.second] += x;
    if (x.sign() < 0) bump_le(-x, Rat(0));
    bump_le((Rat(1) - rho) * sol.z[key.second] + x, Rat(1));  // mix cap
  }
  for (const Rat& s : job_sum_h) bump_eq(s, Rat(1));
  for (const Rat& s : job_sum_l) bump_eq(s, Rat(1));
  Rat load_rhs = Rat(1) + rho * delta;
  for (int i = 0; i < m; ++i) {
    bump_eq(heavy_on[i], sol.z[i]);                          // heavy balance
    bump_le(sol.z[i], Rat(1));                               // z cap
    bump_le(sol.z[i] + inst.eps * light_cnt[i], load_rhs);   // load cap
  }
  return worst;
}

int rotate_heavy_cycles(const Instance& inst, ExactSolution& sol) {
  int m = static_cast<int>(inst.machines.size());
  int rotations = 0;
  for (;;) {
    std::vector<std::pair<int, int>> enodes;
    std::vector<std::pair<int, int>> keys;
    for (const auto& [key, x] : sol.x_heavy)
      if (x.sign() > 0) {
        enodes.push_back({key.second, m + key.first});
        keys.push_back(key);
      }
    auto cyc =
        find_cycle(m + static_cast<int>(inst.heavy.size()), enodes);
    if (cyc.empty()) return rotations;
    Rat t = sol.x_heavy.at(keys[cyc[0]]);
    for (size_t idx = 2; idx < cyc.size(); idx += 2)
      t = rat_min(t, sol.x_heavy.at(keys[cyc[idx]]));
    for (size_t idx = 0; idx < cyc.size(); ++idx) {
      Rat& x = sol.x_heavy.at(keys[cyc[idx]]);
      x = (idx % 2 == 0) ? x - t : x + t;
    }
    for (auto it = sol.x_heavy.begin(); it != sol.x_heavy.end();)
      it = it->second.sign() == 0 ? sol.x_heavy.erase(it) : std::next(it);
    ++rotations;
  }
}

int rotate_light_cycles(const Instance& inst, ExactSolution& sol) {
  int m = static_cast<int>(inst.machines.size());
  int rotations = 0;
  auto tight = [&](const std::pair<int, int>& key, const Rat& x) {
    return x + sol.z[key.second] == Rat(1);
  };
  for (;;) {
    std::vector<std::pair<int, int>> enodes;
    std::vector<std::pair<int, int>> keys;
    for (const auto& [key, x] : sol.x_light)
      if (x.sign() > 0 && !tight(key, x)) {
        enodes.push_back({key.second, m + key.first});
        keys.push_back(key);
      }
    auto cyc =
        find_cycle(m + static_cast<int>(inst.light.size()), enodes);
    if (cyc.empty()) return rotations;
    // shift bounded by the smallest red value and the smallest black slack
    Rat t(-1);
    for (size_t idx = 0; idx < cyc.size(); ++idx) {
      const auto& key = keys[cyc[idx]];
      const Rat& x = sol.x_light.at(key);
      Rat room = (idx % 2 == 0) ? x : Rat(1) - sol.z[key.second] - x;
      if (t.sign() < 0 || room < t) t = room;
    }
    for (size_t idx = 0; idx < cyc.size(); ++idx) {
      Rat& x = sol.x_light.at(keys[cyc[idx]]);
      x = (idx % 2 == 0) ? x - t : x + t;
    }
    for (auto it = sol.x_light.begin(); it != sol.x_light.end();)
      it = it->second.sign() == 0 ? sol.x_light.erase(it) : std::next(it);
    ++rotations;
  }
}

HeavyDecomposition decompose_heavy_forest(const Instance& inst,
                                          const ExactSolution& sol) {
  int m = static_cast<int>(inst.machines.size());
  int nh = static_cast<int>(inst.heavy.size());
  // adjacency over nodes: machines [0,m), jobs [m, m+nh)
  std::vector<std::vector<int>> adj(m + nh);
  for (const auto& [key, x] : sol.x_heavy) {
    if (x.sign() <= 0) continue;
    adj[key.second].push_back(m + key.first);
    adj[m + key.first].push_back(key.second);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  HeavyDecomposition out;
  std::vector<char> seen(m + nh, 0);

  // components in increasing order of their smallest job id
  std::vector<std::pair<long long, int>> comp_roots;  // (job id, job node)
  for (int j = 0; j < nh; ++j) {
    if (seen[m + j]) continue;
    // BFS the whole component to mark it, track smallest job id
    std::deque<int> queue{m + j};
    seen[m + j] = 1;
    long long best_id = inst.heavy[j].id;
    int best_node = m + j;
    std::vector<int> nodes;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      nodes.push_back(u);
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          if (v >= m && inst.heavy[v - m].id < best_id) {
            best_id = inst.heavy[v - m].id;
            best_node = v;
          }
          queue.push_back(v);
        }
    }
    comp_roots.push_back({best_id, best_node});
  }
  std::sort(comp_roots.begin(), comp_roots.end());

  for (auto [root_id, root_node] : comp_roots) {
    (void)root_id;
    // orient the component tree from the root job
    std::vector<int> parent(m + nh, -2);
    std::deque<int> queue{root_node};
    parent[root_node] = -1;
    std::vector<int> order;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (int v : adj[u])
        if (parent[v] == -2) {
          parent[v] = u;
          queue.push_back(v);
        }
    }
    if (order.size() == 2) {  // trivial tree: job fully on one machine
      int job = order[0] >= m ? order[0] - m : order[1] - m;
      int mach = order[0] >= m ? order[1] : order[0];
      if (sol.x_heavy.at({job, mach}) != Rat(1))
        throw std::logic_error(
            "decompose_heavy_forest: two-node tree with partial assignment");
      out.groups.push_back({mach});
      out.origins.push_back({GroupOrigin::Kind::Trivial, -1, mach,
                             inst.heavy[job].id});
      continue;
    }
    // cut job->parent-machine edges with x <= 1/2
    std::vector<char> cut(m + nh, 0);
    Rat half(1, 2);
    for (int u : order)
      if (u >= m && parent[u] >= 0) {
        int job = u - m, mach = parent[u];
        if (sol.x_heavy.at({job, mach}) <= half) cut[u] = 1;
      }
    // residual trees rooted at the original root and at each cut job
    std::vector<int> roots{root_node};
    for (int u : order)
      if (cut[u]) roots.push_back(u);
    std::sort(roots.begin() + 1, roots.end(), [&](int a, int b) {
      return inst.heavy[a - m].id < inst.heavy[b - m].id;
    });
    for (int r : roots) {
      HeavyTree tree;
      std::map<int, int> mach_local;  // global machine -> local index
      std::map<int, int> job_local;
      std::deque<int> bfs{r};
      tree.job_ids.push_back(inst.heavy[r - m].id);
      job_local[r] = 0;
      tree.job_parent.push_back(-1);
      std::vector<int> machine_children_count;
      while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop_front();
        for (int v : adj[u]) {
          if (parent[v] != u) continue;
          if (v >= m && cut[v]) continue;  // child job starts its own tree
          if (v >= m) {  // machine u -> child job v
            int lm = mach_local.at(u);
            machine_children_count[lm]++;
            if (machine_children_count[lm] > 1)
              throw std::logic_error(
                  "decompose_heavy_forest: machine with two heavy children "
                  "above 1/2, z-cap row must have been violated");
            job_local[v] = static_cast<int>(tree.job_ids.size());
            tree.job_ids.push_back(inst.heavy[v - m].id);
            tree.job_parent.push_back(lm);
          } else {  // job u -> child machine v
            mach_local[v] = static_cast<int>(tree.machines.size());
            tree.machines.push_back(v);
            tree.machine_parent.push_back(job_local.at(u));
            machine_children_count.push_back(0);
          }
          bfs.push_back(v);
        }
      }
      for (size_t lm = 0; lm < tree.machines.size(); ++lm)
        if (machine_children_count[lm] == 0)
          tree.leaf_machines.push_back(static_cast<int>(lm));
      int tree_idx = static_cast<int>(out.trees.size());
      // singleton groups for non-leaf machines, then the leaf set
      for (size_t lm = 0; lm < tree.machines.size(); ++lm)
        if (machine_children_count[lm] > 0) {
          out.groups.push_back({tree.machines[lm]});
          out.origins.push_back({GroupOrigin::Kind::TreeSingleton, tree_idx,
                                 tree.machines[lm], -1});
        }
      std::vector<int> leaves;
      for (int lm : tree.leaf_machines) leaves.push_back(tree.machines[lm]);
      std::sort(leaves.begin(), leaves.end());
      if (leaves.empty())
        throw std::logic_error("decompose_heavy_forest: tree without leaves");
      out.groups.push_back(leaves);
      out.origins.push_back(
          {GroupOrigin::Kind::TreeLeafSet, tree_idx, -1, -1});
      out.trees.push_back(std::move(tree));
    }
  }
  return out;
}

LightProcessing process_light_jobs(const Instance& inst,
                                   const ExactSolution& sol) {
  int m = static_cast<int>(inst.machines.size());
  int nl = static_cast<int>(inst.light.size());
  LightProcessing out;

  // collect per-job positive edges, split by tightness (x + z == 1)
  std::vector<std::vector<std::pair<int, Rat>>> tight_edges(nl), loose_edges(nl);
  for (const auto& [key, x] : sol.x_light) {
    if (x.sign() <= 0) continue;
    auto [j, i] = key;
    if (x + sol.z[i] == Rat(1))
      tight_edges[j].push_back({i, x});
    else
      loose_edges[j].push_back({i, x});
  }
  // forest of non-tight edges; root every non-singleton tree at its
  // lowest-id light job and permanently assign non-leaf jobs
  std::vector<std::vector<int>> adj(m + nl);
  for (int j = 0; j < nl; ++j)
    for (auto& [i, x] : loose_edges[j]) {
      (void)x;
      adj[i].push_back(m + j);
      adj[m + j].push_back(i);
    }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<char> seen(m + nl, 0), permanent(nl, 0);
  std::vector<std::pair<long long, int>> comp_roots;
  for (int j = 0; j < nl; ++j) {
    if (seen[m + j] || adj[m + j].empty()) continue;
    std::deque<int> queue{m + j};
    seen[m + j] = 1;
    long long best_id = inst.light[j].id;
    int best_node = m + j;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          if (v >= m && inst.light[v - m].id < best_id) {
            best_id = inst.light[v - m].id;
            best_node = v;
          }
          queue.push_back(v);
        }
    }
    comp_roots.push_back({best_id, best_node});
  }
  std::sort(comp_roots.begin(), comp_roots.end());
  for (auto [rid, root] : comp_roots) {
    (void)rid;
    std::deque<int> queue{root};
    std::map<int, int> parent{{root, -1}};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      std::vector<int> children;
      for (int v : adj[u])
        if (!parent.count(v)) {
          parent[v] = u;
          children.push_back(v);
          queue.push_back(v);
        }
      if (u >= m && !children.empty()) {
        // non-leaf light job: permanently assign to its lowest-id child
        int child_machine = *std::min_element(children.begin(), children.end());
        out.permanent_lights[inst.light[u - m].id] =
            inst.machines[child_machine];
        permanent[u - m] = 1;
      }
    }
  }
  {
    std::set<long long> perm_machines;
    for (const auto& [jid, mid] : out.permanent_lights) {
      (void)jid;
      if (!perm_machines.insert(mid).second)
        throw std::logic_error(
            "process_light_jobs: machine got two permanent light jobs");
    }
  }

  // type the remaining jobs; every survivor is a leaf or singleton of the
  // non-tight forest, so it touches at most one loose and one tight machine
  for (int j = 0; j < nl; ++j) {
    if (permanent[j]) continue;
    const auto& t = tight_edges[j];
    const auto& l = loose_edges[j];
    if (t.size() + l.size() > 2)
      throw std::logic_error("process_light_jobs: light job " +
                             std::to_string(inst.light[j].id) +
                             " touches more than two machines after typing");
    int h = -1, k = -1;
    if (t.size() == 1 && l.empty()) {
      if (t[0].second != Rat(1) || sol.z[t[0].first].sign() != 0)
        throw std::logic_error(
            "process_light_jobs: single-edge job not fully assigned");
      h = k = t[0].first;
    } else if (t.size() == 1 && l.size() == 1) {
      h = l[0].first;
      k = t[0].first;
      if (l[0].second != sol.z[k])
        throw std::logic_error(
            "process_light_jobs: split does not match owner mass");
    } else {
      throw std::logic_error("process_light_jobs: light job " +
                             std::to_string(inst.light[j].id) +
                             " has an unexpected edge profile");
    }
    auto key = std::make_pair(h, k);
    auto it = out.w.find(key);
    if (it == out.w.end())
      out.w[key] = inst.eps;
    else
      it->second += inst.eps;
    out.type_jobs[key].push_back(inst.light[j].id);
  }
  for (auto& [key, jobs] : out.type_jobs) {
    (void)key;
    std::sort(jobs.begin(), jobs.end());
  }
  return out;
}

CanonicalResult to_canonical_exact(const Instance& inst,
                                   const ExactSolution& sol_in, const Rat& rho,
                                   const Rat& delta) {
  if (delta.sign() <= 0)
    throw std::invalid_argument("to_canonical: delta must be positive");
  if (rho * delta >= Rat(1, 5))
    throw std::invalid_argument("to_canonical: rho*delta must stay below 0.2");
  ExactSolution sol = sol_in;
  int m = static_cast<int>(inst.machines.size());

  rotate_heavy_cycles(inst, sol);
  auto decomp = decompose_heavy_forest(inst, sol);

  // scale down the heavy mass; light assignments keep their exact values
  Rat scale = Rat(1) - rho;
  for (Rat& zi : sol.z) zi *= scale;

  rotate_light_cycles(inst, sol);
  auto lights = process_light_jobs(inst, sol);

  CanonicalResult res;
  res.ci.machine_ids = inst.machines;
  res.ci.groups = decomp.groups;
  res.ci.z = sol.z;
  res.ci.w = lights.w;
  res.lift.z_scale = scale;
  res.lift.permanent_lights = lights.permanent_lights;
  res.lift.trees = decomp.trees;
  res.lift.origins = decomp.origins;
  res.lift.type_jobs = lights.type_jobs;

  // machines outside every group carry no heavy mass
  std::vector<char> grouped(m, 0);
  for (const auto& g : decomp.groups)
    for (int i : g) grouped[i] = 1;
  for (int i = 0; i < m; ++i)
    if (!grouped[i]) res.ci.z[i] = Rat(0);

  // threshold tiny heavy mass: z < rho*delta/m drops to zero, the machine
  // leaves its group, and incoming light types collapse onto the diagonal
  if (m > 0) {
    Rat thr = rho * delta / Rat(m);
    std::vector<char> drop(m, 0);
    for (int i = 0; i < m; ++i)
      if (res.ci.z[i].sign() > 0 && res.ci.z[i] < thr) {
        res.lift.removed_machines.push_back({i, res.ci.z[i]});
        res.ci.z[i] = Rat(0);
        drop[i] = 1;
      }
    if (!res.lift.removed_machines.empty()) {
      for (auto& g : res.ci.groups) {
        g.erase(std::remove_if(g.begin(), g.end(),
                               [&](int i) { return drop[i]; }),
                g.end());
        if (g.empty())
          throw std::logic_error(
              "to_canonical: thresholding emptied a group; rho*delta too large");
      }
      std::map<std::pair<int, int>, Rat> new_w;
      for (const auto& [key, load] : res.ci.w) {
        auto [h, k] = key;
        if (h != k && drop[k]) {
          auto diag = std::make_pair(k, k);
          auto it = new_w.find(diag);
          if (it == new_w.end())
            new_w[diag] = load;
          else
            it->second += load;
          auto& jobs = res.lift.type_jobs[diag];
          auto& old_jobs = res.lift.type_jobs[key];
          jobs.insert(jobs.end(), old_jobs.begin(), old_jobs.end());
          std::sort(jobs.begin(), jobs.end());
          res.lift.type_jobs.erase(key);
        } else {
          new_w[key] = load;
        }
      }
      res.ci.w = std::move(new_w);
    }
  }

  res.ci.p = m > 0 ? Rat(m) / (rho * delta) : Rat(1);
  res.ci.q = Rat(1) / inst.eps;
  res.ci.theta = rho * delta;
  return res;
}

CanonicalResult to_canonical(const Instance& inst, const LpModel& model,
                             const std::vector<double>& values, const Rat& rho,
                             const Rat& delta) {
  ExactSolution sol = snap_solution(inst, model, values);
  return to_canonical_exact(inst, sol, rho, delta);
}

CanonicalValidationReport check_canonical(const CanonicalInstance& ci,
                                          const Rat& p, const Rat& q,
                                          const Rat& theta) {
  CanonicalValidationReport rep;
  int m = ci.num_machines();
  std::vector<int> group_of(m, -1);
  for (int g = 0; g < ci.num_groups(); ++g) {
    std::set<int> seen;
    for (int i : ci.groups[g]) {
      if (i < 0 || i >= m) {
        rep.issues.push_back("group " + std::to_string(g) +
                             " references unknown machine");
        continue;
      }
      if (!seen.insert(i).second)
        rep.issues.push_back("group " + std::to_string(g) +
                             " lists machine " + std::to_string(i) + " twice");
      if (group_of[i] >= 0)
        rep.issues.push_back("machine " + std::to_string(i) +
                             " appears in groups " +
                             std::to_string(group_of[i]) + " and " +
                             std::to_string(g));
      group_of[i] = g;
    }
  }
  for (const auto& [key, load] : ci.w) {
    auto [h, k] = key;
    if (load.sign() <= 0) {
      rep.issues.push_back("nonpositive light load at (" + std::to_string(h) +
                           "," + std::to_string(k) + ")");
      continue;
    }
    if (h != k && ci.z[k].sign() == 0)
      rep.issues.push_back("light load (" + std::to_string(h) + "," +
                           std::to_string(k) + ") targets a machine with z=0");
    if (h == k && ci.z[h].sign() > 0)
      rep.issues.push_back("diagonal light load on machine " +
                           std::to_string(h) + " with positive z");
    if (load < Rat(1) / q)
      rep.issues.push_back("light load (" + std::to_string(h) + "," +
                           std::to_string(k) + ") = " + load.str() +
                           " below 1/q");
  }
  for (int i = 0; i < m; ++i) {
    bool in_group = group_of[i] >= 0;
    if (in_group != (ci.z[i].sign() > 0))
      rep.issues.push_back("machine " + std::to_string(i) +
                           (in_group ? " grouped with z=0" :
                                       " has positive z outside any group"));
    if (ci.z[i].sign() > 0) {
      if (ci.z[i] > Rat(2, 5))
        rep.issues.push_back("z[" + std::to_string(i) + "] = " +
                             ci.z[i].str() + " exceeds 0.4");
      if (ci.z[i] < Rat(1) / p)
        rep.issues.push_back("z[" + std::to_string(i) + "] = " +
                             ci.z[i].str() + " below 1/p");
    }
  }
  Rat cover_rhs = Rat(1, 5) - theta;
  for (int g = 0; g < ci.num_groups(); ++g)
    if (ci.group_mass(g) < cover_rhs)
      rep.issues.push_back("group " + std::to_string(g) + " mass " +
                           ci.group_mass(g).str() + " below 0.2-theta");
  Rat load_rhs = Rat(1) + theta;
  for (int h = 0; h < m; ++h)
    if (ci.machine_load(h) > load_rhs)
      rep.issues.push_back("machine " + std::to_string(h) + " load " +
                           ci.machine_load(h).str() + " above 1+theta");
  return rep;
}

Schedule lift_assignment(const Instance& inst, const CanonicalInstance& ci,
                         const Lift& lift, const HeavyAssignment& f,
                         const IntegralPlacement& lights) {
  if (f.to_machine.size() != ci.groups.size())
    throw std::invalid_argument("lift_assignment: assignment size mismatch");
  Schedule sched;

  // heavy side: singleton groups are forced; the leaf-set choice selects
  // the root-to-leaf path whose jobs shift one step toward the leaf
  std::vector<int> chosen_leaf(lift.trees.size(), -1);
  for (size_t g = 0; g < ci.groups.size(); ++g) {
    int mi = f.to_machine[g];
    if (std::find(ci.groups[g].begin(), ci.groups[g].end(), mi) ==
        ci.groups[g].end())
      throw std::invalid_argument(
          "lift_assignment: group " + std::to_string(g) +
          " assigned outside its machine set");
    const auto& origin = lift.origins[g];
    if (origin.kind == GroupOrigin::Kind::Trivial)
      sched.assignment[origin.job_id] = inst.machines[origin.machine];
    else if (origin.kind == GroupOrigin::Kind::TreeLeafSet)
      chosen_leaf[origin.tree] = mi;
  }
  for (size_t t = 0; t < lift.trees.size(); ++t) {
    const HeavyTree& tree = lift.trees[t];
    if (chosen_leaf[t] < 0)
      throw std::invalid_argument("lift_assignment: tree " +
                                  std::to_string(t) + " has no leaf choice");
    int leaf_local = -1;
    for (size_t lm = 0; lm < tree.machines.size(); ++lm)
      if (tree.machines[lm] == chosen_leaf[t]) leaf_local = static_cast<int>(lm);
    if (leaf_local < 0)
      throw std::invalid_argument(
          "lift_assignment: chosen leaf not in its tree");
    // walk from the leaf to the root, assigning path jobs to their child
    std::vector<int> job_target(tree.job_ids.size(), -1);
    int mach = leaf_local;
    while (mach >= 0) {
      int job = tree.machine_parent[mach];
      job_target[job] = mach;  // path job -> its child machine on the path
      mach = tree.job_parent[job];
    }
    for (size_t j = 0; j < tree.job_ids.size(); ++j) {
      int target = job_target[j] >= 0 ? job_target[j] : tree.job_parent[j];
      if (target < 0)
        throw std::logic_error("lift_assignment: root job left unassigned");
      long long mid = inst.machines[tree.machines[target]];
      auto [it, fresh] = sched.assignment.emplace(tree.job_ids[j], mid);
      (void)it;
      if (!fresh)
        throw std::invalid_argument(
            "lift_assignment: inconsistent duplicate heavy assignment");
    }
  }

  for (const auto& [jid, mid] : lift.permanent_lights)
    sched.assignment[jid] = mid;

  for (const auto& [type, jobs] : lift.type_jobs) {
    auto it = lights.units.find(type);
    long long uh = it == lights.units.end() ? 0 : it->second.first;
    long long uk = it == lights.units.end() ? 0 : it->second.second;
    if (uh + uk != static_cast<long long>(jobs.size()))
      throw std::invalid_argument(
          "lift_assignment: light placement does not cover type (" +
          std::to_string(type.first) + "," + std::to_string(type.second) +
          ")");
    for (long long idx = 0; idx < uh; ++idx)
      sched.assignment[jobs[idx]] = inst.machines[type.first];
    for (long long idx = uh; idx < uh + uk; ++idx)
      sched.assignment[jobs[idx]] = inst.machines[type.second];
  }
  return sched;
}

}  // namespace resched
