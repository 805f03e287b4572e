#include "resched/finalround.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "resched/baselines.hpp"
#include "resched/detail/cycles.hpp"
#include "resched/lll.hpp"

namespace resched {

const char* bad_event_name(BadEventKind kind) {
  switch (kind) {
    case BadEventKind::LoadExcess: return "load-excess";
    case BadEventKind::RedRun: return "red-run";
    case BadEventKind::DenseFanout: return "dense-fanout";
    case BadEventKind::SparseSpill: return "sparse-spill";
  }
  return "?";
}

ThetaScaling scale_theta_to_zero(const CanonicalInstance& ci) {
  if (ci.theta.sign() < 0)
    throw std::invalid_argument("scale_theta_to_zero: negative theta");
  if (ci.theta > Rat(1, 20))
    throw std::invalid_argument("scale_theta_to_zero: theta " +
                                ci.theta.str() + " above 0.05");
  ThetaScaling out;
  out.factor = Rat(3, 5) / (Rat(3, 5) + ci.theta);
  out.surcharge = Rat(4) * ci.theta;
  out.ci = ci;
  out.ci.theta = Rat(0);
  out.ci.q = ci.q / out.factor;
  for (auto& [key, load] : out.ci.w) {
    (void)key;
    load *= out.factor;
  }
  return out;
}

namespace {

// Integer weights proportional to the z masses of `machines`, for exact
// z-proportional draws via Rng::below.
std::pair<std::vector<uint64_t>, uint64_t> group_weights(
    const CanonicalInstance& ci, const std::vector<int>& machines) {
  unsigned __int128 den = 1;
  for (int i : machines) {
    unsigned __int128 d = static_cast<unsigned __int128>(ci.z[i].den());
    unsigned __int128 a = den, b = d;
    while (b) {
      auto t = a % b;
      a = b;
      b = t;
    }
    den = den / a * d;
    if (den > (static_cast<unsigned __int128>(1) << 62))
      throw std::overflow_error("group_weights: denominator overflow");
  }
  unsigned __int128 total = 0;
  std::vector<uint64_t> weight(machines.size());
  for (size_t t = 0; t < machines.size(); ++t) {
    const Rat& z = ci.z[machines[t]];
    unsigned __int128 w = static_cast<unsigned __int128>(z.num()) *
                          (den / static_cast<unsigned __int128>(z.den()));
    if (w > UINT64_MAX)
      throw std::overflow_error("group_weights: weight overflow");
    weight[t] = static_cast<uint64_t>(w);
    total += weight[t];
  }
  if (total == 0 || total > UINT64_MAX)
    throw std::overflow_error("group_weights: total overflow");
  return {std::move(weight), static_cast<uint64_t>(total)};
}

std::vector<int> group_of_machine(const CanonicalInstance& ci) {
  std::vector<int> group_of(ci.num_machines(), -1);
  for (int g = 0; g < ci.num_groups(); ++g)
    for (int i : ci.groups[g]) group_of[i] = g;
  return group_of;
}

}  // namespace

Classification classify(const CanonicalInstance& ci,
                        const FinalConstants& constants) {
  if (ci.theta.sign() != 0)
    throw std::invalid_argument("classify: expects the theta=0 form");
  Classification cls;
  cls.q_effective = rat_max(ci.p, ci.q);
  double lnq = std::log(cls.q_effective.to_double());
  if (!(lnq > 0)) throw std::invalid_argument("classify: q too small");

  cls.dense_threshold = Rat::quantize(1.0 / (constants.c2 * lnq));
  cls.out_dense_threshold = Rat::quantize(1.0 / constants.c3);
  cls.load_event_threshold = Rat::quantize(constants.c1 * lnq);
  cls.fanout_threshold = Rat::quantize(17.0 * constants.c2 * lnq);
  double d0 = constants.delta0.value_or(
      1.0 / (34.0 * constants.c2 * constants.c3 * lnq));
  double d = constants.delta.value_or(
      1.0 / (340.0 * constants.c2 * constants.c2 * constants.c3 * lnq * lnq *
             lnq));
  cls.delta0 = Rat::quantize(d0);
  cls.delta = Rat::quantize(d);
  cls.run_length = constants.L_override.value_or(
      static_cast<int>(std::ceil(constants.L_factor * lnq)));
  if (cls.run_length < 2) cls.run_length = 2;

  int m = ci.num_machines();
  cls.red.assign(m, 0);
  cls.in_dense.assign(m, 0);
  cls.out_dense.assign(m, 0);
  cls.phi.resize(m);
  for (int h = 0; h < m; ++h) {
    cls.phi[h] = deficiency(ci, h);
    cls.red[h] = (cls.phi[h] + ci.z[h] < cls.delta0) ? 1 : 0;
  }
  std::vector<Rat> dense_out_mass(m, Rat(0));
  for (const auto& [key, load] : ci.w) {
    auto [h, k] = key;
    if (h == k) continue;
    if (load >= cls.dense_threshold) {
      cls.dense_edges.insert(key);
      cls.in_dense[k] = 1;
      dense_out_mass[h] += ci.z[k];
    }
  }
  for (int h = 0; h < m; ++h)
    cls.out_dense[h] = dense_out_mass[h] >= cls.out_dense_threshold ? 1 : 0;
  cls.red_edges = color_red_edges(ci, cls);
  return cls;
}

std::vector<std::pair<int, int>> color_red_edges(const CanonicalInstance& ci,
                                                 const Classification& cls) {
  std::vector<std::pair<int, int>> red_edges;
  int m = ci.num_machines();
  for (int h = 0; h < m; ++h) {
    if (!cls.red[h] || !cls.in_dense[h]) continue;
    int source = -1;  // lowest-id incoming dense edge
    for (const auto& [key, load] : ci.w) {
      (void)load;
      if (key.second == h && key.first != h && cls.dense_edges.count(key)) {
        source = key.first;
        break;  // map iteration is ordered, the first hit is the lowest id
      }
    }
    if (source >= 0 && cls.red[source] && !cls.out_dense[source])
      red_edges.push_back({source, h});
  }
  return red_edges;
}

namespace {

// Red in-edges form a function (target -> source); cycles are the cycles
// of that functional graph.
std::vector<std::vector<int>> red_cycles(int m,
                                         const std::vector<std::pair<int, int>>& red_edges) {
  std::vector<int> pred(m, -1);
  for (auto [k, h] : red_edges) pred[h] = k;
  std::vector<std::vector<int>> cycles;
  std::vector<int> state(m, 0);  // 0 fresh, 1 on path, 2 done
  for (int start = 0; start < m; ++start) {
    if (state[start]) continue;
    std::vector<int> path;
    int u = start;
    while (u >= 0 && state[u] == 0) {
      state[u] = 1;
      path.push_back(u);
      u = pred[u];
    }
    if (u >= 0 && state[u] == 1) {
      auto it = std::find(path.begin(), path.end(), u);
      cycles.push_back(std::vector<int>(it, path.end()));
    }
    for (int v : path) state[v] = 2;
  }
  return cycles;
}

}  // namespace

std::vector<std::vector<int>> eliminate_red_cycles(const CanonicalInstance& ci,
                                                   const Classification& cls) {
  auto pruned = ci.groups;
  auto cycles = red_cycles(ci.num_machines(), cls.red_edges);
  if (cycles.empty()) return pruned;
  auto group_of = group_of_machine(ci);

  // keep only cycles visiting every group at most once; a group's single
  // heavy job already breaks any cycle that meets it twice
  std::vector<std::vector<int>> items;  // cycle -> machines
  for (auto& cyc : cycles) {
    std::map<int, int> seen;
    bool duplicate = false;
    for (int h : cyc) {
      int g = group_of[h];
      if (g < 0)
        throw std::logic_error(
            "eliminate_red_cycles: red cycle through an ungrouped machine");
      if (seen.count(g)) {
        duplicate = true;
        break;
      }
      seen[g] = h;
    }
    if (!duplicate) items.push_back(cyc);
  }
  if (items.empty()) return pruned;

  GapInstance gap;
  gap.num_items = static_cast<int>(items.size());
  gap.num_groups = ci.num_groups();
  gap.capacity.resize(ci.num_groups());
  for (int g = 0; g < ci.num_groups(); ++g)
    gap.capacity[g] = ci.group_mass(g) / Rat(2);
  GapFractional frac;
  for (int c = 0; c < gap.num_items; ++c) {
    Rat share(1, static_cast<long long>(items[c].size()));
    for (int h : items[c]) {
      int g = group_of[h];
      gap.load[{c, g}] = ci.z[h];
      frac[{c, g}] = share;
    }
  }
  auto pick = lst_round(gap, frac);
  for (int c = 0; c < gap.num_items; ++c) {
    int g = pick[c];
    int victim = -1;
    for (int h : items[c])
      if (group_of[h] == g) victim = h;
    if (victim < 0)
      throw std::logic_error("eliminate_red_cycles: rounding chose a foreign group");
    auto& grp = pruned[g];
    grp.erase(std::remove(grp.begin(), grp.end(), victim), grp.end());
  }
  for (int g = 0; g < ci.num_groups(); ++g) {
    Rat kept(0);
    for (int i : pruned[g]) kept += ci.z[i];
    if (Rat(100) * kept < Rat(49) * ci.group_mass(g))
      throw NonTerminatedError(
          "eliminate_red_cycles: group " + std::to_string(g) +
          " lost more than half its mass; constants leave no room");
  }
  return pruned;
}

HeavyAssignment sample_assignment(const CanonicalInstance& ci,
                                  const std::vector<std::vector<int>>& pruned,
                                  Rng& rng) {
  HeavyAssignment f;
  f.to_machine.resize(pruned.size());
  for (size_t g = 0; g < pruned.size(); ++g) {
    if (pruned[g].empty())
      throw std::invalid_argument("sample_assignment: group " +
                                  std::to_string(g) +
                                  " has no machines left");
    auto [weight, total] = group_weights(ci, pruned[g]);
    uint64_t draw = rng.below(total);
    uint64_t acc = 0;
    for (size_t t = 0; t < pruned[g].size(); ++t) {
      acc += weight[t];
      if (draw < acc) {
        f.to_machine[g] = pruned[g][t];
        break;
      }
    }
  }
  return f;
}

std::vector<BadEvent> detect_bad_events(const CanonicalInstance& ci,
                                        const Classification& cls,
                                        const HeavyAssignment& f) {
  int m = ci.num_machines();
  auto covered = f.covered(m);
  std::vector<char> xr(m, 0);
  for (int i = 0; i < m; ++i) xr[i] = covered[i] && cls.red[i];
  auto group_of = group_of_machine(ci);
  auto groups_of = [&](const std::vector<int>& machines) {
    std::vector<int> gs;
    for (int i : machines)
      if (group_of[i] >= 0) gs.push_back(group_of[i]);
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    return gs;
  };

  std::vector<BadEvent> events;
  // load-excess and dense-fanout per machine
  for (int h = 0; h < m; ++h) {
    Rat out_mass(0);
    long long dense_count = 0;
    std::vector<int> red_out;
    for (const auto& [key, load] : ci.w) {
      if (key.first != h) continue;
      int k = key.second;
      if (cls.red[k] && k != h) red_out.push_back(k);
      if (!xr[k] || k == h) continue;
      out_mass += load;
      if (cls.dense_edges.count(key)) ++dense_count;
    }
    if (out_mass > cls.load_event_threshold)
      events.push_back({BadEventKind::LoadExcess, h, {}, groups_of(red_out)});
    if (Rat(dense_count) > cls.fanout_threshold)
      events.push_back({BadEventKind::DenseFanout, h, {}, groups_of(red_out)});
  }
  // red runs: connected components of red edges inside the selected red set
  {
    detail::UnionFind uf(m);
    for (auto [k, h] : cls.red_edges)
      if (xr[k] && xr[h]) uf.unite(k, h);
    std::map<int, std::vector<int>> comps;
    for (int i = 0; i < m; ++i)
      if (xr[i]) comps[uf.find(i)].push_back(i);
    for (auto& [root, machines] : comps) {
      (void)root;
      if (static_cast<int>(machines.size()) >= cls.run_length)
        events.push_back(
            {BadEventKind::RedRun, machines.front(), machines,
             groups_of(machines)});
    }
  }
  // sparse spill per in-sparse machine
  Rat spill_cap(1, 10);
  for (int h = 0; h < m; ++h) {
    if (cls.in_dense[h]) continue;
    Rat mass(0);
    std::vector<int> red_neighbors;
    for (const auto& [key, load] : ci.w) {
      auto [a, b] = key;
      if (b == h && cls.red[a] && a != h) red_neighbors.push_back(a);
      if (a == h && cls.red[b] && b != h) red_neighbors.push_back(b);
      if (b == h && xr[a] && a != h) mass += load * (Rat(1) - ci.z[h]);
      if (a == h && xr[b] && b != h) mass += load * ci.z[b];
    }
    if (mass > spill_cap)
      events.push_back(
          {BadEventKind::SparseSpill, h, {}, groups_of(red_neighbors)});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const BadEvent& a, const BadEvent& b) {
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.machine < b.machine;
                   });
  return events;
}

FinalRoundResult final_round(const CanonicalInstance& ci, Rng& rng,
                             const FinalConstants& constants) {
  // theta must be negligible against the certified goodness unless the
  // caller explicitly runs with override constants
  double qd = rat_max(ci.p, ci.q).to_double();
  double lnq = std::log(std::max(qd, 2.0));
  if (!constants.allow_large_theta) {
    double cbig = 32768.0 * constants.c1 * constants.c2 * constants.c2 *
                  constants.c2 * constants.c3 * constants.c3 *
                  std::pow(lnq, 5);
    double bound = std::pow(lnq, -5) / (4.0 * cbig);
    if (ci.theta.to_double() >= bound)
      throw std::invalid_argument(
          "final_round: theta too large for these constants; pass "
          "allow_large_theta to override");
  }

  auto scaled = scale_theta_to_zero(ci);
  FinalRoundResult res;
  res.classification = classify(scaled.ci, constants);
  res.pruned_groups = eliminate_red_cycles(scaled.ci, res.classification);

  lll::EventSystem sys;
  sys.variables.resize(scaled.ci.num_groups());
  for (int g = 0; g < scaled.ci.num_groups(); ++g) {
    const auto& machines = res.pruned_groups[g];
    if (machines.empty())
      throw std::invalid_argument("final_round: group " + std::to_string(g) +
                                  " lost all machines");
    auto [weights, total] = group_weights(scaled.ci, machines);
    sys.variables[g].group = g;
    sys.variables[g].sample = [machines, weights, total](Rng& r) {
      uint64_t draw = r.below(total);
      uint64_t acc = 0;
      for (size_t t = 0; t < machines.size(); ++t) {
        acc += weights[t];
        if (draw < acc) return static_cast<long long>(machines[t]);
      }
      return static_cast<long long>(machines.back());
    };
  }
  const CanonicalInstance& sci = scaled.ci;
  const Classification& cls = res.classification;
  sys.detectors.push_back([&sci, &cls](const lll::Assignment& a)
                              -> std::optional<lll::Event> {
    HeavyAssignment f;
    f.to_machine.assign(a.begin(), a.end());
    auto events = detect_bad_events(sci, cls, f);
    if (events.empty()) return std::nullopt;
    const BadEvent& e = events.front();
    lll::Event ev;
    ev.scope = e.groups;
    ev.label = std::string(bad_event_name(e.kind)) + " m" +
               std::to_string(e.machine);
    ev.occurs = [](const lll::Assignment&) { return true; };
    return ev;
  });

  lll::MtPolicy policy;
  policy.max_resamples = constants.mt_max_resamples;
  auto mt = lll::moser_tardos(sys, rng, policy);
  res.resamples = mt.resamples;
  res.event_tally = mt.resamples_by_event;
  if (!mt.ok) {
    std::ostringstream os;
    os << "final_round: " << mt.detail << "; tallies:";
    for (const auto& [label, count] : mt.resamples_by_event)
      os << " " << label << "=" << count;
    throw NonTerminatedError(os.str());
  }
  res.assignment.to_machine.assign(mt.assignment.begin(), mt.assignment.end());

  // certified goodness: delta*delta0/(2 c1 ln q) minus the rescale surcharge
  Rat mt_delta = cls.delta * cls.delta0 /
                 (Rat(2) * cls.load_event_threshold);
  double report = mt_delta.to_double() - scaled.surcharge.to_double();
  res.delta_report = report;
  res.delta_report_rat = Rat::quantize(report, 26, false);
  auto [good, placement] = is_delta_good(ci, res.assignment,
                                         res.delta_report_rat);
  res.verified = good;
  res.placement = std::move(placement);
  return res;
}

}  // namespace resched
