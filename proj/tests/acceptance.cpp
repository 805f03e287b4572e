// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; the oracle side of
// every comparison is independent of the implementation path it checks.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "resched/baselines.hpp"
#include "resched/canonical.hpp"
#include "resched/coarsen.hpp"
#include "resched/finalround.hpp"
#include "resched/goodness.hpp"
#include "resched/instance.hpp"
#include "resched/linprog.hpp"
#include "resched/lll.hpp"
#include "resched/pipeline.hpp"
#include "test_util.hpp"

using namespace resched;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- 1. flow certificate vs subset enumeration -------------------------
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0, disagreements = 0;
  const Rat deltas[] = {Rat(0), Rat(1, 20), Rat(1, 10), Rat(1, 2)};
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    auto ci = testutil::random_canonical(3 + seed % 6, 10000 + seed,
                                         0.2 + 0.04 * (seed % 6));
    auto f = testutil::random_assignment(ci, seed * 31);
    for (const Rat& delta : deltas) {
      bool flow = is_delta_good(ci, f, delta).first;
      bool brute = delta_good_bruteforce(ci, f, delta).first;
      ++checked;
      if (flow != brute) ++disagreements;
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << checked << " comparisons over 200 instances, " << disagreements
     << " disagreements, " << secs << "s";
  report(1, "flow certificate equals subset enumeration",
         disagreements == 0 && checked == 800 && secs < 60.0, os.str());
}

// ---- 2. matching baseline ratio ----------------------------------------
void criterion_2() {
  int violations = 0, runs = 0;
  const Rat eps_choices[] = {Rat(1, 2), Rat(1, 3), Rat(1, 4)};
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    GenParams gp;
    gp.machines = 3 + seed % 6;           // up to 8 machines
    gp.heavy = 1 + seed % 3;
    gp.light = 2 + seed % 7;              // at most 12 jobs total
    gp.eps = eps_choices[seed % 3];
    gp.elig_min = 1;
    gp.elig_max = 3;
    gp.seed = 20000 + seed;
    Instance inst = gen_random(gp);
    auto bf = brute_force_opt(inst);
    auto res = matching_baseline_auto(inst);
    Rat mk = makespan(inst, res.schedule);
    ++runs;
    if (!(mk <= (Rat(2) - inst.eps) * bf.opt)) ++violations;
  }
  std::ostringstream os;
  os << runs << " instances, " << violations << " ratio violations";
  report(2, "matching baseline within (2-eps) of the optimum",
         violations == 0 && runs == 100, os.str());
}

// ---- 3. hardness family ------------------------------------------------
void criterion_3() {
  int yes_bad = 0, no_bad = 0, graphs = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    for (int n : {6, 8, 10}) {
      if (graphs >= 20) break;
      auto graph = gen_random_cubic(n, 30000 + seed * 10 + n);
      int minvc = min_vertex_cover_size(graph);
      ++graphs;
      // yes side: a cover of size minvc exists -> optimum exactly one
      Instance yes = gen_vertex_cover(graph, minvc, Rat(1, 6));
      auto opt_yes = brute_force_opt(yes, 10, 64, 4000000).opt;
      if (opt_yes != Rat(1)) ++yes_bad;
      // no side: one unit below the minimum cover -> at least 7/6
      Instance no = gen_vertex_cover(graph, minvc - 1, Rat(1, 6));
      auto opt_no = brute_force_opt(no, 10, 64, 4000000).opt;
      if (!(opt_no >= Rat(7, 6))) ++no_bad;
    }
  }
  std::ostringstream os;
  os << graphs << " cubic graphs, " << yes_bad << " bad yes-instances, "
     << no_bad << " bad no-instances";
  report(3, "hardness family: optimum 1 vs at least 7/6",
         graphs == 20 && yes_bad == 0 && no_bad == 0, os.str());
}

// ---- 4. canonical reduction soundness ----------------------------------
void criterion_4() {
  int feasible = 0, bad_canonical = 0, bad_rotation = 0;
  Rat rho(3, 5), delta(1, 10);
  for (uint64_t seed = 1; seed <= 200 && feasible < 60; ++seed) {
    GenParams gp;
    gp.machines = 4 + seed % 7;           // up to 10 machines
    gp.heavy = 1 + seed % 4;
    gp.light = 3 + seed % 6;
    gp.eps = (seed % 2) ? Rat(1, 3) : Rat(1, 4);
    gp.elig_min = 1;
    gp.elig_max = 3;
    gp.seed = 40000 + seed;
    Instance inst = gen_random(gp);
    auto model = build_lp(inst, rho, delta);
    auto out = solve_feasibility(model);
    if (out.status != SolveStatus::Feasible) continue;
    ++feasible;

    // rotation preserves the exact value of every relaxation row
    auto sol = snap_solution(inst, model, out.values);
    auto sol_rotated = sol;
    long long edges = static_cast<long long>(sol.x_heavy.size());
    int rotations = rotate_heavy_cycles(inst, sol_rotated);
    bool rotation_ok =
        rotations <= edges &&
        exact_solution_residual(inst, rho, delta, sol_rotated) == Rat(0) &&
        sol_rotated.z == sol.z;
    std::map<int, Rat> light_before, light_after;
    for (const auto& [key, x] : sol.x_light) light_before[key.first] += x;
    for (const auto& [key, x] : sol_rotated.x_light)
      light_after[key.first] += x;
    if (light_before != light_after) rotation_ok = false;
    if (!rotation_ok) ++bad_rotation;

    auto canon = to_canonical(inst, model, out.values, rho, delta);
    Rat p = Rat(static_cast<long long>(inst.machines.size())) / (rho * delta);
    Rat q = Rat(1) / inst.eps;
    if (!check_canonical(canon.ci, p, q, rho * delta).ok()) ++bad_canonical;
  }
  std::ostringstream os;
  os << feasible << " feasible instances, " << bad_canonical
     << " canonical failures, " << bad_rotation << " rotation failures";
  report(4, "canonical reduction sound at (m/(rho delta), 1/eps, rho delta)",
         feasible >= 60 && bad_canonical == 0 && bad_rotation == 0, os.str());
}

// ---- 5. subset identity ------------------------------------------------
void criterion_5() {
  Rng rng(substream_seed(77, "acceptance-subsets"));
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto ci = testutil::random_canonical(3 + trial % 8, 50000 + trial);
    std::vector<int> s;
    for (int i = 0; i < ci.num_machines(); ++i)
      if (rng.below(2)) s.push_back(i);
    auto st = subset_stats(ci, s);
    if (st.phi + st.z_sum + st.w_ss + st.bnd !=
        Rat(static_cast<long long>(s.size())))
      ++bad;
  }
  report(5, "deficiency identity has zero residual on 1000 subsets", bad == 0,
         std::to_string(bad) + " violations");
}

// ---- 6. coarsening statistics ------------------------------------------
void criterion_6() {
  // fixture with three randomized light entries and one randomized mass
  CanonicalInstance ci;
  ci.machine_ids = {0, 1, 2, 3};
  ci.groups = {{0, 1}, {2, 3}};
  ci.z = {Rat(1, 5), Rat(1, 5), Rat(1, 5), Rat(1, 5)};
  ci.w[{0, 1}] = Rat(3, 5);
  ci.w[{1, 0}] = Rat(7, 10);
  ci.w[{2, 3}] = Rat(1, 150);
  ci.w[{3, 2}] = Rat(1, 200);
  ci.w[{0, 2}] = Rat(1, 120);
  ci.p = Rat(5);
  ci.q = Rat(200);
  ci.theta = Rat(1, 50);

  CoarsenConfig cfg;
  Rat track(3, 5);
  auto witnesses = enumerate_core_witnesses(ci, track, 3);
  const int trials = 10000;
  std::map<std::pair<int, int>, double> sums;
  int canonical_bad = 0, witness_bad = 0;
  Rat threshold = Rat(2) / ci.q;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(60000 + t, "acceptance-reduce-q"));
    auto res = reduce_q(ci, rng, cfg, track);
    if (!check_canonical(res.ci, ci.p, ci.q / Rat(2),
                         ci.theta + res.trace.theta_step)
             .ok())
      ++canonical_bad;
    for (auto key : {std::pair<int, int>{2, 3}, {3, 2}, {0, 2}}) {
      auto it = res.ci.w.find(key);
      sums[key] += it == res.ci.w.end() ? 0.0 : it->second.to_double();
    }
    if (t < 200) {  // witness survival re-checked on a prefix of runs
      Rat delta_after = track + res.trace.delta_step;
      for (const auto& wit : witnesses) {
        Rat wss(0);
        for (const auto& [key, load] : res.ci.w) {
          bool fi = std::find(wit.S.begin(), wit.S.end(), key.first) !=
                    wit.S.end();
          bool se = std::find(wit.S.begin(), wit.S.end(), key.second) !=
                    wit.S.end();
          if (fi && se) wss += load;
        }
        if (!(Rat(static_cast<long long>(wit.T.size())) + wss >
              (Rat(2) - delta_after) *
                  Rat(static_cast<long long>(wit.S.size()))))
          ++witness_bad;
      }
    }
  }
  bool mean_ok = true;
  std::ostringstream os;
  for (auto key : {std::pair<int, int>{2, 3}, {3, 2}, {0, 2}}) {
    double w = ci.w.at(key).to_double();
    double v = threshold.to_double();
    double prob = w / v;
    double sigma = v * std::sqrt(prob * (1 - prob) / trials);
    double err = std::abs(sums[key] / trials - w);
    if (err > 3 * sigma) mean_ok = false;
  }

  // reduce-p statistics on its own fixture
  CanonicalInstance cp;
  cp.machine_ids = {0, 1, 2, 3, 4};
  cp.groups = {{0, 1, 2}, {3, 4}};
  cp.z = {Rat(1, 4), Rat(1, 150), Rat(1, 200), Rat(1, 4), Rat(1, 120)};
  cp.w[{0, 3}] = Rat(1, 10);
  cp.w[{3, 0}] = Rat(1, 10);
  cp.p = Rat(200);
  cp.q = Rat(50);
  cp.theta = Rat(1, 50);
  double zsum = 0;
  int p_bad = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(70000 + t, "acceptance-reduce-p"));
    auto res = reduce_p(cp, rng, cfg);
    if (!check_canonical(res.ci, cp.p / Rat(2), cp.q,
                         cp.theta + res.trace.theta_step)
             .ok())
      ++p_bad;
    zsum += res.ci.z[1].to_double();
  }
  {
    double z = cp.z[1].to_double();
    double v = (Rat(2) / cp.p).to_double();
    double prob = z / v;
    double sigma = v * std::sqrt(prob * (1 - prob) / trials);
    if (std::abs(zsum / trials - z) > 3 * sigma) mean_ok = false;
  }
  os << "means within 3 sigma: " << (mean_ok ? "yes" : "no")
     << ", canonical failures " << canonical_bad + p_bad
     << ", witness failures " << witness_bad;
  report(6, "coarsening rounds: unbiased, canonical, witness-preserving",
         mean_ok && canonical_bad == 0 && p_bad == 0 && witness_bad == 0,
         os.str());
}

// ---- 7. resampling engine on sparse 3-SAT -------------------------------
void criterion_7() {
  int solved = 0;
  long long resamples = 0;
  int clause_count = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    // chunks of five variables, two clauses sharing the middle variable:
    // overlap degree one satisfies e * 2^-3 * 2 < 1
    Rng gen(substream_seed(seed, "acceptance-3sat"));
    struct Clause {
      std::array<int, 3> lits;
    };
    std::vector<Clause> clauses;
    int num_vars = 30;
    auto sign = [&]() { return gen.below(2) ? 1 : -1; };
    for (int base = 0; base + 5 <= num_vars; base += 5) {
      clauses.push_back({{(base + 1) * sign(), (base + 2) * sign(),
                          (base + 3) * sign()}});
      clauses.push_back({{(base + 3) * sign(), (base + 4) * sign(),
                          (base + 5) * sign()}});
    }
    clause_count = static_cast<int>(clauses.size());
    lll::EventSystem sys;
    sys.variables.resize(num_vars);
    for (auto& v : sys.variables)
      v.sample = [](Rng& r) { return static_cast<long long>(r.below(2)); };
    for (size_t c = 0; c < clauses.size(); ++c) {
      lll::Event ev;
      ev.id = static_cast<int>(c);
      for (int lit : clauses[c].lits) ev.scope.push_back(std::abs(lit) - 1);
      auto lits = clauses[c].lits;
      ev.occurs = [lits](const lll::Assignment& a) {
        for (int lit : lits) {
          bool value = a[std::abs(lit) - 1] != 0;
          if (value == (lit > 0)) return false;
        }
        return true;
      };
      ev.prob_bound = 1.0 / 8.0;
      ev.x_weight = 0.5;
      sys.events.push_back(std::move(ev));
    }
    Rng rng(substream_seed(seed, "acceptance-3sat-run"));
    auto res = lll::moser_tardos(sys, rng);
    if (!res.ok) continue;
    bool all_clear = true;
    for (const auto& ev : sys.events)
      if (ev.occurs(res.assignment)) all_clear = false;
    if (all_clear) ++solved;
    resamples += res.resamples;
  }
  double mean = resamples / 100.0;
  double bound = clause_count * 1.0;  // sum of x/(1-x) at x = 1/2
  std::ostringstream os;
  os << solved << "/100 solved, mean resamples " << mean << " vs 10x bound "
     << 10 * bound;
  report(7, "resampling engine solves sparse 3-SAT",
         solved == 100 && mean <= 10 * bound, os.str());
}

// ---- 8. run-probability bound on red trees ------------------------------
void criterion_8() {
  // twelve-node fixture trees; selection probabilities p_i = 11 * z_i with
  // z_i = 1/1100, summed exactly over all connected S of size L through h
  bool all_ok = true;
  std::ostringstream os;
  for (int shape = 0; shape < 3 && all_ok; ++shape) {
    std::vector<std::vector<int>> children(12);
    for (int v = 1; v < 12; ++v) {
      int parent = shape == 0 ? (v - 1) / 2 : (shape == 1 ? v - 1 : (v - 1) / 3);
      children[parent].push_back(v);
    }
    Rat p(1, 100);  // = 11 * (1/1100)
    for (int L : {3, 4, 5}) {
      long long count = 0;
      Rat total(0);
      std::vector<int> cur{0};
      std::function<void(std::vector<int>&, std::vector<int>)> grow =
          [&](std::vector<int>& s, std::vector<int> frontier) {
            if (static_cast<int>(s.size()) == L) {
              ++count;
              Rat prob(1);
              for (size_t i = 0; i < s.size(); ++i) prob *= p;
              total += prob;
              return;
            }
            while (!frontier.empty()) {
              int v = frontier.front();
              frontier.erase(frontier.begin());
              std::vector<int> next = frontier;
              for (int c : children[v]) next.push_back(c);
              s.push_back(v);
              grow(s, next);
              s.pop_back();
            }
          };
      grow(cur, children[0]);
      Rat bound(1);
      for (int i = 0; i < L; ++i) bound *= Rat(1, 3);
      if (!(total <= bound) || count == 0) all_ok = false;
      os << "L=" << L << ":" << count << " sets ";
    }
  }
  report(8, "red-run probability mass within 3^-L on fixture trees", all_ok,
         os.str());
}

// ---- 9. end-to-end pipeline ---------------------------------------------
void criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  SolveOptions opts;
  opts.rho = Rat(3, 5);
  opts.delta = Rat(1, 1000);
  opts.q0 = Rat(100000000);  // no coarsening: parameters stay below q0
  opts.constants.c1 = 0.5;
  opts.constants.c2 = 1.0;
  opts.constants.c3 = 8.0;
  opts.constants.L_override = 5;
  opts.constants.delta0 = 0.9;
  opts.constants.delta = 0.9;
  opts.constants.allow_large_theta = true;

  int solved = 0, schedule_bad = 0, good_bad = 0, scale_bad = 0;
  uint64_t seed = 0;
  while (solved < 50 && ++seed <= 200) {
    GenParams gp;
    gp.machines = 10 + static_cast<int>(seed % 31);  // up to 40 machines
    gp.heavy = gp.machines / 3;
    gp.light = gp.machines;
    gp.eps = Rat(1, 64);
    gp.elig_min = 2;
    gp.elig_max = 4;
    gp.seed = 80000 + seed;
    Instance inst = gen_random(gp);
    SolveOptions o = opts;
    o.seed = seed;
    SolveResult res;
    try {
      res = solve_instance(inst, o);
    } catch (const std::exception&) {
      continue;
    }
    if (res.path != SolveResult::Path::Pipeline) continue;
    ++solved;
    if (!res.verified_schedule || makespan(inst, res.schedule) != res.makespan)
      ++schedule_bad;
    if (!res.verified_good) ++good_bad;
    if (!(res.makespan <= Rat(2))) ++scale_bad;  // twice the relaxation scale
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << solved << " pipeline solves, " << schedule_bad
     << " schedule failures, " << good_bad << " goodness failures, "
     << scale_bad << " above twice the scale, " << secs << "s";
  report(9, "end-to-end solves verify and stay within twice the scale",
         solved == 50 && schedule_bad == 0 && good_bad == 0 &&
             scale_bad == 0 && secs < 300.0,
         os.str());
}

// ---- 10. tail-bound calculator ------------------------------------------
void criterion_10() {
  bool ok = true;
  // closed forms at twenty sampled points, relative error at most 1e-12
  int point = 0;
  for (double mu : {0.5, 1.0, 2.0, 5.0}) {
    for (double K : {0.5, 1.0}) {
      for (double lam : {7.0, 11.0}) {
        if (point >= 20) break;
        ++point;
        double got = lll::chernoff_bound(mu, K, lam, lll::Tail::Upper);
        double want = std::exp(-lam * mu / K);
        if (std::abs(got - want) > 1e-12 * want) ok = false;
      }
    }
  }
  for (double lam : {0.1, 0.5, 0.9}) {
    ++point;
    double got = lll::chernoff_bound(2.0, 1.0, lam, lll::Tail::UpperSmall);
    if (std::abs(got - std::exp(-lam * lam * 2.0 / 3.0)) > 1e-12) ok = false;
    ++point;
    got = lll::chernoff_bound(2.0, 1.0, lam, lll::Tail::Lower);
    if (std::abs(got - std::exp(-lam * lam * 2.0 / 2.0)) > 1e-12) ok = false;
  }
  if (point < 20) ok = false;
  // monotone over a lambda grid
  double prev = 2.0;
  for (double lam = 7.0; lam <= 40.0; lam += 0.25) {
    double b = lll::chernoff_bound(1.0, 1.0, lam, lll::Tail::Upper);
    if (b >= prev) ok = false;
    prev = b;
  }
  report(10, "tail-bound calculator matches closed forms to 1e-12", ok,
         std::to_string(point) + " sampled points plus a 133-point grid");
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%s: %d criterion(s) failed, %.1fs total\n",
              failures == 0 ? "ACCEPTED" : "REJECTED", failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
