#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "resched/canonical.hpp"
#include "resched/goodness.hpp"
#include "resched/instance.hpp"
#include "resched/io.hpp"
#include "resched/linprog.hpp"
#include "test_util.hpp"

using namespace resched;

namespace {

struct RowValues {
  std::map<int, Rat> job_sum_h, job_sum_l;
  std::vector<Rat> z, light_mass;
};

RowValues row_values(const Instance& inst, const ExactSolution& sol) {
  RowValues rv;
  rv.z = sol.z;
  rv.light_mass.assign(inst.machines.size(), Rat(0));
  for (const auto& [key, x] : sol.x_heavy) rv.job_sum_h[key.first] += x;
  for (const auto& [key, x] : sol.x_light) {
    rv.job_sum_l[key.first] += x;
    rv.light_mass[key.second] += x;
  }
  return rv;
}

Instance four_cycle_instance() {
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1};
  inst.heavy = {{0, {0, 1}}, {1, {0, 1}}};
  return inst;
}

ExactSolution four_cycle_solution() {
  ExactSolution sol;
  sol.z = {Rat(1), Rat(1)};
  sol.x_heavy[{0, 0}] = Rat(1, 2);
  sol.x_heavy[{0, 1}] = Rat(1, 2);
  sol.x_heavy[{1, 0}] = Rat(1, 2);
  sol.x_heavy[{1, 1}] = Rat(1, 2);
  return sol;
}

// one solved, snapped pipeline input per seed; nullopt when infeasible
std::optional<std::pair<Instance, ExactSolution>> feasible_fixture(
    uint64_t seed, int machines = 4, int heavy = 2, int light = 5,
    Rat eps = Rat(1, 4)) {
  GenParams gp;
  gp.machines = machines;
  gp.heavy = heavy;
  gp.light = light;
  gp.eps = eps;
  gp.elig_min = 1;
  gp.elig_max = 3;
  gp.seed = seed;
  Instance inst = gen_random(gp);
  auto model = build_lp(inst, Rat(3, 5), Rat(1, 10));
  auto out = solve_feasibility(model);
  if (out.status != SolveStatus::Feasible) return std::nullopt;
  return std::make_pair(inst, snap_solution(inst, model, out.values));
}

}  // namespace

TEST_CASE("rotate_heavy_cycles: acyclic input is untouched") {
  Instance inst = four_cycle_instance();
  ExactSolution sol;
  sol.z = {Rat(1), Rat(1)};
  sol.x_heavy[{0, 0}] = Rat(1);
  sol.x_heavy[{1, 1}] = Rat(1);
  auto before = sol.x_heavy;
  CHECK(rotate_heavy_cycles(inst, sol) == 0);
  CHECK(sol.x_heavy == before);
}

TEST_CASE("rotate_heavy_cycles: four-cycle resolves in one rotation") {
  Instance inst = four_cycle_instance();
  auto sol = four_cycle_solution();
  int rotations = rotate_heavy_cycles(inst, sol);
  CHECK(rotations == 1);
  // one edge dropped to zero, its cycle partner raised to one
  CHECK(sol.x_heavy.size() == 2);
  for (const auto& [key, x] : sol.x_heavy) {
    (void)key;
    CHECK(x == Rat(1));
  }
  CHECK(sol.z == std::vector<Rat>{Rat(1), Rat(1)});
  // each job fully assigned, each machine carries exactly one job
  std::map<int, Rat> per_job, per_machine;
  for (const auto& [key, x] : sol.x_heavy) {
    per_job[key.first] += x;
    per_machine[key.second] += x;
  }
  CHECK(per_job[0] == Rat(1));
  CHECK(per_job[1] == Rat(1));
  CHECK(per_machine[0] == Rat(1));
  CHECK(per_machine[1] == Rat(1));
}

TEST_CASE("rotate_heavy_cycles: preserves every row value, few rotations") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    auto fx = feasible_fixture(seed);
    if (!fx) continue;
    auto& [inst, sol] = *fx;
    auto before = row_values(inst, sol);
    long long edges = static_cast<long long>(sol.x_heavy.size());
    ExactSolution rotated = sol;
    int rotations = rotate_heavy_cycles(inst, rotated);
    CHECK(rotations <= edges);
    auto after = row_values(inst, rotated);
    CHECK(after.job_sum_h == before.job_sum_h);
    CHECK(after.job_sum_l == before.job_sum_l);
    CHECK(after.z == before.z);
    CHECK(after.light_mass == before.light_mass);
    CHECK(exact_solution_residual(inst, Rat(3, 5), Rat(1, 10), rotated) ==
          Rat(0));
    // support is now a forest: edges <= nodes - components <= nodes - 1
    CHECK(rotate_heavy_cycles(inst, rotated) == 0);
  }
}

TEST_CASE("rotate_light_cycles: breaks the non-tight support, keeps sums") {
  // two light jobs split across two empty machines: a four-cycle of
  // non-tight edges (z = 0 everywhere, so nothing is tight)
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1};
  inst.light = {{0, {0, 1}}, {1, {0, 1}}};
  ExactSolution sol;
  sol.z = {Rat(0), Rat(0)};
  sol.x_light[{0, 0}] = Rat(1, 2);
  sol.x_light[{0, 1}] = Rat(1, 2);
  sol.x_light[{1, 0}] = Rat(1, 2);
  sol.x_light[{1, 1}] = Rat(1, 2);
  int rotations = rotate_light_cycles(inst, sol);
  CHECK(rotations == 1);
  // per-job cover and per-machine light mass are preserved exactly
  std::map<int, Rat> job_sum, machine_sum;
  for (const auto& [key, x] : sol.x_light) {
    job_sum[key.first] += x;
    machine_sum[key.second] += x;
  }
  CHECK(job_sum[0] == Rat(1));
  CHECK(job_sum[1] == Rat(1));
  CHECK(machine_sum[0] == Rat(1));
  CHECK(machine_sum[1] == Rat(1));
}

TEST_CASE("rotate_light_cycles: tight edges freeze and cap the shift") {
  // machine 0 carries heavy mass 2/5; the job-0 edge onto it becomes tight
  // at x = 3/5, which must stop the rotation instead of pushing past it
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1};
  inst.light = {{0, {0, 1}}, {1, {0, 1}}};
  ExactSolution sol;
  sol.z = {Rat(2, 5), Rat(0)};
  sol.x_light[{0, 0}] = Rat(1, 2);
  sol.x_light[{0, 1}] = Rat(1, 2);
  sol.x_light[{1, 0}] = Rat(1, 2);
  sol.x_light[{1, 1}] = Rat(1, 2);
  rotate_light_cycles(inst, sol);
  for (const auto& [key, x] : sol.x_light)
    CHECK(x + sol.z[key.second] <= Rat(1));
  // the remaining non-tight support is a forest: re-running does nothing
  CHECK(rotate_light_cycles(inst, sol) == 0);
}

TEST_CASE("decompose_heavy_forest: trivial tree gives a singleton group") {
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0};
  inst.heavy = {{7, {0}}};
  ExactSolution sol;
  sol.z = {Rat(1)};
  sol.x_heavy[{0, 0}] = Rat(1);
  auto d = decompose_heavy_forest(inst, sol);
  REQUIRE(d.groups.size() == 1);
  CHECK(d.groups[0] == std::vector<int>{0});
  CHECK(d.origins[0].kind == GroupOrigin::Kind::Trivial);
  CHECK(d.origins[0].job_id == 7);
}

TEST_CASE("decompose_heavy_forest: hand-run of the star split") {
  // j0 on machines {0 (x=3/5), 1 (x=2/5)}; j1 on {0 (x=2/5), 2 (x=3/5)}
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1, 2};
  inst.heavy = {{0, {0, 1}}, {1, {0, 2}}};
  ExactSolution sol;
  sol.z = {Rat(1), Rat(2, 5), Rat(3, 5)};
  sol.x_heavy[{0, 0}] = Rat(3, 5);
  sol.x_heavy[{0, 1}] = Rat(2, 5);
  sol.x_heavy[{1, 0}] = Rat(2, 5);  // at most 1/2: this edge is cut
  sol.x_heavy[{1, 2}] = Rat(3, 5);
  auto d = decompose_heavy_forest(inst, sol);
  REQUIRE(d.groups.size() == 2);
  CHECK(d.groups[0] == std::vector<int>{0, 1});  // leaves of the j0 tree
  CHECK(d.groups[1] == std::vector<int>{2});     // leaves of the j1 tree
  CHECK(d.origins[0].kind == GroupOrigin::Kind::TreeLeafSet);
  CHECK(d.origins[1].kind == GroupOrigin::Kind::TreeLeafSet);
  // leaf groups keep at least half a unit of heavy mass
  CHECK(sol.z[0] + sol.z[1] >= Rat(1, 2));
  CHECK(sol.z[2] >= Rat(1, 2));
}

TEST_CASE("decompose_heavy_forest: every group keeps mass at least 1/2") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    auto fx = feasible_fixture(seed, 5, 3, 4);
    if (!fx) continue;
    auto& [inst, sol] = *fx;
    rotate_heavy_cycles(inst, sol);
    auto d = decompose_heavy_forest(inst, sol);
    std::vector<char> used(inst.machines.size(), 0);
    for (const auto& g : d.groups) {
      Rat mass(0);
      for (int i : g) {
        CHECK_FALSE(used[i]);  // pairwise disjoint
        used[i] = 1;
        mass += sol.z[i];
      }
      CHECK(mass >= Rat(1, 2));
    }
  }
}

TEST_CASE("process_light_jobs: fully assigned job on an empty machine") {
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0};
  inst.light = {{3, {0}}};
  ExactSolution sol;
  sol.z = {Rat(0)};
  sol.x_light[{0, 0}] = Rat(1);
  auto lp = process_light_jobs(inst, sol);
  CHECK(lp.permanent_lights.empty());
  CHECK(lp.w.at({0, 0}) == Rat(1, 4));
  CHECK(lp.type_jobs.at({0, 0}) == std::vector<long long>{3});
}

TEST_CASE("process_light_jobs: tight edges demand x of at least 3/5") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    auto fx = feasible_fixture(seed, 4, 2, 6, Rat(1, 3));
    if (!fx) continue;
    auto& [inst, sol] = *fx;
    rotate_heavy_cycles(inst, sol);
    for (Rat& z : sol.z) z *= Rat(2, 5);
    rotate_light_cycles(inst, sol);
    for (const auto& [key, x] : sol.x_light) {
      if (x.sign() <= 0) continue;
      if (x + sol.z[key.second] == Rat(1))  // tight edge
        CHECK(x >= Rat(3, 5));
    }
  }
}

TEST_CASE("process_light_jobs: conserves light mass, one permanent per machine") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    auto fx = feasible_fixture(seed, 5, 2, 7, Rat(1, 3));
    if (!fx) continue;
    auto& [inst, sol] = *fx;
    rotate_heavy_cycles(inst, sol);
    for (Rat& z : sol.z) z *= Rat(2, 5);
    rotate_light_cycles(inst, sol);
    auto lp = process_light_jobs(inst, sol);
    Rat typed(0);
    for (const auto& [key, load] : lp.w) {
      (void)key;
      typed += load;
    }
    Rat total = inst.eps * Rat(static_cast<long long>(inst.light.size()));
    Rat permanent = inst.eps *
                    Rat(static_cast<long long>(lp.permanent_lights.size()));
    CHECK(typed + permanent == total);
    std::set<long long> machines_used;
    for (const auto& [jid, mid] : lp.permanent_lights) {
      (void)jid;
      CHECK(machines_used.insert(mid).second);  // at most one per machine
    }
  }
}

TEST_CASE("to_canonical: canonical properties hold exactly") {
  int ran = 0;
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    GenParams gp;
    gp.machines = 5;
    gp.heavy = 3;
    gp.light = 6;
    gp.eps = Rat(1, 3);
    gp.elig_min = 2;
    gp.elig_max = 4;
    gp.seed = seed;
    Instance inst = gen_random(gp);
    Rat rho(3, 5), delta(1, 10);
    auto model = build_lp(inst, rho, delta);
    auto out = solve_feasibility(model);
    if (out.status != SolveStatus::Feasible) continue;
    ++ran;
    auto res = to_canonical(inst, model, out.values, rho, delta);
    Rat p = Rat(static_cast<long long>(inst.machines.size())) / (rho * delta);
    Rat q = Rat(1) / inst.eps;
    Rat theta = rho * delta;
    auto rep = check_canonical(res.ci, p, q, theta);
    CHECK(rep.ok());
    if (!rep.ok())
      for (const auto& issue : rep.issues) MESSAGE(issue);
    CHECK(res.ci.p == p);
    CHECK(res.ci.q == q);
    CHECK(res.ci.theta == theta);
    for (const auto& z : res.ci.z) CHECK(z <= Rat(2, 5));
  }
  CHECK(ran >= 10);
}

TEST_CASE("to_canonical: thin heavy mass is thresholded and types collapse") {
  // j0 leaves a sliver 1/200 on machine 1; after the 2/5 rescale it drops
  // below rho*delta/m = 1/50 and machine 1 leaves the group. Light job 2
  // is typed (2,1) (owned by machine 1, overflow to 2) before the
  // threshold, so its type must collapse onto the diagonal (1,1).
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1, 2};
  inst.heavy = {{0, {0, 1}}};
  inst.light = {{1, {1, 2}}, {2, {1, 2}}};
  ExactSolution sol;
  sol.z = {Rat(199, 200), Rat(1, 200), Rat(0)};
  sol.x_heavy[{0, 0}] = Rat(199, 200);
  sol.x_heavy[{0, 1}] = Rat(1, 200);
  // both lights tight on machine 1 after scaling (x + 2/5 * z = 1), with
  // slivers on machine 2 forming a two-job loose tree
  sol.x_light[{0, 1}] = Rat(499, 500);
  sol.x_light[{0, 2}] = Rat(1, 500);
  sol.x_light[{1, 1}] = Rat(499, 500);
  sol.x_light[{1, 2}] = Rat(1, 500);
  REQUIRE(exact_solution_residual(inst, Rat(3, 5), Rat(1, 10), sol) == Rat(0));

  auto res = to_canonical_exact(inst, sol, Rat(3, 5), Rat(1, 10));
  // machine 1 was logged and zeroed; the group shrank to machine 0
  REQUIRE(res.lift.removed_machines.size() == 1);
  CHECK(res.lift.removed_machines[0].first == 1);
  CHECK(res.ci.z[1] == Rat(0));
  CHECK(res.ci.groups == std::vector<std::vector<int>>{{0}});
  // light job 1 went permanent (root of the loose tree); job 2 was typed
  // toward machine 1 and collapsed onto the diagonal
  CHECK(res.lift.permanent_lights.at(1) == 2);
  REQUIRE(res.ci.w.size() == 1);
  CHECK(res.ci.w.at({1, 1}) == Rat(1, 4));
  CHECK(res.lift.type_jobs.at({1, 1}) == std::vector<long long>{2});
  auto rep = check_canonical(res.ci, Rat(50), Rat(4), Rat(3, 50));
  CHECK(rep.ok());
  for (const auto& s : rep.issues) MESSAGE(s);

  // lift: heavy to machine 0, the diagonal unit onto machine 1
  HeavyAssignment f{{0}};
  IntegralPlacement units;
  units.units[{1, 1}] = {1, 0};
  auto sched = lift_assignment(inst, res.ci, res.lift, f, units);
  CHECK(sched.assignment.at(0) == 0);
  CHECK(sched.assignment.at(1) == 2);
  CHECK(sched.assignment.at(2) == 1);
  CHECK(makespan(inst, sched) == Rat(1));
}

TEST_CASE("to_canonical: no light jobs leaves w empty") {
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1};
  inst.heavy = {{0, {0, 1}}};
  auto model = build_lp(inst, Rat(3, 5), Rat(1, 10));
  auto out = solve_feasibility(model);
  REQUIRE(out.status == SolveStatus::Feasible);
  auto res = to_canonical(inst, model, out.values, Rat(3, 5), Rat(1, 10));
  CHECK(res.ci.w.empty());
}

TEST_CASE("claim bounds: incoming at most 1.1, outgoing at most 1.1p") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams gp;
    gp.machines = 5;
    gp.heavy = 2;
    gp.light = 7;
    gp.eps = Rat(1, 4);
    gp.elig_min = 1;
    gp.elig_max = 3;
    gp.seed = seed + 400;
    Instance inst = gen_random(gp);
    auto model = build_lp(inst, Rat(3, 5), Rat(1, 10));
    auto out = solve_feasibility(model);
    if (out.status != SolveStatus::Feasible) continue;
    auto res = to_canonical(inst, model, out.values, Rat(3, 5), Rat(1, 10));
    int m = res.ci.num_machines();
    for (int h = 0; h < m; ++h) {
      Rat in(0), outm(0);
      for (const auto& [key, load] : res.ci.w) {
        if (key.second == h) in += load;
        if (key.first == h) outm += load;
      }
      CHECK(in <= Rat(11, 10));
      CHECK(outm <= Rat(11, 10) * res.ci.p);
    }
  }
}

TEST_CASE("check_canonical: hand-built violations are reported") {
  CanonicalInstance ci;
  ci.machine_ids = {0, 1};
  ci.groups = {{0}};
  ci.z = {Rat(1, 8), Rat(0)};
  ci.w[{1, 0}] = Rat(1, 16);
  SUBCASE("z below 1/p") {
    auto rep = check_canonical(ci, Rat(4), Rat(8), Rat(0));
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& s : rep.issues)
      if (s.find("below 1/p") != std::string::npos) found = true;
    CHECK(found);
  }
  SUBCASE("w below 1/q") {
    auto rep = check_canonical(ci, Rat(8), Rat(8), Rat(0));
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& s : rep.issues)
      if (s.find("below 1/q") != std::string::npos) found = true;
    CHECK(found);
  }
  SUBCASE("overlapping groups violate disjointness") {
    ci.groups = {{0}, {0}};
    auto rep = check_canonical(ci, Rat(8), Rat(16), Rat(0));
    bool found = false;
    for (const auto& s : rep.issues)
      if (s.find("appears in groups") != std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("lift_assignment: no heavies, no permanents, lights verbatim") {
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1};
  inst.light = {{5, {0}}, {6, {0}}};
  CanonicalInstance ci;
  ci.machine_ids = {0, 1};
  ci.z = {Rat(0), Rat(0)};
  ci.w[{0, 0}] = Rat(1, 2);
  Lift lift;
  lift.z_scale = Rat(2, 5);
  lift.type_jobs[{0, 0}] = {5, 6};
  IntegralPlacement units;
  units.units[{0, 0}] = {2, 0};
  HeavyAssignment f;
  auto sched = lift_assignment(inst, ci, lift, f, units);
  CHECK(sched.assignment.at(5) == 0);
  CHECK(sched.assignment.at(6) == 0);
  CHECK(makespan(inst, sched) == Rat(1, 2));
}

TEST_CASE("lift_assignment: leaf choice flips the root-to-leaf path") {
  // tree: root job 0 -> machine 0 -> job 1 -> machines {1, 2} (leaves)
  Instance inst;
  inst.eps = Rat(1, 4);
  inst.machines = {0, 1, 2};
  inst.heavy = {{0, {0}}, {1, {0, 1, 2}}};
  CanonicalInstance ci;
  ci.machine_ids = {0, 1, 2};
  ci.groups = {{0}, {1, 2}};
  ci.z = {Rat(2, 5), Rat(1, 5), Rat(1, 5)};
  ci.p = Rat(5);
  ci.q = Rat(4);
  Lift lift;
  lift.z_scale = Rat(2, 5);
  HeavyTree tree;
  tree.job_ids = {0, 1};
  tree.machines = {0, 1, 2};
  tree.job_parent = {-1, 0};       // job 1 hangs under machine 0
  tree.machine_parent = {0, 1, 1}; // machines' parent jobs
  tree.leaf_machines = {1, 2};
  lift.trees.push_back(tree);
  lift.origins.push_back({GroupOrigin::Kind::TreeSingleton, 0, 0, -1});
  lift.origins.push_back({GroupOrigin::Kind::TreeLeafSet, 0, -1, -1});

  SUBCASE("leaf 1 selected: root stays above, job 1 slides to the leaf") {
    HeavyAssignment f{{0, 1}};
    auto sched = lift_assignment(inst, ci, lift, f, IntegralPlacement{});
    CHECK(sched.assignment.at(0) == 0);
    CHECK(sched.assignment.at(1) == 1);
  }
  SUBCASE("leaf 2 selected") {
    HeavyAssignment f{{0, 2}};
    auto sched = lift_assignment(inst, ci, lift, f, IntegralPlacement{});
    CHECK(sched.assignment.at(0) == 0);
    CHECK(sched.assignment.at(1) == 2);
  }
  SUBCASE("assignment outside the group is rejected") {
    HeavyAssignment f{{0, 0}};
    CHECK_THROWS_AS(lift_assignment(inst, ci, lift, f, IntegralPlacement{}),
                    std::invalid_argument);
  }
}

TEST_CASE("canonical instances round-trip through their document format") {
  std::optional<std::pair<Instance, ExactSolution>> fx;
  for (uint64_t seed = 1; seed <= 20 && !fx; ++seed)
    fx = feasible_fixture(seed, 5, 2, 5, Rat(1, 3));
  REQUIRE(fx.has_value());
  auto res = to_canonical_exact(fx->first, fx->second, Rat(3, 5), Rat(1, 10));
  auto text = canonical_to_json(res.ci);
  auto back = canonical_from_json(text);
  CHECK(back.machine_ids == res.ci.machine_ids);
  CHECK(back.groups == res.ci.groups);
  CHECK(back.w == res.ci.w);
  CHECK(back.z == res.ci.z);
  CHECK(back.p == res.ci.p);
  CHECK(back.q == res.ci.q);
  CHECK(back.theta == res.ci.theta);
}

TEST_CASE("end-to-end lift stays within the certified bound") {
  int ran = 0;
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    GenParams gp;
    gp.machines = 5;
    gp.heavy = 2;
    gp.light = 6;
    gp.eps = Rat(1, 4);
    gp.elig_min = 1;
    gp.elig_max = 3;
    gp.seed = seed + 50;
    Instance inst = gen_random(gp);
    Rat rho(3, 5), delta(1, 10);
    auto model = build_lp(inst, rho, delta);
    auto out = solve_feasibility(model);
    if (out.status != SolveStatus::Feasible) continue;
    auto res = to_canonical(inst, model, out.values, rho, delta);
    auto f = testutil::random_assignment(res.ci, seed);
    // find a goodness level this assignment certifies
    Rat level(-100);
    for (Rat d : {Rat(1, 10), Rat(1, 20), Rat(0), Rat(-1)})
      if (is_delta_good(res.ci, f, d).first) {
        level = d;
        break;
      }
    if (level == Rat(-100)) continue;
    ++ran;
    auto [good, placement] = is_delta_good(res.ci, f, level);
    REQUIRE(good);
    auto units = integral_light_assignment(res.ci, f, placement, inst.eps);
    auto sched = lift_assignment(inst, res.ci, res.lift, f, units);
    CHECK(validate_schedule(inst, sched).ok());
    CHECK(makespan(inst, sched) <= Rat(2) - level + Rat(2) * inst.eps);
  }
  CHECK(ran >= 8);
}
