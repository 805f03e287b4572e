#pragma once

#include <map>
#include <optional>
#include <vector>

#include "resched/canonical_types.hpp"
#include "resched/goodness.hpp"
#include "resched/instance.hpp"
#include "resched/linprog.hpp"

namespace resched {

// Exact-rational LP point used throughout the reduction. Indexed by
// (job index, machine index) within the instance's heavy/light lists.
struct ExactSolution {
  std::map<std::pair<int, int>, Rat> x_heavy;
  std::map<std::pair<int, int>, Rat> x_light;
  std::vector<Rat> z;
};

// Converts a floating LP point into an exactly feasible rational one:
// values below 1e-12 are dropped, each remainder is snapped by continued
// fractions (denominator <= 1e12), per-job sums are restored onto the
// largest coordinate, and z is recomputed from the heavy balance. If the
// inequality rows then fail exactly, the LP is re-solved with shrunken
// right-hand sides (margin retry) and finally with the exact simplex.
ExactSolution snap_solution(const Instance& inst, const LpModel& model,
                            const std::vector<double>& values);

// Exact residual over the relaxation's rows for an ExactSolution.
Rat exact_solution_residual(const Instance& inst, const Rat& rho,
                            const Rat& delta, const ExactSolution& sol);

// Breaks every cycle of the machines/heavy-jobs support graph by rotating
// alternate edges; the support becomes a forest while every row of the
// relaxation keeps its exact value. Returns the number of rotations.
int rotate_heavy_cycles(const Instance& inst, ExactSolution& sol);

// Same for the light support, except edges with x + z = 1 (tight) are
// frozen; only the non-tight support becomes a forest.
int rotate_light_cycles(const Instance& inst, ExactSolution& sol);

// Provenance of one canonical group, enough to map a group assignment back
// to original heavy jobs.
struct GroupOrigin {
  enum class Kind { Trivial, TreeSingleton, TreeLeafSet } kind;
  int tree = -1;      // index into Lift::trees for tree-backed groups
  int machine = -1;   // the singleton machine (Trivial / TreeSingleton)
  long long job_id = -1;  // original heavy job (Trivial only)
};

// One residual tree of the heavy forest after the x<=1/2 parent-edge cuts:
// node 0 is the root job; jobs and machines alternate.
struct HeavyTree {
  std::vector<long long> job_ids;        // tree-local job index -> id
  std::vector<int> machines;             // tree-local machine index -> machine
  std::vector<int> job_parent;           // job -> tree-local machine (-1 root)
  std::vector<int> machine_parent;       // machine -> tree-local job
  std::vector<int> leaf_machines;        // tree-local machine indices
};

struct Lift {
  Rat z_scale;                                      // factor applied to z
  std::map<long long, long long> permanent_lights;  // light id -> machine id
  std::vector<HeavyTree> trees;
  std::vector<GroupOrigin> origins;                 // per canonical group
  std::map<std::pair<int, int>, std::vector<long long>> type_jobs;
  std::vector<std::pair<int, Rat>> removed_machines;  // z threshold log
};

struct HeavyDecomposition {
  std::vector<std::vector<int>> groups;
  std::vector<GroupOrigin> origins;
  std::vector<HeavyTree> trees;
};

// Splits the heavy forest into stars: drop every job->parent-machine edge
// with x <= 1/2, then emit one singleton group per non-leaf machine and one
// group holding the leaves of each residual tree. Requires a forest.
HeavyDecomposition decompose_heavy_forest(const Instance& inst,
                                          const ExactSolution& sol);

struct LightProcessing {
  std::map<std::pair<int, int>, Rat> w;
  std::map<std::pair<int, int>, std::vector<long long>> type_jobs;
  std::map<long long, long long> permanent_lights;  // light id -> machine id
};

// Types every remaining light job as owned by its tight machine (or wholly
// by a z=0 machine), permanently assigning the non-leaf jobs of the
// non-tight forest. Expects rotated light support and scaled z.
LightProcessing process_light_jobs(const Instance& inst,
                                   const ExactSolution& sol);

struct CanonicalResult {
  CanonicalInstance ci;
  Lift lift;
};

// Full reduction: rotations, star decomposition, z-scaling by (1-rho),
// light typing, and the z < rho*delta/m thresholding with group pruning and
// diagonal re-typing. Output passes check_canonical with
// p = m/(rho*delta), q = 1/eps, theta = rho*delta.
CanonicalResult to_canonical(const Instance& inst, const LpModel& model,
                             const std::vector<double>& values, const Rat& rho,
                             const Rat& delta);

CanonicalResult to_canonical_exact(const Instance& inst,
                                   const ExactSolution& sol, const Rat& rho,
                                   const Rat& delta);

// Maps a group assignment plus an integral light placement back onto the
// original instance.
Schedule lift_assignment(const Instance& inst, const CanonicalInstance& ci,
                         const Lift& lift, const HeavyAssignment& f,
                         const IntegralPlacement& lights);

}  // namespace resched
