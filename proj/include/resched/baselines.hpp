#pragma once

#include <map>
#include <optional>
#include <vector>

#include "resched/instance.hpp"
#include "resched/rational.hpp"

namespace resched {

// Generalized assignment data for the rounding step: items carry a
// per-group load; pairs absent from `load` are excluded (infinite cost).
struct GapInstance {
  int num_items = 0;
  int num_groups = 0;
  std::map<std::pair<int, int>, Rat> load;  // (item, group) -> load
  std::vector<Rat> capacity;                // per-group fractional budget
};

using GapFractional = std::map<std::pair<int, int>, Rat>;

// Rounds a feasible fractional assignment to an integral one whose
// per-group load exceeds the fractional budget by at most the largest
// eligible item load on that group (extreme-point / pseudoforest rounding).
std::vector<int> lst_round(const GapInstance& gap, const GapFractional& frac);

// Slot-matching baseline: floor(T) heavy slots per machine take any
// eligible job, floor(T/eps)-floor(T) light slots take light jobs only.
// Returns a schedule when a perfect matching covers all jobs.
std::optional<Schedule> matching_baseline(const Instance& inst, const Rat& T);

struct BaselineResult {
  Schedule schedule;
  Rat t_used;
};

// Searches the finite candidate set {a + b*eps} for the smallest feasible
// T; the returned schedule has makespan at most (2-eps) times the optimum.
BaselineResult matching_baseline_auto(const Instance& inst);

struct BruteForceResult {
  Rat opt;
  Schedule schedule;
};

// Exact optimum by branch and bound over heavy placements with flow-based
// optimal light completion at every leaf. Guarded by machine/job budgets.
BruteForceResult brute_force_opt(const Instance& inst, int max_machines = 10,
                                 int max_jobs = 14,
                                 long long max_leaves = 2000000);

// Pipeline fallback: find the smallest candidate T whose assignment LP is
// feasible, then round it; the makespan is at most T + 1.
struct LstScheduleResult {
  Schedule schedule;
  Rat t_used;
};

LstScheduleResult lst_schedule(const Instance& inst);

// All loads a schedule can attain: {a + b*eps}. Sorted ascending.
std::vector<Rat> candidate_makespans(const Instance& inst);

}  // namespace resched
