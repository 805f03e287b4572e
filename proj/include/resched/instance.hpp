#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "resched/rational.hpp"

namespace resched {

// A two-size restricted assignment instance: every heavy job has load 1,
// every light job has load eps, and each job may only run on machines in
// its eligibility set.
struct JobRec {
  long long id = 0;
  std::vector<long long> eligible;  // machine ids
};

struct Instance {
  Rat eps{1, 2};
  std::vector<long long> machines;  // ids, order defines the machine index
  std::vector<JobRec> heavy;
  std::vector<JobRec> light;

  std::unordered_map<long long, int> machine_index() const;
  long long total_jobs() const {
    return static_cast<long long>(heavy.size() + light.size());
  }
};

struct Schedule {
  std::map<long long, long long> assignment;  // job id -> machine id
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  std::string joined() const;
};

ValidationReport validate_instance(const Instance& inst);

// Maximum machine load; throws std::invalid_argument naming the offending
// job if the schedule is not a valid total assignment.
Rat makespan(const Instance& inst, const Schedule& sched);

// Checks the schedule without computing the load.
ValidationReport validate_schedule(const Instance& inst, const Schedule& sched);

struct GenParams {
  int machines = 1;
  int heavy = 0;
  int light = 0;
  Rat eps{1, 2};
  int elig_min = 1;  // eligibility set sizes drawn uniformly from [min,max]
  int elig_max = 1;
  uint64_t seed = 0;
};

Instance gen_random(const GenParams& params);

struct UndirectedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// Hardness family: one machine per vertex, n-K heavy jobs eligible
// everywhere, and per edge a bundle of 1/(3*eps) light jobs eligible on the
// edge's two endpoints. Requires 1/(3*eps) to be a positive integer.
Instance gen_vertex_cover(const UndirectedGraph& graph, int k, const Rat& eps);

// Random simple cubic graph via the pairing model (n even, n >= 4).
UndirectedGraph gen_random_cubic(int n, uint64_t seed);

// Exact minimum vertex cover size by subset enumeration (n <= 24 guard).
int min_vertex_cover_size(const UndirectedGraph& graph);

bool is_simple_graph(const UndirectedGraph& graph);

}  // namespace resched
