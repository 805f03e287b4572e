#pragma once

#include <map>
#include <optional>
#include <vector>

#include "resched/canonical_types.hpp"
#include "resched/rational.hpp"

namespace resched {

// Placement of one heavy job per group onto a machine of that group.
struct HeavyAssignment {
  std::vector<int> to_machine;  // per group index -> machine index

  std::vector<char> covered(int num_machines) const {
    std::vector<char> x(num_machines, 0);
    for (int m : to_machine) x[m] = 1;
    return x;
  }
};

// A pair (S,T), T inside S, whose joint heavy count and internal light load
// exceed the (2-delta)|S| budget; certifies that no assignment hitting all
// of T can be delta-good.
struct Witness {
  std::vector<int> S, T;  // machine indices, sorted
  Rat delta;
  Rat slack;  // |T| + w(S,S) - (2-delta)|S| > 0
  bool connected = false;
};

struct FlowNetwork {
  struct Arc {
    int from, to;
    Rat cap;
  };
  int num_nodes = 0;
  int source = 0, sink = 0;
  std::vector<Arc> arcs;
};

struct MaxFlowResult {
  Rat value;
  std::vector<Rat> flow;  // per arc
};

// Edmonds-Karp over exact rationals; conservation and capacity residuals
// are identically zero.
MaxFlowResult max_flow(const FlowNetwork& net);

// Fractional split of each light-load type between its two machines.
struct LightPlacement {
  std::map<std::pair<int, int>, std::pair<Rat, Rat>> onto;  // type -> (to h, to k)

  Rat machine_load(int machine, int num_machines) const;
};

// Flow characterization of delta-goodness: one supply node per positive
// light-load type, machine capacity (1 if uncovered else 0) + 1 - delta.
// Returns the feasibility verdict plus the flow decomposition (a complete
// placement when good, a maximal one otherwise).
std::pair<bool, LightPlacement> is_delta_good(const CanonicalInstance& ci,
                                              const HeavyAssignment& f,
                                              const Rat& delta);

// Subset-enumeration oracle for the same predicate; returns the
// maximum-slack witness when the assignment is not delta-good.
// Guarded to at most 25 machines.
std::pair<bool, std::optional<Witness>> delta_good_bruteforce(
    const CanonicalInstance& ci, const HeavyAssignment& f, const Rat& delta);

struct SubsetStats {
  Rat w_ss;    // internal light load
  Rat bnd;     // boundary load crossing S
  Rat phi;     // total deficiency
  Rat z_sum;   // heavy mass
};

// Aggregates satisfying phi(S) + z(S) + w(S,S) + bnd(S) = |S| exactly.
SubsetStats subset_stats(const CanonicalInstance& ci,
                         const std::vector<int>& s);

Rat deficiency(const CanonicalInstance& ci, int machine);

// Integral unit counts per type after rounding a fractional placement on
// the unit-granular network; per-machine load grows by less than one unit.
struct IntegralPlacement {
  std::map<std::pair<int, int>, std::pair<long long, long long>> units;
};

IntegralPlacement integral_light_assignment(const CanonicalInstance& ci,
                                            const HeavyAssignment& f,
                                            const LightPlacement& placement,
                                            const Rat& unit);

bool weakly_connected_in_light_graph(const CanonicalInstance& ci,
                                     const std::vector<int>& s);

}  // namespace resched
