#pragma once

#include <map>
#include <string>
#include <vector>

#include "resched/rational.hpp"

namespace resched {

// Canonical form of an instance: disjoint per-heavy-job machine groups, a
// pairwise light-load matrix w (w[h][k] = load owned by k that may overflow
// to h; diagonal entries live wholly on their machine), and the fractional
// heavy mass z per machine. Parameters: positive z values are at least 1/p,
// positive w entries at least 1/q, and per-machine fractional load is at
// most 1+theta while each group keeps mass at least 0.2-theta.
struct CanonicalInstance {
  std::vector<long long> machine_ids;              // index -> external id
  std::vector<std::vector<int>> groups;            // per heavy job, sorted
  std::map<std::pair<int, int>, Rat> w;            // (h,k) -> positive load
  std::vector<Rat> z;                              // per machine
  Rat p{1}, q{1}, theta{0};

  int num_machines() const { return static_cast<int>(machine_ids.size()); }
  int num_groups() const { return static_cast<int>(groups.size()); }

  Rat w_at(int h, int k) const {
    auto it = w.find({h, k});
    return it == w.end() ? Rat(0) : it->second;
  }

  // z_h + sum_k w[k][h]*(1-z_h) + sum_k w[h][k]*z_k
  Rat machine_load(int h) const;

  Rat group_mass(int g) const {
    Rat s(0);
    for (int i : groups[g]) s += z[i];
    return s;
  }
};

struct CanonicalValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Pure predicate over the seven structural properties at parameters
// (p, q, theta); lists every violation with machine/group ids.
CanonicalValidationReport check_canonical(const CanonicalInstance& ci,
                                          const Rat& p, const Rat& q,
                                          const Rat& theta);

}  // namespace resched
