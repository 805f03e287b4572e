#pragma once

#include <map>
#include <string>
#include <vector>

#include "resched/canonical_types.hpp"
#include "resched/errors.hpp"
#include "resched/goodness.hpp"
#include "resched/rng.hpp"

namespace resched {

struct CoarsenConfig {
  Rat q0{100};                 // stop once both parameters reach this level
  int s_max = 0;               // core-witness size cap; 0 = ceil(2 ln m / ln q)
  long long mt_max_resamples = 10000;
  Rat delta_track{1, 20};      // goodness level whose witnesses are tracked
  long long enumeration_budget = 200000;
};

struct BadEventRecord {
  std::string kind;   // "load" | "witness" | "coverage"
  std::string scope;  // machine / witness / group id
  double prob_bound = 1.0;
  double x_weight = 0.5;
};

struct CoarsenStepTrace {
  std::string op;  // "reduce-q" or "reduce-p"
  Rat p_before, q_before, theta_before;
  Rat theta_step;   // dyadic snap of 8*sqrt(ln x / x), rounded down
  Rat delta_step;   // reduce-q only (same magnitude as theta_step)
  int randomized_entries = 0;
  long long resamples = 0;
  std::vector<BadEventRecord> events;
  std::map<std::string, long long> resample_tally;
};

struct ReduceResult {
  CanonicalInstance ci;
  CoarsenStepTrace trace;
};

// Halves q: every light load below 2/q is raised to 2/q with probability
// q*w/2 (else dropped), resampling until the per-machine load cap holds at
// theta + 8*sqrt(ln q/q) and every tracked core witness at `delta_track`
// survives as a witness at delta_track + the same step.
ReduceResult reduce_q(const CanonicalInstance& ci, Rng& rng,
                      const CoarsenConfig& cfg, const Rat& delta_track);

// Halves p: every heavy mass below 2/p is raised to 2/p with probability
// p*z/2 (else dropped); machines that lose their mass leave their group and
// their incoming light types collapse onto the diagonal. Goodness is
// z-independent, so no witnesses need tracking.
ReduceResult reduce_p(const CanonicalInstance& ci, Rng& rng,
                      const CoarsenConfig& cfg);

// All connected witnesses (S,T) with |S| <= s_max at level delta, one
// minimal-|T| representative per S, enumerated by rooted expansion over the
// light load graph. Throws BudgetError past the node budget.
std::vector<Witness> enumerate_core_witnesses(const CanonicalInstance& ci,
                                              const Rat& delta, int s_max,
                                              long long budget = 200000);

struct CoarsenReport {
  Rat theta_added{0};
  Rat delta_loss{0};
  std::vector<CoarsenStepTrace> traces;
};

// Alternates reduce_q / reduce_p until both parameters are at most q0,
// then reports the instance as (q0, q0, theta)-canonical together with the
// accumulated theta increase and goodness loss.
std::pair<CanonicalInstance, CoarsenReport> coarsen_pipeline(
    const CanonicalInstance& ci, const CoarsenConfig& cfg, Rng& rng);

int default_core_size_cap(int num_machines, double q);

}  // namespace resched
