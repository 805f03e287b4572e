#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "resched/canonical.hpp"
#include "resched/coarsen.hpp"
#include "resched/finalround.hpp"
#include "resched/instance.hpp"

namespace resched {

struct SolveOptions {
  Rat rho{3, 5};
  Rat delta{1, 100};
  Rat q0{100};
  FinalConstants constants;
  CoarsenConfig coarsen;
  uint64_t seed = 0;
};

// Goodness bookkeeping: the final-round certificate minus the rescale
// surcharge and the coarsening loss, plus the light-rounding overhead the
// lifted schedule pays on top.
struct DeltaLedger {
  double mt_goodness = 0.0;       // delta*delta0 / (2 c1 ln q)
  double theta_surcharge = 0.0;   // 4 theta
  double coarsen_loss = 0.0;      // sum of per-halving goodness steps
  double final_goodness = 0.0;    // mt - surcharge - coarsen
  Rat final_goodness_rat{0};
  Rat lift_overhead{0};           // 2 * eps
};

struct SolveResult {
  enum class Path { Pipeline, Fallback } path = Path::Pipeline;
  Schedule schedule;
  Rat makespan{0};
  DeltaLedger ledger;
  bool verified_schedule = false;
  bool verified_good = false;   // is_delta_good at the final goodness level
  bool verified_bound = false;  // makespan <= 2 - delta + 2 eps
  Rat bound{0};
  Rat fallback_t{0};            // fallback path: level used (makespan <= T+1)
  long long resamples = 0;
  std::map<std::string, long long> event_tally;
  std::string detail;
  CanonicalInstance canonical;  // the pre-coarsening canonical form
  double delta_report = 0.0;    // final-round certificate
  std::vector<CoarsenStepTrace> coarsen_traces;
};

// End-to-end solve: relaxation, canonical reduction, coarsening, final
// rounding, lift. When the relaxation is infeasible at (rho, delta), falls
// back to assignment-LP rounding with the T+1 guarantee.
SolveResult solve_instance(const Instance& inst, const SolveOptions& opts);

// One row per (family instance, seed); deterministic given the config.
std::string run_experiment_csv(const std::string& config_json);

}  // namespace resched
