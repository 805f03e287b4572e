#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "resched/canonical_types.hpp"
#include "resched/errors.hpp"
#include "resched/goodness.hpp"
#include "resched/rng.hpp"

namespace resched {

// Tunable constants of the final rounding round. The defaults are the
// published values; they make the certified goodness astronomically small
// for any tractable q, so experiments override them (and must then set
// allow_large_theta).
struct FinalConstants {
  double c1 = 12.0;
  double c2 = 300.0;
  double c3 = 200.0;
  double L_factor = 10.0;              // run length threshold = ceil(L_factor * ln q)
  std::optional<int> L_override;
  std::optional<double> delta0;        // default (34*c2*c3*ln q)^-1
  std::optional<double> delta;         // default (340*c2^2*c3*ln^3 q)^-1
  long long mt_max_resamples = 20000;
  bool allow_large_theta = false;
};

struct Classification {
  Rat q_effective;                     // parameter used in the log formulas
  Rat dense_threshold;                 // 1/(c2 ln q), dyadic-snapped
  Rat out_dense_threshold;             // 1/c3
  Rat load_event_threshold;            // c1 ln q
  Rat fanout_threshold;                // 17 c2 ln q
  Rat delta0, delta;                   // dyadic-snapped
  int run_length = 0;                  // L
  std::vector<char> red;               // strict: phi_h + z_h < delta0
  std::vector<char> in_dense, out_dense;
  std::set<std::pair<int, int>> dense_edges;      // off-diagonal support
  std::vector<std::pair<int, int>> red_edges;     // (source, target)
  std::vector<Rat> phi;
};

// Divides the light loads by (0.6+theta)/0.6 so the per-machine load cap
// holds with theta = 0; q grows by the same factor and later goodness
// reports pay the 4*theta surcharge when the loads scale back.
struct ThetaScaling {
  CanonicalInstance ci;
  Rat surcharge;  // 4 * theta
  Rat factor;     // 0.6 / (0.6 + theta)
};

ThetaScaling scale_theta_to_zero(const CanonicalInstance& ci);

Classification classify(const CanonicalInstance& ci,
                        const FinalConstants& constants);

// For every in-dense red machine, pick its lowest-id incoming dense edge
// and keep it when the source is red and out-sparse. Every machine ends
// with at most one incoming red edge.
std::vector<std::pair<int, int>> color_red_edges(const CanonicalInstance& ci,
                                                 const Classification& cls);

// Prunes each group so the surviving machines span no red cycle; removed
// mass per group stays within half the group mass plus one red z value.
std::vector<std::vector<int>> eliminate_red_cycles(const CanonicalInstance& ci,
                                                   const Classification& cls);

// One independent z-proportional draw per group.
HeavyAssignment sample_assignment(const CanonicalInstance& ci,
                                  const std::vector<std::vector<int>>& pruned,
                                  Rng& rng);

enum class BadEventKind { LoadExcess, RedRun, DenseFanout, SparseSpill };

const char* bad_event_name(BadEventKind kind);

struct BadEvent {
  BadEventKind kind;
  int machine = -1;              // LoadExcess / DenseFanout / SparseSpill
  std::vector<int> machines;     // RedRun: the oversized component
  std::vector<int> groups;       // resample scope
};

// Scans the four event families for a sampled assignment:
//   LoadExcess(h): sum of w[h][k] over selected red k exceeds c1 ln q;
//   RedRun: a red-edge component inside the selected red set reaches L;
//   DenseFanout(h): more than 17 c2 ln q selected red dense out-neighbors;
//   SparseSpill(h): in-sparse h collects more than 0.1 boundary load.
std::vector<BadEvent> detect_bad_events(const CanonicalInstance& ci,
                                        const Classification& cls,
                                        const HeavyAssignment& f);

struct FinalRoundResult {
  HeavyAssignment assignment;
  double delta_report = 0.0;   // delta*delta0/(2 c1 ln q) - 4 theta
  Rat delta_report_rat;        // dyadic-snapped (down)
  bool verified = false;       // is_delta_good at delta_report on the input
  LightPlacement placement;    // fractional placement from the verification
  long long resamples = 0;
  std::map<std::string, long long> event_tally;
  Classification classification;
  std::vector<std::vector<int>> pruned_groups;
};

// Full final phase: theta rescaling, classification, red preprocessing,
// then Moser-Tardos over the four event families until a sample avoids all
// of them. Throws NonTerminatedError past the resample budget.
FinalRoundResult final_round(const CanonicalInstance& ci, Rng& rng,
                             const FinalConstants& constants);

}  // namespace resched
