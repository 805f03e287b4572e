#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resched/rng.hpp"

namespace resched::lll {

enum class Tail { Upper, UpperSmall, Lower };

// Tail bounds for a sum of independent variables in [0,K] with mean mu:
//   Upper      (lambda >= 7):   Pr[Z >= lambda*mu]     <= exp(-lambda*mu/K)
//   UpperSmall (0 < lambda < 1): Pr[Z >= (1+lambda)*mu] <= exp(-lambda^2*mu/(3K))
//   Lower      (0 < lambda < 1): Pr[Z <= (1-lambda)*mu] <= exp(-lambda^2*mu/(2K))
// Throws std::invalid_argument when lambda lies outside the form's range.
double chernoff_bound(double mu, double K, double lambda, Tail tail);

// Integer-valued random variables with caller-provided resample draws.
struct Variable {
  std::function<long long(Rng&)> sample;
  int group = -1;  // optional dependency refinement label; -1 = own group
};

using Assignment = std::vector<long long>;

struct Event {
  int id = 0;
  std::vector<int> scope;  // variable indices
  std::function<bool(const Assignment&)> occurs;
  double prob_bound = 1.0;
  double x_weight = 0.5;
  std::string label;
};

// Detector for an event family too large to materialize: returns at most
// one violated representative per scan.
using Detector = std::function<std::optional<Event>(const Assignment&)>;

struct EventSystem {
  std::vector<Variable> variables;
  std::vector<Event> events;
  std::vector<Detector> detectors;
};

struct CheckResult {
  bool ok = true;
  std::vector<double> slack;  // per event: x*prod(1-x_dep) - Pr^(1-eps)
};

// Verifies Pr[E]^(1-eps) <= x(E) * prod over dependent events of (1-x);
// events are dependent when their scopes share a variable group.
CheckResult lll_condition_check(const EventSystem& sys, double eps = 0.0);

struct MtPolicy {
  double p_core = 0.0;          // explicit events below this bound are ignored
  long long max_resamples = 100000;
};

struct MtResult {
  bool ok = false;
  Assignment assignment;
  long long resamples = 0;
  std::map<std::string, long long> resamples_by_event;
  std::string detail;
};

// Moser-Tardos resampling: sample every variable, then repeatedly pick the
// lowest-id violated core event (explicit events first, then detectors in
// order) and redraw the variables in its scope. Deterministic for a fixed
// seed and scan order.
MtResult moser_tardos(const EventSystem& sys, Rng& rng,
                      const MtPolicy& policy = {});

// Golden-test fixture format: variables draw uniformly from
// {0..outcomes-1}; events are linear thresholds over their scope,
// occurring when sum(coeff * value) > threshold.
//   {"variables":[{"outcomes":2,"group":0}, ...],
//    "events":[{"id":0,"scope":[0,1],"coeffs":[1,1],"threshold":1,
//               "bound":0.25,"x":0.5,"label":"..."}]}
EventSystem system_from_fixture(const std::string& json_text);

}  // namespace resched::lll
