#include "resched/lll.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace resched::lll {

double chernoff_bound(double mu, double K, double lambda, Tail tail) {
  if (!(mu >= 0)) throw std::invalid_argument("chernoff_bound: mu < 0");
  if (!(K > 0)) throw std::invalid_argument("chernoff_bound: K <= 0");
  switch (tail) {
    case Tail::Upper:
      if (!(lambda >= 7))
        throw std::invalid_argument("chernoff_bound: Upper needs lambda >= 7");
      return std::exp(-lambda * mu / K);
    case Tail::UpperSmall:
      if (!(lambda > 0 && lambda < 1))
        throw std::invalid_argument(
            "chernoff_bound: UpperSmall needs lambda in (0,1)");
      return std::exp(-lambda * lambda * mu / (3.0 * K));
    case Tail::Lower:
      if (!(lambda > 0 && lambda < 1))
        throw std::invalid_argument(
            "chernoff_bound: Lower needs lambda in (0,1)");
      return std::exp(-lambda * lambda * mu / (2.0 * K));
  }
  throw std::invalid_argument("chernoff_bound: unknown tail");
}

CheckResult lll_condition_check(const EventSystem& sys, double eps) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("lll_condition_check: eps must be in [0,1)");
  CheckResult res;
  auto group_of = [&](int var) {
    int g = sys.variables[var].group;
    // own-variable groups get distinct negative labels to avoid collisions
    return g >= 0 ? g : -(var + 1);
  };
  std::vector<std::set<int>> scope_groups(sys.events.size());
  for (size_t i = 0; i < sys.events.size(); ++i)
    for (int v : sys.events[i].scope) scope_groups[i].insert(group_of(v));

  res.slack.resize(sys.events.size());
  for (size_t i = 0; i < sys.events.size(); ++i) {
    const Event& ei = sys.events[i];
    if (!(ei.x_weight > 0 && ei.x_weight < 1))
      throw std::invalid_argument("lll_condition_check: x weight not in (0,1)");
    double log_prod = 0.0;
    for (size_t j = 0; j < sys.events.size(); ++j) {
      if (i == j) continue;
      bool dependent = false;
      for (int g : scope_groups[j])
        if (scope_groups[i].count(g)) {
          dependent = true;
          break;
        }
      if (dependent) log_prod += std::log1p(-sys.events[j].x_weight);
    }
    double rhs = ei.x_weight * std::exp(log_prod);
    double lhs = std::pow(ei.prob_bound, 1.0 - eps);
    res.slack[i] = rhs - lhs;
    if (lhs > rhs) res.ok = false;
  }
  return res;
}

MtResult moser_tardos(const EventSystem& sys, Rng& rng,
                      const MtPolicy& policy) {
  MtResult res;
  res.assignment.resize(sys.variables.size());
  for (size_t v = 0; v < sys.variables.size(); ++v)
    res.assignment[v] = sys.variables[v].sample(rng);

  std::vector<int> core;
  for (size_t i = 0; i < sys.events.size(); ++i)
    if (sys.events[i].prob_bound >= policy.p_core)
      core.push_back(static_cast<int>(i));
  std::sort(core.begin(), core.end(), [&](int a, int b) {
    return sys.events[a].id < sys.events[b].id;
  });

  while (true) {
    const Event* violated = nullptr;
    std::optional<Event> from_detector;
    for (int i : core)
      if (sys.events[i].occurs(res.assignment)) {
        violated = &sys.events[i];
        break;
      }
    if (!violated) {
      for (const auto& det : sys.detectors) {
        from_detector = det(res.assignment);
        if (from_detector) {
          violated = &*from_detector;
          break;
        }
      }
    }
    if (!violated) {
      res.ok = true;
      return res;
    }
    if (res.resamples >= policy.max_resamples) {
      res.ok = false;
      res.detail = "resample limit " + std::to_string(policy.max_resamples) +
                   " reached; last violated event: " + violated->label;
      return res;
    }
    ++res.resamples;
    ++res.resamples_by_event[violated->label];
    std::vector<int> scope = violated->scope;
    std::sort(scope.begin(), scope.end());
    for (int v : scope) res.assignment[v] = sys.variables[v].sample(rng);
  }
}

EventSystem system_from_fixture(const std::string& json_text) {
  auto doc = nlohmann::json::parse(json_text);
  EventSystem sys;
  for (const auto& v : doc.at("variables")) {
    Variable var;
    long long outcomes = v.value("outcomes", 2);
    if (outcomes < 1)
      throw std::invalid_argument("fixture: outcomes must be positive");
    var.sample = [outcomes](Rng& r) {
      return static_cast<long long>(r.below(outcomes));
    };
    var.group = v.value("group", -1);
    sys.variables.push_back(std::move(var));
  }
  for (const auto& e : doc.at("events")) {
    Event ev;
    ev.id = e.value("id", static_cast<int>(sys.events.size()));
    ev.scope = e.at("scope").get<std::vector<int>>();
    auto coeffs = e.at("coeffs").get<std::vector<long long>>();
    if (coeffs.size() != ev.scope.size())
      throw std::invalid_argument("fixture: scope/coeffs size mismatch");
    long long threshold = e.at("threshold").get<long long>();
    auto scope = ev.scope;
    ev.occurs = [scope, coeffs, threshold](const Assignment& a) {
      long long sum = 0;
      for (size_t i = 0; i < scope.size(); ++i)
        sum += coeffs[i] * a[scope[i]];
      return sum > threshold;
    };
    ev.prob_bound = e.value("bound", 1.0);
    ev.x_weight = e.value("x", 0.5);
    ev.label = e.value("label", "event " + std::to_string(ev.id));
    sys.events.push_back(std::move(ev));
  }
  return sys;
}

}  // namespace resched::lll
