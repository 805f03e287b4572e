#include "resched/coarsen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "resched/lll.hpp"

namespace resched {

int default_core_size_cap(int num_machines, double q) {
  if (num_machines <= 1 || q <= 1.0) return 1;
  int cap = static_cast<int>(
      std::ceil(2.0 * std::log(static_cast<double>(num_machines)) /
                std::log(q)));
  return std::max(cap, 1);
}

std::vector<Witness> enumerate_core_witnesses(const CanonicalInstance& ci,
                                              const Rat& delta, int s_max,
                                              long long budget) {
  if (s_max < 1)
    throw std::invalid_argument("enumerate_core_witnesses: s_max must be >= 1");
  int m = ci.num_machines();
  std::vector<std::set<int>> nbr(m);
  for (const auto& [key, load] : ci.w) {
    (void)load;
    auto [h, k] = key;
    if (h == k) continue;
    nbr[h].insert(k);
    nbr[k].insert(h);
  }

  std::vector<Witness> out;
  long long visited = 0;
  Rat two_minus_delta = Rat(2) - delta;

  auto emit = [&](const std::vector<int>& s) {
    Rat wss(0);
    std::vector<char> in_s(m, 0);
    for (int i : s) in_s[i] = 1;
    for (const auto& [key, load] : ci.w)
      if (in_s[key.first] && in_s[key.second]) wss += load;
    Rat need = two_minus_delta * Rat(static_cast<long long>(s.size())) - wss;
    long long t_min = need.sign() < 0 ? 0 : need.floor() + 1;
    if (t_min > static_cast<long long>(s.size())) return;
    Witness w;
    w.S = s;
    std::sort(w.S.begin(), w.S.end());
    w.T.assign(w.S.begin(), w.S.begin() + t_min);
    w.delta = delta;
    w.slack = Rat(t_min) + wss - two_minus_delta * Rat(static_cast<long long>(s.size()));
    w.connected = true;
    out.push_back(std::move(w));
  };

  // rooted expansion: every connected set is generated once, from its
  // minimum vertex, extending only with larger vertices
  std::vector<int> s;
  std::function<void(int, std::vector<int>&)> extend =
      [&](int root, std::vector<int>& ext) {
        if (++visited > budget)
          throw BudgetError(
              "enumerate_core_witnesses: budget exhausted after " +
                  std::to_string(out.size()) + " witnesses",
              static_cast<long long>(out.size()));
        emit(s);
        if (static_cast<int>(s.size()) == s_max) return;
        std::vector<int> local = ext;
        while (!local.empty()) {
          int u = local.front();
          local.erase(local.begin());
          std::vector<int> next = local;
          std::set<int> known(s.begin(), s.end());
          for (int i : s)
            for (int v : nbr[i]) known.insert(v);
          for (int v : nbr[u])
            if (v > root && !known.count(v)) next.push_back(v);
          std::sort(next.begin(), next.end());
          next.erase(std::unique(next.begin(), next.end()), next.end());
          s.push_back(u);
          extend(root, next);
          s.pop_back();
        }
      };
  for (int v = 0; v < m; ++v) {
    s = {v};
    std::vector<int> ext;
    for (int u : nbr[v])
      if (u > v) ext.push_back(u);
    std::sort(ext.begin(), ext.end());
    extend(v, ext);
  }
  return out;
}

namespace {

struct RandomizedRounding {
  std::vector<std::pair<int, int>> keys;  // randomized entry keys
  std::map<std::pair<int, int>, int> var_of;
  std::vector<Rat> raise_prob;
  Rat raised_value;
};

// Shared Moser-Tardos wiring for the two reductions: variables are 0/1
// indicators, 1 meaning the entry is raised to `raised_value`.
lll::EventSystem make_system(const RandomizedRounding& rr) {
  lll::EventSystem sys;
  sys.variables.resize(rr.keys.size());
  for (size_t v = 0; v < rr.keys.size(); ++v) {
    Rat prob = rr.raise_prob[v];
    if (prob > Rat(1)) prob = Rat(1);
    sys.variables[v].sample = [prob](Rng& r) {
      return static_cast<long long>(r.bernoulli(prob) ? 1 : 0);
    };
  }
  return sys;
}

std::string scope_string(const std::vector<int>& scope) {
  std::ostringstream os;
  for (size_t i = 0; i < scope.size() && i < 8; ++i) os << (i ? "," : "") << scope[i];
  if (scope.size() > 8) os << ",...";
  return os.str();
}

}  // namespace

ReduceResult reduce_q(const CanonicalInstance& ci, Rng& rng,
                      const CoarsenConfig& cfg, const Rat& delta_track) {
  if (!(ci.q >= rat_max(ci.p, cfg.q0)))
    throw std::invalid_argument("reduce_q: requires q >= max(p, q0)");
  double qd = ci.q.to_double();
  Rat theta_step = Rat::quantize(8.0 * std::sqrt(std::log(qd) / qd));
  Rat theta_after = ci.theta + theta_step;
  Rat delta_after = delta_track + theta_step;
  Rat threshold = Rat(2) / ci.q;  // = 1/q'

  ReduceResult res;
  res.trace.op = "reduce-q";
  res.trace.p_before = ci.p;
  res.trace.q_before = ci.q;
  res.trace.theta_before = ci.theta;
  res.trace.theta_step = theta_step;
  res.trace.delta_step = theta_step;

  RandomizedRounding rr;
  rr.raised_value = threshold;
  for (const auto& [key, load] : ci.w)
    if (load < threshold) {
      rr.var_of[key] = static_cast<int>(rr.keys.size());
      rr.keys.push_back(key);
      rr.raise_prob.push_back(load / threshold);
    }
  res.trace.randomized_entries = static_cast<int>(rr.keys.size());

  auto sys = make_system(rr);
  double qprime = qd / 2.0;
  double load_bound =
      std::min(1.0, std::exp(-theta_step.to_double() * theta_step.to_double() *
                             qprime / 3.3));
  double x_load = std::max(1e-300, std::min(0.5, std::pow(qd, -7.0)));

  // per-machine load events over the randomized entries
  int m = ci.num_machines();
  int next_id = 0;
  for (int h = 0; h < m; ++h) {
    Rat fixed = ci.z[h];
    Rat one_minus_zh = Rat(1) - ci.z[h];
    std::vector<std::pair<int, Rat>> terms;  // (var, coefficient)
    for (const auto& [key, load] : ci.w) {
      Rat coef(0);
      if (key.second == h) coef += one_minus_zh;
      if (key.first == h) coef += ci.z[key.second];
      if (coef.sign() == 0) continue;
      auto it = rr.var_of.find(key);
      if (it == rr.var_of.end())
        fixed += load * coef;
      else
        terms.push_back({it->second, threshold * coef});
    }
    if (terms.empty()) continue;
    lll::Event ev;
    ev.id = next_id++;
    for (auto& [v, c] : terms) ev.scope.push_back(v);
    ev.label = "load m" + std::to_string(h);
    ev.prob_bound = load_bound;
    ev.x_weight = x_load;
    Rat cap = Rat(1) + theta_after;
    ev.occurs = [fixed, terms, cap](const lll::Assignment& a) {
      Rat total = fixed;
      for (const auto& [v, c] : terms)
        if (a[v]) total += c;
      return total > cap;
    };
    res.trace.events.push_back(
        {"load", std::to_string(h), load_bound, x_load});
    sys.events.push_back(std::move(ev));
  }

  // witness-survival events for the tracked core set
  int s_cap = cfg.s_max > 0 ? cfg.s_max
                            : default_core_size_cap(m, qd);
  auto witnesses =
      enumerate_core_witnesses(ci, delta_track, s_cap, cfg.enumeration_budget);
  for (const auto& wit : witnesses) {
    std::vector<char> in_s(m, 0);
    for (int i : wit.S) in_s[i] = 1;
    Rat fixed(0);
    std::vector<int> vars;
    for (const auto& [key, load] : ci.w) {
      if (!in_s[key.first] || !in_s[key.second]) continue;
      auto it = rr.var_of.find(key);
      if (it == rr.var_of.end())
        fixed += load;
      else
        vars.push_back(it->second);
    }
    if (vars.empty()) continue;  // survival is unconditional
    Rat floor_val =
        (Rat(2) - delta_after) * Rat(static_cast<long long>(wit.S.size())) -
        Rat(static_cast<long long>(wit.T.size()));
    double bound = std::min(
        1.0, std::exp(-theta_step.to_double() * theta_step.to_double() *
                      qprime * static_cast<double>(wit.S.size()) / 4.0));
    double x_wit = std::max(
        1e-300,
        std::min(0.5, std::pow(qd, -7.0 * static_cast<double>(wit.S.size()))));
    lll::Event ev;
    ev.id = next_id++;
    ev.scope = vars;
    ev.label = "witness " + scope_string(wit.S);
    ev.prob_bound = bound;
    ev.x_weight = x_wit;
    Rat thr = threshold;
    ev.occurs = [fixed, vars, floor_val, thr](const lll::Assignment& a) {
      Rat wss = fixed;
      for (int v : vars)
        if (a[v]) wss += thr;
      return !(wss > floor_val);  // no longer a witness at the new level
    };
    res.trace.events.push_back(
        {"witness", scope_string(wit.S), bound, x_wit});
    sys.events.push_back(std::move(ev));
  }

  lll::MtPolicy policy;
  policy.max_resamples = cfg.mt_max_resamples;
  auto mt = lll::moser_tardos(sys, rng, policy);
  res.trace.resamples = mt.resamples;
  res.trace.resample_tally = mt.resamples_by_event;
  if (!mt.ok)
    throw NonTerminatedError("reduce_q: " + mt.detail);

  res.ci = ci;
  res.ci.q = ci.q / Rat(2);
  res.ci.theta = theta_after;
  for (size_t v = 0; v < rr.keys.size(); ++v) {
    if (mt.assignment[v])
      res.ci.w[rr.keys[v]] = threshold;
    else
      res.ci.w.erase(rr.keys[v]);
  }
  return res;
}

ReduceResult reduce_p(const CanonicalInstance& ci, Rng& rng,
                      const CoarsenConfig& cfg) {
  if (!(ci.p >= rat_max(ci.q, cfg.q0)))
    throw std::invalid_argument("reduce_p: requires p >= max(q, q0)");
  double pd = ci.p.to_double();
  Rat theta_step = Rat::quantize(8.0 * std::sqrt(std::log(pd) / pd));
  Rat theta_after = ci.theta + theta_step;
  Rat threshold = Rat(2) / ci.p;  // = 1/p'

  ReduceResult res;
  res.trace.op = "reduce-p";
  res.trace.p_before = ci.p;
  res.trace.q_before = ci.q;
  res.trace.theta_before = ci.theta;
  res.trace.theta_step = theta_step;

  RandomizedRounding rr;
  rr.raised_value = threshold;
  int m = ci.num_machines();
  std::vector<int> var_of_machine(m, -1);
  for (int i = 0; i < m; ++i)
    if (ci.z[i].sign() > 0 && ci.z[i] < threshold) {
      var_of_machine[i] = static_cast<int>(rr.keys.size());
      rr.var_of[{i, i}] = var_of_machine[i];
      rr.keys.push_back({i, i});
      rr.raise_prob.push_back(ci.z[i] / threshold);
    }
  res.trace.randomized_entries = static_cast<int>(rr.keys.size());

  auto sys = make_system(rr);
  double pprime = pd / 2.0;
  double bound = std::min(
      1.0, std::exp(-theta_step.to_double() * theta_step.to_double() *
                    pprime / 4.0));
  double x_w = std::max(1e-300, std::min(0.5, std::pow(pd, -7.0)));
  int next_id = 0;

  // load events: z'_h + w(M,h)(1 - z'_h) + sum_k w(h,k) z'_k > 1 + theta'
  for (int h = 0; h < m; ++h) {
    Rat w_in(0);
    std::vector<std::pair<int, Rat>> terms;
    Rat fixed(0);
    for (const auto& [key, load] : ci.w) {
      if (key.second == h) w_in += load;
      if (key.first == h) {
        int k = key.second;
        if (var_of_machine[k] >= 0 && k != h)
          terms.push_back({var_of_machine[k], load * threshold});
        else if (k != h)
          fixed += load * ci.z[k];
        // diagonal handled through w_in (z_h = 0 whenever w[h][h] > 0)
      }
    }
    bool h_random = var_of_machine[h] >= 0;
    if (terms.empty() && !h_random) continue;
    lll::Event ev;
    ev.id = next_id++;
    for (auto& [v, c] : terms) ev.scope.push_back(v);
    if (h_random) ev.scope.push_back(var_of_machine[h]);
    std::sort(ev.scope.begin(), ev.scope.end());
    ev.scope.erase(std::unique(ev.scope.begin(), ev.scope.end()),
                   ev.scope.end());
    ev.label = "load m" + std::to_string(h);
    ev.prob_bound = bound;
    ev.x_weight = x_w;
    Rat cap = Rat(1) + theta_after;
    Rat zh_fixed = ci.z[h];
    int h_var = var_of_machine[h];
    Rat raised = threshold;
    ev.occurs = [fixed, terms, cap, w_in, zh_fixed, h_var, raised](
                    const lll::Assignment& a) {
      Rat zh = h_var >= 0 ? (a[h_var] ? raised : Rat(0)) : zh_fixed;
      Rat total = zh + w_in * (Rat(1) - zh) + fixed;
      for (const auto& [v, c] : terms)
        if (a[v]) total += c;
      return total > cap;
    };
    res.trace.events.push_back({"load", std::to_string(h), bound, x_w});
    sys.events.push_back(std::move(ev));
  }
  // group-coverage events: sum of z' over the group < 0.2 - theta'
  for (int g = 0; g < ci.num_groups(); ++g) {
    Rat fixed(0);
    std::vector<int> vars;
    for (int i : ci.groups[g]) {
      if (var_of_machine[i] >= 0)
        vars.push_back(var_of_machine[i]);
      else
        fixed += ci.z[i];
    }
    if (vars.empty()) continue;
    lll::Event ev;
    ev.id = next_id++;
    ev.scope = vars;
    ev.label = "coverage g" + std::to_string(g);
    ev.prob_bound = bound;
    ev.x_weight = x_w;
    Rat floor_val = Rat(1, 5) - theta_after;
    Rat raised = threshold;
    ev.occurs = [fixed, vars, floor_val, raised](const lll::Assignment& a) {
      Rat total = fixed;
      for (int v : vars)
        if (a[v]) total += raised;
      return total < floor_val;
    };
    res.trace.events.push_back(
        {"coverage", std::to_string(g), bound, x_w});
    sys.events.push_back(std::move(ev));
  }

  lll::MtPolicy policy;
  policy.max_resamples = cfg.mt_max_resamples;
  auto mt = lll::moser_tardos(sys, rng, policy);
  res.trace.resamples = mt.resamples;
  res.trace.resample_tally = mt.resamples_by_event;
  if (!mt.ok)
    throw NonTerminatedError("reduce_p: " + mt.detail);

  res.ci = ci;
  res.ci.p = ci.p / Rat(2);
  res.ci.theta = theta_after;
  std::vector<char> dropped(m, 0);
  for (int i = 0; i < m; ++i) {
    int v = var_of_machine[i];
    if (v < 0) continue;
    if (mt.assignment[v]) {
      res.ci.z[i] = threshold;
    } else {
      res.ci.z[i] = Rat(0);
      dropped[i] = 1;
    }
  }
  bool any_drop = std::any_of(dropped.begin(), dropped.end(),
                              [](char c) { return c != 0; });
  if (any_drop) {
    for (auto& grp : res.ci.groups) {
      grp.erase(std::remove_if(grp.begin(), grp.end(),
                               [&](int i) { return dropped[i]; }),
                grp.end());
      if (grp.empty())
        throw NonTerminatedError(
            "reduce_p: a group lost all its machines despite coverage events");
    }
    std::map<std::pair<int, int>, Rat> new_w;
    for (const auto& [key, load] : res.ci.w) {
      auto [h, k] = key;
      if (h != k && dropped[k]) {
        auto it = new_w.find({k, k});
        if (it == new_w.end())
          new_w[{k, k}] = load;
        else
          it->second += load;
      } else {
        new_w[key] = load;
      }
    }
    res.ci.w = std::move(new_w);
  }
  return res;
}

std::pair<CanonicalInstance, CoarsenReport> coarsen_pipeline(
    const CanonicalInstance& ci, const CoarsenConfig& cfg, Rng& rng) {
  CanonicalInstance cur = ci;
  CoarsenReport report;
  Rat cursor = cfg.delta_track;
  int guard = 0;
  while (rat_max(cur.p, cur.q) > cfg.q0) {
    if (++guard > 200)
      throw NonTerminatedError("coarsen_pipeline: too many reduction rounds");
    if (cur.q >= cur.p) {
      auto step = reduce_q(cur, rng, cfg, cursor);
      cursor += step.trace.delta_step;
      report.delta_loss += step.trace.delta_step;
      report.theta_added += step.trace.theta_step;
      report.traces.push_back(step.trace);
      cur = std::move(step.ci);
    } else {
      auto step = reduce_p(cur, rng, cfg);
      report.theta_added += step.trace.theta_step;
      report.traces.push_back(step.trace);
      cur = std::move(step.ci);
    }
  }
  cur.p = cfg.q0;
  cur.q = cfg.q0;
  return {std::move(cur), std::move(report)};
}

}  // namespace resched
