#include "resched/instance.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "resched/rng.hpp"

namespace resched {

std::unordered_map<long long, int> Instance::machine_index() const {
  std::unordered_map<long long, int> idx;
  idx.reserve(machines.size());
  for (size_t i = 0; i < machines.size(); ++i)
    idx.emplace(machines[i], static_cast<int>(i));
  return idx;
}

std::string ValidationReport::joined() const {
  std::ostringstream os;
  for (size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i];
  }
  return os.str();
}

namespace {

void check_jobs(const std::vector<JobRec>& jobs, const char* kind,
                const std::set<long long>& machine_set,
                std::set<long long>& seen_ids, ValidationReport& rep) {
  for (const auto& j : jobs) {
    if (!seen_ids.insert(j.id).second)
      rep.issues.push_back(std::string("duplicate job id ") +
                           std::to_string(j.id));
    if (j.eligible.empty())
      rep.issues.push_back(std::string(kind) + " job " + std::to_string(j.id) +
                           " has empty eligible set");
    std::set<long long> elig_seen;
    for (long long m : j.eligible) {
      if (!machine_set.count(m))
        rep.issues.push_back(std::string(kind) + " job " +
                             std::to_string(j.id) + " eligible on unknown machine " +
                             std::to_string(m));
      if (!elig_seen.insert(m).second)
        rep.issues.push_back(std::string(kind) + " job " +
                             std::to_string(j.id) + " lists machine " +
                             std::to_string(m) + " twice");
    }
  }
}

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  if (inst.eps.sign() <= 0)
    rep.issues.push_back("eps must be positive, got " + inst.eps.str());
  if (inst.eps > Rat(1))
    rep.issues.push_back("eps must be at most 1, got " + inst.eps.str());
  std::set<long long> machine_set;
  for (long long m : inst.machines)
    if (!machine_set.insert(m).second)
      rep.issues.push_back("duplicate machine id " + std::to_string(m));
  std::set<long long> job_ids;
  check_jobs(inst.heavy, "heavy", machine_set, job_ids, rep);
  check_jobs(inst.light, "light", machine_set, job_ids, rep);
  return rep;
}

ValidationReport validate_schedule(const Instance& inst,
                                   const Schedule& sched) {
  ValidationReport rep;
  std::set<long long> machine_set(inst.machines.begin(), inst.machines.end());
  auto check = [&](const JobRec& j) {
    auto it = sched.assignment.find(j.id);
    if (it == sched.assignment.end()) {
      rep.issues.push_back("job " + std::to_string(j.id) + " is unassigned");
      return;
    }
    if (std::find(j.eligible.begin(), j.eligible.end(), it->second) ==
        j.eligible.end())
      rep.issues.push_back("job " + std::to_string(j.id) +
                           " assigned to ineligible machine " +
                           std::to_string(it->second));
  };
  for (const auto& j : inst.heavy) check(j);
  for (const auto& j : inst.light) check(j);
  size_t known = 0;
  std::set<long long> ids;
  for (const auto& j : inst.heavy) ids.insert(j.id);
  for (const auto& j : inst.light) ids.insert(j.id);
  for (const auto& [jid, mid] : sched.assignment) {
    (void)mid;
    if (ids.count(jid))
      ++known;
    else
      rep.issues.push_back("schedule mentions unknown job " +
                           std::to_string(jid));
  }
  (void)known;
  return rep;
}

Rat makespan(const Instance& inst, const Schedule& sched) {
  auto rep = validate_schedule(inst, sched);
  if (!rep.ok())
    throw std::invalid_argument("invalid schedule: " + rep.issues.front());
  std::map<long long, std::pair<long long, long long>> load;  // (heavy, light)
  for (const auto& j : inst.heavy) load[sched.assignment.at(j.id)].first++;
  for (const auto& j : inst.light) load[sched.assignment.at(j.id)].second++;
  Rat best(0);
  for (const auto& [mid, hl] : load) {
    (void)mid;
    Rat v = Rat(hl.first) + inst.eps * Rat(hl.second);
    if (v > best) best = v;
  }
  return best;
}

Instance gen_random(const GenParams& params) {
  if (params.machines < 1)
    throw std::invalid_argument("gen_random: need at least one machine");
  if (params.heavy < 0 || params.light < 0)
    throw std::invalid_argument("gen_random: negative job count");
  if (params.eps.sign() <= 0 || params.eps > Rat(1))
    throw std::invalid_argument("gen_random: eps must lie in (0,1]");
  if (params.elig_min < 1 || params.elig_max < params.elig_min)
    throw std::invalid_argument("gen_random: bad eligibility size range");

  Rng rng(substream_seed(params.seed, "gen_random"));
  Instance inst;
  inst.eps = params.eps;
  inst.machines.resize(params.machines);
  for (int i = 0; i < params.machines; ++i) inst.machines[i] = i;

  auto draw_eligible = [&]() {
    int lo = std::min(params.elig_min, params.machines);
    int hi = std::min(params.elig_max, params.machines);
    int size = lo + static_cast<int>(rng.below(hi - lo + 1));
    std::vector<long long> pool = inst.machines;
    // partial Fisher-Yates for the first `size` entries
    for (int i = 0; i < size; ++i) {
      int j = i + static_cast<int>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<long long> out(pool.begin(), pool.begin() + size);
    std::sort(out.begin(), out.end());
    return out;
  };

  long long next_id = 0;
  for (int i = 0; i < params.heavy; ++i)
    inst.heavy.push_back({next_id++, draw_eligible()});
  for (int i = 0; i < params.light; ++i)
    inst.light.push_back({next_id++, draw_eligible()});
  return inst;
}

bool is_simple_graph(const UndirectedGraph& graph) {
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : graph.edges) {
    if (u == v) return false;
    if (u < 0 || v < 0 || u >= graph.n || v >= graph.n) return false;
    auto key = std::minmax(u, v);
    if (!seen.insert({key.first, key.second}).second) return false;
  }
  return true;
}

Instance gen_vertex_cover(const UndirectedGraph& graph, int k,
                          const Rat& eps) {
  if (!is_simple_graph(graph))
    throw std::invalid_argument("gen_vertex_cover: graph must be simple");
  if (k < 0 || k > graph.n)
    throw std::invalid_argument("gen_vertex_cover: k out of range");
  if (eps.sign() <= 0)
    throw std::invalid_argument("gen_vertex_cover: eps must be positive");
  Rat bundle = Rat(1) / (Rat(3) * eps);
  if (!bundle.is_integer() || bundle.sign() <= 0)
    throw std::invalid_argument(
        "gen_vertex_cover: 1/(3*eps) must be a positive integer, got " +
        bundle.str());
  long long per_edge = bundle.num();

  Instance inst;
  inst.eps = eps;
  inst.machines.resize(graph.n);
  for (int i = 0; i < graph.n; ++i) inst.machines[i] = i;
  std::vector<long long> all = inst.machines;

  long long next_id = 0;
  for (int i = 0; i < graph.n - k; ++i) inst.heavy.push_back({next_id++, all});
  for (auto [u, v] : graph.edges) {
    std::vector<long long> pair = {std::min(u, v), std::max(u, v)};
    for (long long t = 0; t < per_edge; ++t)
      inst.light.push_back({next_id++, pair});
  }
  return inst;
}

UndirectedGraph gen_random_cubic(int n, uint64_t seed) {
  if (n < 4 || n % 2 != 0)
    throw std::invalid_argument("gen_random_cubic: n must be even and >= 4");
  Rng rng(substream_seed(seed, "gen_cubic"));
  // Pairing model: 3 half-edges per vertex, random perfect matching on the
  // half-edges, retried until the result is simple.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(3 * n);
    for (int v = 0; v < n; ++v)
      for (int t = 0; t < 3; ++t) stubs.push_back(v);
    for (size_t i = stubs.size(); i > 1; --i) {
      size_t j = rng.below(i);
      std::swap(stubs[i - 1], stubs[j]);
    }
    UndirectedGraph g;
    g.n = n;
    bool ok = true;
    std::set<std::pair<int, int>> seen;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v) {
        ok = false;
        break;
      }
      auto key = std::minmax(u, v);
      if (!seen.insert({key.first, key.second}).second) {
        ok = false;
        break;
      }
      g.edges.push_back({key.first, key.second});
    }
    if (ok) {
      std::sort(g.edges.begin(), g.edges.end());
      return g;
    }
  }
  throw std::runtime_error("gen_random_cubic: no simple pairing found");
}

int min_vertex_cover_size(const UndirectedGraph& graph) {
  if (graph.n > 24)
    throw std::invalid_argument("min_vertex_cover_size: n > 24 guard");
  int best = graph.n;
  for (uint32_t mask = 0; mask < (1u << graph.n); ++mask) {
    int size = __builtin_popcount(mask);
    if (size >= best) continue;
    bool covers = true;
    for (auto [u, v] : graph.edges) {
      if (!((mask >> u) & 1) && !((mask >> v) & 1)) {
        covers = false;
        break;
      }
    }
    if (covers) best = size;
  }
  return best;
}

}  // namespace resched
