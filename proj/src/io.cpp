#include "resched/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace resched {

using nlohmann::json;

namespace {

json rat_to_json(const Rat& r) { return r.str(); }

Rat rat_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return Rat::parse(j.get<std::string>());
  throw std::invalid_argument("expected a rational as \"a/b\" or integer");
}

json jobs_to_json(const std::vector<JobRec>& jobs) {
  json arr = json::array();
  for (const auto& j : jobs)
    arr.push_back({{"id", j.id}, {"eligible", j.eligible}});
  return arr;
}

std::vector<JobRec> jobs_from_json(const json& arr) {
  std::vector<JobRec> jobs;
  for (const auto& item : arr) {
    JobRec rec;
    rec.id = item.at("id").get<long long>();
    rec.eligible = item.at("eligible").get<std::vector<long long>>();
    jobs.push_back(std::move(rec));
  }
  return jobs;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json doc{{"eps", rat_to_json(inst.eps)},
           {"machines", inst.machines},
           {"heavy", jobs_to_json(inst.heavy)},
           {"light", jobs_to_json(inst.light)}};
  return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
  json doc = json::parse(text);
  Instance inst;
  inst.eps = rat_from_json(doc.at("eps"));
  inst.machines = doc.at("machines").get<std::vector<long long>>();
  if (doc.contains("heavy")) inst.heavy = jobs_from_json(doc.at("heavy"));
  if (doc.contains("light")) inst.light = jobs_from_json(doc.at("light"));
  return inst;
}

std::string schedule_to_json(const Schedule& sched) {
  json doc = json::object();
  for (const auto& [job, machine] : sched.assignment)
    doc[std::to_string(job)] = machine;
  return doc.dump(2);
}

Schedule schedule_from_json(const std::string& text) {
  json doc = json::parse(text);
  Schedule sched;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    sched.assignment[std::stoll(it.key())] = it.value().get<long long>();
  return sched;
}

std::string canonical_to_json(const CanonicalInstance& ci) {
  json groups = json::array();
  for (const auto& g : ci.groups) {
    json ids = json::array();
    for (int i : g) ids.push_back(ci.machine_ids[i]);
    groups.push_back(ids);
  }
  json w = json::array();
  for (const auto& [key, load] : ci.w)
    w.push_back({ci.machine_ids[key.first], ci.machine_ids[key.second],
                 rat_to_json(load)});
  json z = json::array();
  for (const auto& zi : ci.z) z.push_back(rat_to_json(zi));
  json doc{{"machines", ci.machine_ids}, {"groups", groups},   {"w", w},
           {"z", z},                     {"p", rat_to_json(ci.p)},
           {"q", rat_to_json(ci.q)},     {"theta", rat_to_json(ci.theta)}};
  return doc.dump(2);
}

CanonicalInstance canonical_from_json(const std::string& text) {
  json doc = json::parse(text);
  CanonicalInstance ci;
  ci.machine_ids = doc.at("machines").get<std::vector<long long>>();
  std::unordered_map<long long, int> idx;
  for (size_t i = 0; i < ci.machine_ids.size(); ++i)
    idx[ci.machine_ids[i]] = static_cast<int>(i);
  for (const auto& g : doc.at("groups")) {
    std::vector<int> group;
    for (const auto& id : g) group.push_back(idx.at(id.get<long long>()));
    std::sort(group.begin(), group.end());
    ci.groups.push_back(std::move(group));
  }
  for (const auto& entry : doc.at("w")) {
    int h = idx.at(entry.at(0).get<long long>());
    int k = idx.at(entry.at(1).get<long long>());
    ci.w[{h, k}] = rat_from_json(entry.at(2));
  }
  for (const auto& zi : doc.at("z")) ci.z.push_back(rat_from_json(zi));
  if (ci.z.size() != ci.machine_ids.size())
    throw std::invalid_argument("canonical document: z length mismatch");
  ci.p = rat_from_json(doc.at("p"));
  ci.q = rat_from_json(doc.at("q"));
  ci.theta = rat_from_json(doc.at("theta"));
  return ci;
}

std::string assignment_to_json(const CanonicalInstance& ci,
                               const HeavyAssignment& f) {
  json doc = json::array();
  for (int mi : f.to_machine) doc.push_back(ci.machine_ids[mi]);
  return doc.dump(2);
}

HeavyAssignment assignment_from_json(const CanonicalInstance& ci,
                                     const std::string& text) {
  json doc = json::parse(text);
  std::unordered_map<long long, int> idx;
  for (size_t i = 0; i < ci.machine_ids.size(); ++i)
    idx[ci.machine_ids[i]] = static_cast<int>(i);
  HeavyAssignment f;
  for (const auto& id : doc) f.to_machine.push_back(idx.at(id.get<long long>()));
  return f;
}

std::string witness_to_json(const CanonicalInstance& ci, const Witness& w) {
  json s = json::array(), t = json::array();
  for (int i : w.S) s.push_back(ci.machine_ids[i]);
  for (int i : w.T) t.push_back(ci.machine_ids[i]);
  json doc{{"S", s},
           {"T", t},
           {"delta", rat_to_json(w.delta)},
           {"slack", rat_to_json(w.slack)},
           {"connected", w.connected}};
  return doc.dump(2);
}

FinalConstants constants_from_json(const std::string& text) {
  json doc = json::parse(text);
  FinalConstants c;
  if (doc.contains("c1")) c.c1 = doc["c1"].get<double>();
  if (doc.contains("c2")) c.c2 = doc["c2"].get<double>();
  if (doc.contains("c3")) c.c3 = doc["c3"].get<double>();
  if (doc.contains("L_factor")) c.L_factor = doc["L_factor"].get<double>();
  if (doc.contains("L")) c.L_override = doc["L"].get<int>();
  if (doc.contains("delta0")) c.delta0 = doc["delta0"].get<double>();
  if (doc.contains("delta")) c.delta = doc["delta"].get<double>();
  if (doc.contains("mt_max_resamples"))
    c.mt_max_resamples = doc["mt_max_resamples"].get<long long>();
  if (doc.contains("allow_large_theta"))
    c.allow_large_theta = doc["allow_large_theta"].get<bool>();
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

bool looks_like_canonical_json(const std::string& text) {
  auto doc = json::parse(text, nullptr, false);
  return doc.is_object() && doc.contains("groups") && doc.contains("w");
}

}  // namespace resched
