#include "resched/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "resched/baselines.hpp"
#include "resched/io.hpp"
#include "resched/linprog.hpp"

namespace resched {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

SolveResult solve_instance(const Instance& inst, const SolveOptions& opts) {
  auto rep = validate_instance(inst);
  if (!rep.ok())
    throw std::invalid_argument("invalid instance: " + rep.joined());

  SolveResult res;
  res.ledger.lift_overhead = Rat(2) * inst.eps;
  if (inst.total_jobs() == 0) {
    res.path = SolveResult::Path::Pipeline;
    res.makespan = Rat(0);
    res.verified_schedule = true;
    res.verified_good = true;
    res.verified_bound = true;
    res.bound = Rat(2);
    res.detail = "empty instance";
    return res;
  }

  auto model = build_lp(inst, opts.rho, opts.delta);
  auto lp = solve_feasibility(model);
  if (lp.status == SolveStatus::NonTerminated)
    throw NonTerminatedError("solve_instance: relaxation solve " + lp.detail);

  if (lp.status == SolveStatus::Infeasible) {
    auto fb = lst_schedule(inst);
    res.path = SolveResult::Path::Fallback;
    res.schedule = fb.schedule;
    res.fallback_t = fb.t_used;
    res.makespan = makespan(inst, res.schedule);
    res.verified_schedule = validate_schedule(inst, res.schedule).ok();
    res.bound = fb.t_used + Rat(1);
    res.verified_bound = res.makespan <= res.bound;
    res.detail = "relaxation infeasible (" + lp.detail +
                 "); assignment-rounding fallback at level " + fb.t_used.str();
    return res;
  }

  auto canon = to_canonical(inst, model, lp.values, opts.rho, opts.delta);
  res.canonical = canon.ci;

  CoarsenConfig ccfg = opts.coarsen;
  ccfg.q0 = opts.q0;
  Rng coarsen_rng(substream_seed(opts.seed, "coarsen"));
  auto [ci_small, creport] = coarsen_pipeline(canon.ci, ccfg, coarsen_rng);
  for (const auto& t : creport.traces) res.resamples += t.resamples;
  res.coarsen_traces = creport.traces;

  Rng final_rng(substream_seed(opts.seed, "final-round"));
  auto fr = final_round(ci_small, final_rng, opts.constants);
  res.resamples += fr.resamples;
  res.event_tally = fr.event_tally;
  res.delta_report = fr.delta_report;

  Rat delta_lifted = fr.delta_report_rat - creport.delta_loss;
  auto [good0, placement0] =
      is_delta_good(canon.ci, fr.assignment, delta_lifted);
  res.verified_good = good0;
  Rat delta_used = delta_lifted;
  if (!good0) {
    // every assignment admits a fractional placement once the per-machine
    // cap clears the 1.1 incoming-load bound; fall back to that level so
    // the lift still produces a schedule
    delta_used = Rat(-2);
    auto retry = is_delta_good(canon.ci, fr.assignment, delta_used);
    if (!retry.first)
      throw std::logic_error("solve_instance: light placement infeasible");
    placement0 = std::move(retry.second);
  }
  auto units =
      integral_light_assignment(canon.ci, fr.assignment, placement0, inst.eps);
  res.schedule =
      lift_assignment(inst, canon.ci, canon.lift, fr.assignment, units);
  res.makespan = makespan(inst, res.schedule);
  res.verified_schedule = validate_schedule(inst, res.schedule).ok();
  res.bound = Rat(2) - delta_used + Rat(2) * inst.eps;
  res.verified_bound = res.makespan <= res.bound;

  res.ledger.mt_goodness = fr.delta_report + 4.0 * ci_small.theta.to_double();
  res.ledger.theta_surcharge = 4.0 * ci_small.theta.to_double();
  res.ledger.coarsen_loss = creport.delta_loss.to_double();
  res.ledger.final_goodness = delta_lifted.to_double();
  res.ledger.final_goodness_rat = delta_lifted;

  std::ostringstream os;
  os << "pipeline ok; delta ledger: mt " << format_double(res.ledger.mt_goodness)
     << " - rescale " << format_double(res.ledger.theta_surcharge)
     << " - coarsen " << format_double(res.ledger.coarsen_loss) << " = "
     << format_double(res.ledger.final_goodness) << "; lift overhead 2*eps = "
     << res.ledger.lift_overhead.str();
  res.detail = os.str();
  return res;
}

namespace {

using nlohmann::json;

struct ExperimentRow {
  std::vector<std::string> cells;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string run_experiment_csv(const std::string& config_json) {
  json cfg = json::parse(config_json);
  SolveOptions opts;
  if (cfg.contains("rho")) opts.rho = Rat::parse(cfg["rho"].get<std::string>());
  if (cfg.contains("delta"))
    opts.delta = Rat::parse(cfg["delta"].get<std::string>());
  if (cfg.contains("q0")) opts.q0 = Rat(cfg["q0"].get<long long>());
  if (cfg.contains("constants"))
    opts.constants = constants_from_json(cfg["constants"].dump());
  bool run_baseline = cfg.value("baseline", true);
  bool run_bruteforce = cfg.value("bruteforce", true);

  std::vector<uint64_t> seeds;
  if (cfg.contains("seeds") && cfg["seeds"].is_array())
    for (const auto& s : cfg["seeds"]) seeds.push_back(s.get<uint64_t>());
  else {
    uint64_t base = 1;
    long long count = 1;
    if (cfg.contains("seeds")) {
      base = cfg["seeds"].value("base", 1);
      count = cfg["seeds"].value("count", 1);
    }
    for (long long i = 0; i < count; ++i) seeds.push_back(base + i);
  }

  std::ostringstream csv;
  csv << "instance,family,seed,machines,heavy,light,eps,opt,"
         "pipeline_makespan,pipeline_path,delta_final,verified_good,"
         "verified_bound,baseline_makespan,ratio_pipeline,ratio_baseline,"
         "resamples,bad_events,error\n";

  int instance_counter = 0;
  for (const auto& family : cfg.at("families")) {
    std::string type = family.at("type").get<std::string>();
    int count = family.value("count", 1);
    for (int idx = 0; idx < count; ++idx) {
      for (uint64_t seed : seeds) {
        std::string name = type + "-" + std::to_string(idx);
        std::string error;
        Instance inst;
        try {
          uint64_t gen_seed =
              substream_seed(seed, name + "#" + std::to_string(idx));
          if (type == "random") {
            GenParams gp;
            gp.machines = family.value("machines", 4);
            gp.heavy = family.value("heavy", 2);
            gp.light = family.value("light", 4);
            gp.eps = Rat::parse(family.value("eps", std::string("1/3")));
            gp.elig_min = family.value("elig_min", 1);
            gp.elig_max = family.value("elig_max", 3);
            gp.seed = gen_seed;
            inst = gen_random(gp);
          } else if (type == "vertex-cover") {
            int n = family.value("vertices", 6);
            auto graph = gen_random_cubic(n, gen_seed);
            int minvc = min_vertex_cover_size(graph);
            std::string mode = family.value("mode", std::string("yes"));
            int k = mode == "yes" ? minvc : std::max(0, minvc - 1);
            inst = gen_vertex_cover(
                graph, k, Rat::parse(family.value("eps", std::string("1/6"))));
          } else {
            throw std::invalid_argument("unknown family type " + type);
          }
        } catch (const std::exception& e) {
          csv << instance_counter++ << "," << csv_escape(name) << "," << seed
              << ",,,,,,,,,,,,,,,," << csv_escape(e.what()) << "\n";
          continue;
        }

        std::string opt_str, pipe_str, path_str, delta_str, base_str;
        std::string ratio_p, ratio_b, resamples_str, events_str;
        std::string vgood, vbound;
        Rat opt(0);
        bool have_opt = false;
        try {
          if (run_bruteforce) {
            auto bf = brute_force_opt(inst, 10, 40, 2000000);
            opt = bf.opt;
            have_opt = true;
            opt_str = opt.str();
          }
        } catch (const std::exception&) {
          opt_str = "";  // over budget: leave blank, keep going
        }
        try {
          SolveOptions o = opts;
          o.seed = seed;
          auto sr = solve_instance(inst, o);
          pipe_str = sr.makespan.str();
          path_str = sr.path == SolveResult::Path::Pipeline ? "pipeline"
                                                            : "fallback";
          delta_str = format_double(sr.ledger.final_goodness);
          vgood = sr.verified_good ? "1" : "0";
          vbound = sr.verified_bound ? "1" : "0";
          resamples_str = std::to_string(sr.resamples);
          long long events = 0;
          for (const auto& [k, v] : sr.event_tally) events += v;
          events_str = std::to_string(events);
          if (have_opt && opt.sign() > 0)
            ratio_p = format_double(sr.makespan.to_double() / opt.to_double());
        } catch (const std::exception& e) {
          error = e.what();
        }
        try {
          if (run_baseline) {
            auto bl = matching_baseline_auto(inst);
            Rat bm = makespan(inst, bl.schedule);
            base_str = bm.str();
            if (have_opt && opt.sign() > 0)
              ratio_b = format_double(bm.to_double() / opt.to_double());
          }
        } catch (const std::exception& e) {
          if (!error.empty()) error += "; ";
          error += e.what();
        }
        csv << instance_counter++ << "," << csv_escape(name) << "," << seed
            << "," << inst.machines.size() << "," << inst.heavy.size() << ","
            << inst.light.size() << "," << inst.eps.str() << "," << opt_str
            << "," << pipe_str << "," << path_str << "," << delta_str << ","
            << vgood << "," << vbound << "," << base_str << "," << ratio_p
            << "," << ratio_b << "," << resamples_str << "," << events_str
            << "," << csv_escape(error) << "\n";
      }
    }
  }
  return csv.str();
}

}  // namespace resched
