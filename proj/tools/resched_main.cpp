#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "resched/baselines.hpp"
#include "resched/io.hpp"
#include "resched/pipeline.hpp"

using namespace resched;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFallback = 2;
constexpr int kExitNonTerminated = 3;
constexpr int kExitInputError = 4;

Rat parse_rat_flag(const std::string& s) {
  if (s.find('/') != std::string::npos) return Rat::parse(s);
  if (s.find('.') != std::string::npos || s.find('e') != std::string::npos)
    return Rat::approx(std::stod(s), 1000000);
  return Rat::parse(s);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text << std::endl;
  else
    write_file(out_path, text);
}

json schedule_doc(const Instance& inst, const SolveResult& res) {
  json doc;
  doc["path"] = res.path == SolveResult::Path::Pipeline ? "pipeline" : "fallback";
  doc["schedule"] = json::parse(schedule_to_json(res.schedule));
  doc["makespan"] = res.makespan.str();
  doc["verified_schedule"] = res.verified_schedule;
  doc["verified_good"] = res.verified_good;
  doc["verified_bound"] = res.verified_bound;
  doc["bound"] = res.bound.str();
  doc["delta_ledger"] = {
      {"mt_goodness", res.ledger.mt_goodness},
      {"theta_surcharge", res.ledger.theta_surcharge},
      {"coarsen_loss", res.ledger.coarsen_loss},
      {"final_goodness", res.ledger.final_goodness},
      {"lift_overhead", res.ledger.lift_overhead.str()}};
  doc["resamples"] = res.resamples;
  doc["detail"] = res.detail;
  if (res.path == SolveResult::Path::Fallback)
    doc["fallback_level"] = res.fallback_t.str();
  json tally = json::object();
  for (const auto& [k, v] : res.event_tally) tally[k] = v;
  doc["bad_event_tally"] = tally;
  json steps = json::array();
  for (const auto& t : res.coarsen_traces)
    steps.push_back({{"op", t.op},
                     {"p", t.p_before.str()},
                     {"q", t.q_before.str()},
                     {"theta_step", t.theta_step.str()},
                     {"randomized", t.randomized_entries},
                     {"events", t.events.size()},
                     {"resamples", t.resamples}});
  doc["coarsen_trace"] = steps;
  (void)inst;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-size restricted assignment scheduling toolkit"};
  app.require_subcommand(1);

  // ---- solve ----
  std::string solve_instance_path, solve_out, solve_constants;
  std::string solve_rho = "3/5", solve_delta = "1/100";
  long long solve_q0 = 100;
  uint64_t solve_seed = 1;
  auto* solve = app.add_subcommand("solve", "run the full rounding pipeline");
  solve->add_option("--instance", solve_instance_path, "instance file")
      ->required();
  solve->add_option("--rho", solve_rho, "relaxation parameter rho");
  solve->add_option("--delta", solve_delta, "relaxation parameter delta");
  solve->add_option("--q0", solve_q0, "coarsening target parameter");
  solve->add_option("--constants", solve_constants,
                    "JSON file with final-round constant overrides");
  solve->add_option("--seed", solve_seed, "master seed");
  solve->add_option("--out", solve_out, "output file (default stdout)");

  // ---- generate ----
  std::string gen_family = "random", gen_out, gen_eps = "1/3", gen_mode = "yes";
  int gen_machines = 4, gen_heavy = 2, gen_light = 4;
  int gen_elig_min = 1, gen_elig_max = 3, gen_vertices = 6, gen_k = -1;
  uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("generate", "emit a benchmark instance");
  gen->add_option("--family", gen_family, "random | vertex-cover");
  gen->add_option("--machines", gen_machines, "machine count (random)");
  gen->add_option("--heavy", gen_heavy, "heavy job count (random)");
  gen->add_option("--light", gen_light, "light job count (random)");
  gen->add_option("--eps", gen_eps, "light job size");
  gen->add_option("--elig-min", gen_elig_min, "min eligibility set size");
  gen->add_option("--elig-max", gen_elig_max, "max eligibility set size");
  gen->add_option("--vertices", gen_vertices, "vertex count (vertex-cover)");
  gen->add_option("--k", gen_k,
                  "cover budget; defaults to the exact minimum cover");
  gen->add_option("--mode", gen_mode,
                  "yes = cover of size k exists, no = one less (vertex-cover)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // ---- check ----
  std::string check_instance, check_schedule, check_delta;
  auto* check = app.add_subcommand(
      "check", "validate a schedule, or test an assignment for goodness");
  check->add_option("--instance", check_instance,
                    "instance or canonical-instance file")
      ->required();
  check->add_option("--schedule", check_schedule,
                    "schedule file (or group assignment for canonical input)")
      ->required();
  check->add_option("--delta", check_delta, "goodness level to certify");

  // ---- experiment ----
  std::string exp_config, exp_out;
  auto* exp = app.add_subcommand("experiment", "run a CSV experiment batch");
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out", exp_out, "CSV output file (default stdout)");

  // ---- bench ----
  int bench_count = 5;
  int bench_machines = 10, bench_heavy = 5, bench_light = 10;
  std::string bench_eps = "1/4";
  uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "time the pipeline on a batch");
  bench->add_option("--count", bench_count, "instances to run");
  bench->add_option("--machines", bench_machines, "machine count");
  bench->add_option("--heavy", bench_heavy, "heavy job count");
  bench->add_option("--light", bench_light, "light job count");
  bench->add_option("--eps", bench_eps, "light job size");
  bench->add_option("--seed", bench_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      Instance inst = instance_from_json(read_file(solve_instance_path));
      SolveOptions opts;
      opts.rho = parse_rat_flag(solve_rho);
      opts.delta = parse_rat_flag(solve_delta);
      opts.q0 = Rat(solve_q0);
      opts.seed = solve_seed;
      if (!solve_constants.empty())
        opts.constants = constants_from_json(read_file(solve_constants));
      auto res = solve_instance(inst, opts);
      emit(solve_out, schedule_doc(inst, res).dump(2));
      return res.path == SolveResult::Path::Fallback ? kExitFallback : kExitOk;
    }
    if (*gen) {
      Instance inst;
      if (gen_family == "random") {
        GenParams gp;
        gp.machines = gen_machines;
        gp.heavy = gen_heavy;
        gp.light = gen_light;
        gp.eps = parse_rat_flag(gen_eps);
        gp.elig_min = gen_elig_min;
        gp.elig_max = gen_elig_max;
        gp.seed = gen_seed;
        inst = gen_random(gp);
      } else if (gen_family == "vertex-cover") {
        auto graph = gen_random_cubic(gen_vertices, gen_seed);
        int k = gen_k;
        if (k < 0) {
          int minvc = min_vertex_cover_size(graph);
          k = gen_mode == "no" ? std::max(0, minvc - 1) : minvc;
        }
        inst = gen_vertex_cover(graph, k, parse_rat_flag(gen_eps));
      } else {
        std::cerr << "unknown family " << gen_family << "\n";
        return kExitInputError;
      }
      emit(gen_out, instance_to_json(inst));
      return kExitOk;
    }
    if (*check) {
      std::string text = read_file(check_instance);
      if (looks_like_canonical_json(text)) {
        CanonicalInstance ci = canonical_from_json(text);
        HeavyAssignment f =
            assignment_from_json(ci, read_file(check_schedule));
        Rat delta = check_delta.empty() ? Rat(0) : parse_rat_flag(check_delta);
        auto [good, placement] = is_delta_good(ci, f, delta);
        (void)placement;
        json doc{{"good", good}, {"delta", delta.str()}};
        if (!good && ci.num_machines() <= 25) {
          auto [ok, wit] = delta_good_bruteforce(ci, f, delta);
          (void)ok;
          if (wit) doc["witness"] = json::parse(witness_to_json(ci, *wit));
        }
        std::cout << doc.dump(2) << std::endl;
        return kExitOk;
      }
      Instance inst = instance_from_json(text);
      Schedule sched = schedule_from_json(read_file(check_schedule));
      auto rep = validate_schedule(inst, sched);
      json doc{{"valid", rep.ok()}, {"issues", rep.issues}};
      if (rep.ok()) doc["makespan"] = makespan(inst, sched).str();
      std::cout << doc.dump(2) << std::endl;
      return rep.ok() ? kExitOk : kExitInputError;
    }
    if (*exp) {
      auto csv = run_experiment_csv(read_file(exp_config));
      emit(exp_out, csv);
      return kExitOk;
    }
    if (*bench) {
      for (int i = 0; i < bench_count; ++i) {
        GenParams gp;
        gp.machines = bench_machines;
        gp.heavy = bench_heavy;
        gp.light = bench_light;
        gp.eps = parse_rat_flag(bench_eps);
        gp.elig_min = 2;
        gp.elig_max = 4;
        gp.seed = bench_seed + i;
        Instance inst = gen_random(gp);
        SolveOptions opts;
        opts.seed = bench_seed + i;
        // desk-scale setup: a large q0 keeps the parameters below the
        // coarsening threshold, whose per-halving theta steps otherwise
        // exceed the final round's domain at tractable sizes
        opts.q0 = Rat(100000000);
        opts.delta = Rat(1, 1000);
        opts.constants.allow_large_theta = true;
        opts.constants.c1 = 0.5;
        opts.constants.c2 = 1.0;
        opts.constants.c3 = 8.0;
        opts.constants.L_override = 5;
        opts.constants.delta0 = 0.9;
        opts.constants.delta = 0.9;
        auto t0 = std::chrono::steady_clock::now();
        std::string status;
        std::string mk;
        try {
          auto res = solve_instance(inst, opts);
          status = res.path == SolveResult::Path::Pipeline ? "pipeline"
                                                           : "fallback";
          mk = res.makespan.str();
        } catch (const std::exception& e) {
          status = std::string("error: ") + e.what();
        }
        auto dt = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::printf("bench %2d: %8.1f ms  %-9s makespan=%s\n", i, dt,
                    status.c_str(), mk.c_str());
      }
      return kExitOk;
    }
  } catch (const NonTerminatedError& e) {
    std::cerr << "non-terminated: " << e.what() << "\n";
    return kExitNonTerminated;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
