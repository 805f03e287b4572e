#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resched/baselines.hpp"
#include "resched/coarsen.hpp"
#include "resched/io.hpp"
#include "resched/lll.hpp"
#include "resched/pipeline.hpp"

namespace py = pybind11;
using namespace resched;

namespace {

SolveOptions options_from_kwargs(const std::string& rho,
                                 const std::string& delta, long long q0,
                                 uint64_t seed,
                                 const std::string& constants_json) {
  SolveOptions opts;
  opts.rho = Rat::parse(rho);
  opts.delta = Rat::parse(delta);
  opts.q0 = Rat(q0);
  opts.seed = seed;
  if (!constants_json.empty())
    opts.constants = constants_from_json(constants_json);
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "two-size restricted assignment scheduling toolkit";

  m.def(
      "generate_random",
      [](int machines, int heavy, int light, const std::string& eps,
         int elig_min, int elig_max, uint64_t seed) {
        GenParams gp;
        gp.machines = machines;
        gp.heavy = heavy;
        gp.light = light;
        gp.eps = Rat::parse(eps);
        gp.elig_min = elig_min;
        gp.elig_max = elig_max;
        gp.seed = seed;
        return instance_to_json(gen_random(gp));
      },
      py::arg("machines"), py::arg("heavy"), py::arg("light"),
      py::arg("eps") = "1/3", py::arg("elig_min") = 1, py::arg("elig_max") = 3,
      py::arg("seed") = 1, "Random instance as a JSON document.");

  m.def(
      "generate_vertex_cover",
      [](int vertices, int k, const std::string& eps, uint64_t seed) {
        auto graph = gen_random_cubic(vertices, seed);
        if (k < 0) k = min_vertex_cover_size(graph);
        return instance_to_json(gen_vertex_cover(graph, k, Rat::parse(eps)));
      },
      py::arg("vertices"), py::arg("k") = -1, py::arg("eps") = "1/6",
      py::arg("seed") = 1,
      "Hardness-family instance from a random cubic graph.");

  m.def(
      "validate_instance",
      [](const std::string& inst_json) {
        return validate_instance(instance_from_json(inst_json)).issues;
      },
      py::arg("instance"), "List of invariant violations (empty when valid).");

  m.def(
      "makespan",
      [](const std::string& inst_json, const std::string& sched_json) {
        return makespan(instance_from_json(inst_json),
                        schedule_from_json(sched_json))
            .str();
      },
      py::arg("instance"), py::arg("schedule"));

  m.def(
      "brute_force_opt",
      [](const std::string& inst_json, int max_machines, int max_jobs,
         long long max_leaves) {
        auto res = brute_force_opt(instance_from_json(inst_json),
                                   max_machines, max_jobs, max_leaves);
        return py::make_tuple(res.opt.str(), schedule_to_json(res.schedule));
      },
      py::arg("instance"), py::arg("max_machines") = 10,
      py::arg("max_jobs") = 14, py::arg("max_leaves") = 2000000,
      "Exact optimum (guarded to desk-scale sizes).");

  m.def(
      "matching_baseline",
      [](const std::string& inst_json) {
        auto res = matching_baseline_auto(instance_from_json(inst_json));
        return py::make_tuple(schedule_to_json(res.schedule),
                              res.t_used.str());
      },
      py::arg("instance"), "Slot-matching baseline at the best level.");

  m.def(
      "solve",
      [](const std::string& inst_json, const std::string& rho,
         const std::string& delta, long long q0, uint64_t seed,
         const std::string& constants) {
        auto inst = instance_from_json(inst_json);
        auto res = solve_instance(
            inst, options_from_kwargs(rho, delta, q0, seed, constants));
        py::dict out;
        out["path"] =
            res.path == SolveResult::Path::Pipeline ? "pipeline" : "fallback";
        out["schedule"] = schedule_to_json(res.schedule);
        out["makespan"] = res.makespan.str();
        out["verified_schedule"] = res.verified_schedule;
        out["verified_good"] = res.verified_good;
        out["verified_bound"] = res.verified_bound;
        out["bound"] = res.bound.str();
        out["final_goodness"] = res.ledger.final_goodness;
        out["resamples"] = res.resamples;
        out["detail"] = res.detail;
        return out;
      },
      py::arg("instance"), py::arg("rho") = "3/5", py::arg("delta") = "1/100",
      py::arg("q0") = 100, py::arg("seed") = 1, py::arg("constants") = "",
      "Full pipeline; falls back to assignment rounding when the relaxation "
      "is infeasible.");

  m.def(
      "to_canonical",
      [](const std::string& inst_json, const std::string& rho,
         const std::string& delta) {
        auto inst = instance_from_json(inst_json);
        auto model = build_lp(inst, Rat::parse(rho), Rat::parse(delta));
        auto lp = solve_feasibility(model);
        if (lp.status != SolveStatus::Feasible)
          throw std::runtime_error("relaxation not feasible: " + lp.detail);
        auto canon = to_canonical(inst, model, lp.values, Rat::parse(rho),
                                  Rat::parse(delta));
        return canonical_to_json(canon.ci);
      },
      py::arg("instance"), py::arg("rho") = "3/5", py::arg("delta") = "1/100",
      "Canonical form of a feasible instance.");

  m.def(
      "check_canonical",
      [](const std::string& ci_json, const std::string& p,
         const std::string& q, const std::string& theta) {
        auto ci = canonical_from_json(ci_json);
        return check_canonical(ci, Rat::parse(p), Rat::parse(q),
                               Rat::parse(theta))
            .issues;
      },
      py::arg("canonical"), py::arg("p"), py::arg("q"), py::arg("theta"));

  m.def(
      "is_delta_good",
      [](const std::string& ci_json, const std::string& assignment_json,
         const std::string& delta) {
        auto ci = canonical_from_json(ci_json);
        auto f = assignment_from_json(ci, assignment_json);
        auto [good, placement] = is_delta_good(ci, f, Rat::parse(delta));
        (void)placement;
        return good;
      },
      py::arg("canonical"), py::arg("assignment"), py::arg("delta"),
      "Flow certification of delta-goodness.");

  m.def(
      "chernoff_bound",
      [](double mu, double K, double lambda, const std::string& tail) {
        lll::Tail t;
        if (tail == "upper")
          t = lll::Tail::Upper;
        else if (tail == "upper_small")
          t = lll::Tail::UpperSmall;
        else if (tail == "lower")
          t = lll::Tail::Lower;
        else
          throw std::invalid_argument("tail must be upper|upper_small|lower");
        return lll::chernoff_bound(mu, K, lambda, t);
      },
      py::arg("mu"), py::arg("K"), py::arg("lambda"), py::arg("tail"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        return run_experiment_csv(config_json);
      },
      py::arg("config"), "Experiment batch; returns the CSV text.");

  m.attr("__version__") = "0.1.0";
}
