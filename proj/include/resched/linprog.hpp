#pragma once

#include <string>
#include <vector>

#include "resched/instance.hpp"
#include "resched/rational.hpp"

namespace resched {

// Row families of the parametrized feasibility relaxation. Every job must
// be fully assigned (Cover); per machine the heavy mass defines z
// (HeavyBalance) which is capped at one (ZCap); the combined heavy+light
// load is capped at 1+rho*delta (LoadCap); and light assignments may not
// stack onto nearly-full heavy machines (MixCap).
enum class RowTag { Cover, HeavyBalance, ZCap, LoadCap, MixCap, Bound };

const char* row_tag_name(RowTag tag);

enum class Rel { Eq, Le };

enum class VarKind { XHeavy, XLight, Z };

struct VarInfo {
  VarKind kind;
  int job = -1;      // index into heavy/light list (for X vars)
  int machine = -1;  // machine index
};

struct LpRow {
  RowTag tag;
  Rel rel;
  Rat rhs;
  std::vector<std::pair<int, Rat>> coeffs;  // (variable, coefficient)
  std::string label;
};

struct LpModel {
  int num_vars = 0;
  std::vector<VarInfo> vars;
  std::vector<LpRow> rows;
  Rat rho, delta;
  int num_machines = 0;
  int num_heavy = 0;
  int num_light = 0;
  // var lookup: x_heavy[j] / x_light[j] list (var, machine idx) pairs
  std::vector<std::vector<std::pair<int, int>>> heavy_vars, light_vars;
  std::vector<int> z_vars;  // per machine

  std::string dump() const;  // plain-text row format: tag, coeffs, rel, rhs
};

LpModel build_lp(const Instance& inst, const Rat& rho = Rat(3, 5),
                 const Rat& delta = Rat(0));

enum class SolveStatus { Feasible, Infeasible, NonTerminated };

// Double-precision phase-1 result. On Feasible, `values` holds all variable
// values and max_residual <= tolerance. On Infeasible, `farkas` carries the
// final row multipliers as a certificate sketch and `detail` the solver
// status text.
struct SolveOutcome {
  SolveStatus status = SolveStatus::NonTerminated;
  std::vector<double> values;
  double max_residual = 0.0;
  double infeasibility = 0.0;
  std::vector<double> farkas;
  std::string detail;
};

constexpr double kLpTolerance = 1e-9;

SolveOutcome solve_feasibility(const LpModel& model, long long max_iters = 200000);

// Exact rational variant of the same simplex (Bland's rule, zero tolerance).
struct ExactOutcome {
  SolveStatus status = SolveStatus::NonTerminated;
  std::vector<Rat> values;
  std::string detail;
};

ExactOutcome solve_feasibility_exact(const LpModel& model,
                                     long long max_iters = 500000);

// Residual of a candidate point, maximized over rows (exact arithmetic:
// equality rows use |lhs-rhs|, inequality rows use max(0, lhs-rhs)).
Rat max_row_residual(const LpModel& model, const std::vector<Rat>& values);

}  // namespace resched
