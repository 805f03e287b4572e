#include "resched/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resched {

const char* row_tag_name(RowTag tag) {
  switch (tag) {
    case RowTag::Cover: return "cover";
    case RowTag::HeavyBalance: return "heavy-balance";
    case RowTag::ZCap: return "z-cap";
    case RowTag::LoadCap: return "load-cap";
    case RowTag::MixCap: return "mix-cap";
    case RowTag::Bound: return "bound";
  }
  return "?";
}

LpModel build_lp(const Instance& inst, const Rat& rho, const Rat& delta) {
  LpModel m;
  m.rho = rho;
  m.delta = delta;
  m.num_machines = static_cast<int>(inst.machines.size());
  m.num_heavy = static_cast<int>(inst.heavy.size());
  m.num_light = static_cast<int>(inst.light.size());
  auto midx = inst.machine_index();

  m.heavy_vars.resize(inst.heavy.size());
  m.light_vars.resize(inst.light.size());
  auto add_x = [&](VarKind kind, int j, const JobRec& job,
                   std::vector<std::vector<std::pair<int, int>>>& table) {
    for (long long mid : job.eligible) {
      int mi = midx.at(mid);
      m.vars.push_back({kind, j, mi});
      table[j].push_back({m.num_vars, mi});
      ++m.num_vars;
    }
  };
  for (size_t j = 0; j < inst.heavy.size(); ++j)
    add_x(VarKind::XHeavy, static_cast<int>(j), inst.heavy[j], m.heavy_vars);
  for (size_t j = 0; j < inst.light.size(); ++j)
    add_x(VarKind::XLight, static_cast<int>(j), inst.light[j], m.light_vars);
  m.z_vars.resize(m.num_machines);
  for (int i = 0; i < m.num_machines; ++i) {
    m.vars.push_back({VarKind::Z, -1, i});
    m.z_vars[i] = m.num_vars++;
  }

  // Cover: one row per job, heavy and light alike.
  for (size_t j = 0; j < inst.heavy.size(); ++j) {
    LpRow row{RowTag::Cover, Rel::Eq, Rat(1), {}, "cover h" +
                  std::to_string(inst.heavy[j].id)};
    for (auto [v, mi] : m.heavy_vars[j]) {
      (void)mi;
      row.coeffs.push_back({v, Rat(1)});
    }
    m.rows.push_back(std::move(row));
  }
  for (size_t j = 0; j < inst.light.size(); ++j) {
    LpRow row{RowTag::Cover, Rel::Eq, Rat(1), {}, "cover l" +
                  std::to_string(inst.light[j].id)};
    for (auto [v, mi] : m.light_vars[j]) {
      (void)mi;
      row.coeffs.push_back({v, Rat(1)});
    }
    m.rows.push_back(std::move(row));
  }

  // HeavyBalance: sum of heavy x on machine i minus z_i = 0.
  std::vector<std::vector<int>> heavy_on(m.num_machines), light_on(m.num_machines);
  for (size_t j = 0; j < inst.heavy.size(); ++j)
    for (auto [v, mi] : m.heavy_vars[j]) heavy_on[mi].push_back(v);
  for (size_t j = 0; j < inst.light.size(); ++j)
    for (auto [v, mi] : m.light_vars[j]) light_on[mi].push_back(v);

  for (int i = 0; i < m.num_machines; ++i) {
    LpRow row{RowTag::HeavyBalance, Rel::Eq, Rat(0), {},
              "heavy-balance m" + std::to_string(inst.machines[i])};
    for (int v : heavy_on[i]) row.coeffs.push_back({v, Rat(1)});
    row.coeffs.push_back({m.z_vars[i], Rat(-1)});
    m.rows.push_back(std::move(row));
  }
  for (int i = 0; i < m.num_machines; ++i)
    m.rows.push_back({RowTag::ZCap, Rel::Le, Rat(1),
                      {{m.z_vars[i], Rat(1)}},
                      "z-cap m" + std::to_string(inst.machines[i])});
  Rat load_rhs = Rat(1) + rho * delta;
  for (int i = 0; i < m.num_machines; ++i) {
    LpRow row{RowTag::LoadCap, Rel::Le, load_rhs, {},
              "load-cap m" + std::to_string(inst.machines[i])};
    row.coeffs.push_back({m.z_vars[i], Rat(1)});
    for (int v : light_on[i]) row.coeffs.push_back({v, inst.eps});
    m.rows.push_back(std::move(row));
  }
  Rat zc = Rat(1) - rho;
  for (size_t j = 0; j < inst.light.size(); ++j)
    for (auto [v, mi] : m.light_vars[j])
      m.rows.push_back({RowTag::MixCap, Rel::Le, Rat(1),
                        {{m.z_vars[mi], zc}, {v, Rat(1)}},
                        "mix-cap l" + std::to_string(inst.light[j].id) + " m" +
                            std::to_string(inst.machines[mi])});
  return m;
}

std::string LpModel::dump() const {
  std::ostringstream os;
  for (const auto& row : rows) {
    os << row_tag_name(row.tag);
    for (auto [v, c] : row.coeffs) os << " " << c.str() << "*v" << v;
    os << (row.rel == Rel::Eq ? " = " : " <= ") << row.rhs.str() << "\n";
  }
  return os.str();
}

namespace {

// Scalar traits shared by the double and exact instantiations.
struct DoubleField {
  using T = double;
  static double tol() { return kLpTolerance; }
  static double from_rat(const Rat& r) { return r.to_double(); }
  static bool is_neg(double v) { return v < -tol(); }
  static bool is_pos(double v) { return v > tol(); }
};

struct RatField {
  using T = Rat;
  static Rat tol() { return Rat(0); }
  static Rat from_rat(const Rat& r) { return r; }
  static bool is_neg(const Rat& v) { return v.sign() < 0; }
  static bool is_pos(const Rat& v) { return v.sign() > 0; }
};

// Dense phase-1 simplex with Bland's pivoting rule. Artificials are
// appended for equality rows; slack variables cover the inequalities. The
// phase-1 objective (sum of artificials) reaching zero certifies
// feasibility; a positive optimum certifies infeasibility.
template <class F>
struct Simplex {
  using T = typename F::T;
  int n_struct;                       // structural variable count
  int n_rows;
  int n_total;                        // struct + slack + artificial
  std::vector<std::vector<T>> a;      // row-major tableau, n_rows x n_total
  std::vector<T> b;
  std::vector<int> basis;
  std::vector<T> cost;                // phase-1 costs
  long long pivots = 0;

  explicit Simplex(const LpModel& model) {
    n_struct = model.num_vars;
    n_rows = static_cast<int>(model.rows.size());
    int n_slack = 0, n_art = 0;
    for (const auto& row : model.rows)
      (row.rel == Rel::Le) ? ++n_slack : ++n_art;
    n_total = n_struct + n_slack + n_art;
    a.assign(n_rows, std::vector<T>(n_total, T(0)));
    b.assign(n_rows, T(0));
    basis.assign(n_rows, -1);
    cost.assign(n_total, T(0));
    int slack_at = n_struct, art_at = n_struct + n_slack;
    for (int r = 0; r < n_rows; ++r) {
      const auto& row = model.rows[r];
      for (auto [v, c] : row.coeffs) a[r][v] = a[r][v] + F::from_rat(c);
      b[r] = F::from_rat(row.rhs);  // all model rhs are >= 0 by construction
      if (row.rel == Rel::Le) {
        a[r][slack_at] = T(1);
        basis[r] = slack_at++;
      } else {
        a[r][art_at] = T(1);
        cost[art_at] = T(1);
        basis[r] = art_at++;
      }
    }
  }

  // Reduced cost of column j given duals implicitly via basis rows.
  // We maintain the tableau explicitly; reduced costs are computed on the fly.
  std::vector<T> reduced_costs() const {
    std::vector<T> red(cost);
    for (int r = 0; r < n_rows; ++r) {
      const T& cb = cost[basis[r]];
      if (!(cb == T(0)))
        for (int j = 0; j < n_total; ++j) red[j] = red[j] - cb * a[r][j];
    }
    return red;
  }

  T objective() const {
    T obj(0);
    for (int r = 0; r < n_rows; ++r)
      if (!(cost[basis[r]] == T(0))) obj = obj + b[r];
    return obj;
  }

  void pivot(int r, int c) {
    T piv = a[r][c];
    for (int j = 0; j < n_total; ++j) a[r][j] = a[r][j] / piv;
    b[r] = b[r] / piv;
    for (int i = 0; i < n_rows; ++i) {
      if (i == r) continue;
      T f = a[i][c];
      if (f == T(0)) continue;
      for (int j = 0; j < n_total; ++j) a[i][j] = a[i][j] - f * a[r][j];
      b[i] = b[i] - f * b[r];
      a[i][c] = T(0);
    }
    basis[r] = c;
  }

  // Returns true when optimal, false when the iteration cap was hit.
  bool run(long long max_iters) {
    while (pivots < max_iters) {
      auto red = reduced_costs();
      int enter = -1;
      for (int j = 0; j < n_total; ++j)
        if (F::is_neg(red[j])) {  // Bland: lowest index
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      for (int r = 0; r < n_rows; ++r) {
        if (!F::is_pos(a[r][enter])) continue;
        if (leave < 0) {
          leave = r;
          continue;
        }
        // min ratio; Bland tie-break on the lowest basis variable index
        T lhs = b[r] * a[leave][enter];
        T rhs = b[leave] * a[r][enter];
        if (lhs < rhs || (lhs == rhs && basis[r] < basis[leave])) leave = r;
      }
      if (leave < 0) return true;  // unbounded cannot happen in phase 1
      pivot(leave, enter);
      ++pivots;
    }
    return false;
  }

  std::vector<T> solution() const {
    std::vector<T> x(n_struct, T(0));
    for (int r = 0; r < n_rows; ++r)
      if (basis[r] < n_struct) x[basis[r]] = b[r];
    return x;
  }
};

}  // namespace

SolveOutcome solve_feasibility(const LpModel& model, long long max_iters) {
  SolveOutcome out;
  if (model.rows.empty()) {
    out.status = SolveStatus::Feasible;
    out.values.assign(model.num_vars, 0.0);
    out.detail = "empty model";
    return out;
  }
  Simplex<DoubleField> s(model);
  if (!s.run(max_iters)) {
    out.status = SolveStatus::NonTerminated;
    out.detail = "iteration limit " + std::to_string(max_iters) + " exceeded";
    return out;
  }
  double obj = s.objective();
  // scale-aware acceptance of the phase-1 optimum
  double scale = 1.0;
  for (const auto& row : model.rows)
    scale = std::max(scale, std::abs(row.rhs.to_double()));
  if (obj <= kLpTolerance * scale * model.rows.size()) {
    out.status = SolveStatus::Feasible;
    out.values = s.solution();
    for (double& v : out.values)
      if (std::abs(v) < 1e-15) v = 0.0;
    // residual check against the original rows
    double worst = 0.0;
    for (const auto& row : model.rows) {
      double lhs = 0.0;
      for (auto [v, c] : row.coeffs) lhs += c.to_double() * out.values[v];
      double r = lhs - row.rhs.to_double();
      if (row.rel == Rel::Eq)
        worst = std::max(worst, std::abs(r));
      else
        worst = std::max(worst, r);
    }
    out.max_residual = worst;
    out.detail = "phase-1 optimum " + std::to_string(obj);
    return out;
  }
  out.status = SolveStatus::Infeasible;
  out.infeasibility = obj;
  // Row multipliers of the final tableau act as a Farkas-style certificate:
  // y = c_B B^{-1}, read off the slack/artificial columns.
  auto red = s.reduced_costs();
  out.farkas.resize(model.rows.size());
  {
    int slack_at = model.num_vars;
    int art_at = model.num_vars;
    for (const auto& row : model.rows)
      if (row.rel == Rel::Le) ++art_at;
    int si = model.num_vars, ai = art_at;
    for (size_t r = 0; r < model.rows.size(); ++r) {
      if (model.rows[r].rel == Rel::Le)
        out.farkas[r] = -(red[si++] - 0.0);
      else
        out.farkas[r] = -(red[ai++] - 1.0);
    }
    (void)slack_at;
  }
  out.detail = "phase-1 optimum " + std::to_string(obj) + " > 0";
  return out;
}

ExactOutcome solve_feasibility_exact(const LpModel& model,
                                     long long max_iters) {
  ExactOutcome out;
  if (model.rows.empty()) {
    out.status = SolveStatus::Feasible;
    out.values.assign(model.num_vars, Rat(0));
    return out;
  }
  Simplex<RatField> s(model);
  if (!s.run(max_iters)) {
    out.status = SolveStatus::NonTerminated;
    out.detail = "iteration limit exceeded";
    return out;
  }
  if (s.objective() == Rat(0)) {
    out.status = SolveStatus::Feasible;
    out.values = s.solution();
  } else {
    out.status = SolveStatus::Infeasible;
    out.detail = "phase-1 optimum " + s.objective().str();
  }
  return out;
}

Rat max_row_residual(const LpModel& model, const std::vector<Rat>& values) {
  Rat worst(0);
  for (const auto& row : model.rows) {
    Rat lhs(0);
    for (auto [v, c] : row.coeffs) lhs += c * values[v];
    Rat r = lhs - row.rhs;
    if (row.rel == Rel::Eq) {
      if (rat_abs(r) > worst) worst = rat_abs(r);
    } else if (r > worst) {
      worst = r;
    }
  }
  return worst;
}

}  // namespace resched
