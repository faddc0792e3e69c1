#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mixplan/errors.hpp"

namespace mixplan::oracle {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// One tableau row: coefficients over all columns plus the rhs.
struct Tableau {
  int cols = 0;
  std::vector<std::vector<double>> rows;  // m x (cols+1)
  std::vector<double> objective;          // cols+1, last entry = current value
  std::vector<int> basis;                 // basic column per row
};

void pivot(Tableau& t, int prow, int pcol) {
  auto& pr = t.rows[prow];
  double pv = pr[pcol];
  for (double& a : pr) a /= pv;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    if (static_cast<int>(i) == prow) continue;
    double f = t.rows[i][pcol];
    if (f == 0.0) continue;
    for (int j = 0; j <= t.cols; ++j) t.rows[i][j] -= f * pr[j];
  }
  double f = t.objective[pcol];
  if (f != 0.0) {
    for (int j = 0; j <= t.cols; ++j) t.objective[j] -= f * pr[j];
  }
  t.basis[prow] = pcol;
}

// Maximizes t.objective with Bland's rule; `allowed` masks enterable columns.
// Returns false when unbounded.
bool run_simplex(Tableau& t, const std::vector<bool>& allowed) {
  const int iter_cap = 2000 + 200 * (t.cols + static_cast<int>(t.rows.size()));
  for (int it = 0; it < iter_cap; ++it) {
    int pcol = -1;
    for (int j = 0; j < t.cols; ++j) {
      if (!allowed[j]) continue;
      if (t.objective[j] > kEps) {  // reduced profit: entering improves
        pcol = j;
        break;  // Bland: lowest index
      }
    }
    if (pcol < 0) return true;  // optimal
    int prow = -1;
    double best = kInf;
    for (size_t i = 0; i < t.rows.size(); ++i) {
      double a = t.rows[i][pcol];
      if (a > kEps) {
        double ratio = t.rows[i][t.cols] / a;
        if (ratio < best - kEps ||
            (ratio < best + kEps && (prow < 0 || t.basis[i] < t.basis[prow]))) {
          best = ratio;
          prow = static_cast<int>(i);
        }
      }
    }
    if (prow < 0) return false;  // unbounded
    pivot(t, prow, pcol);
  }
  throw NumericalFailure("oracle simplex did not converge");
}

}  // namespace

LpResult dense_simplex(const milp::MilpModel& model) {
  const auto& vars = model.variables();
  const int n = model.num_variables();

  // Shift x = lo + x'; add explicit rows for finite upper bounds.
  std::vector<double> shift(n);
  for (int j = 0; j < n; ++j) {
    if (vars[j].lower == -kInf) throw TooLarge("oracle requires finite lower bounds");
    shift[j] = vars[j].lower;
    if (vars[j].lower > vars[j].upper) return {Status::Infeasible, 0.0, {}};
  }

  struct Row {
    std::vector<double> a;
    char sense;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : model.constraints()) {
    Row r;
    r.a.assign(n, 0.0);
    double adj = 0.0;
    for (auto [j, v] : c.coeffs) {
      r.a[j] = v;
      adj += v * shift[j];
    }
    r.sense = c.sense == milp::Sense::LE ? 'L' : (c.sense == milp::Sense::GE ? 'G' : 'E');
    r.rhs = c.rhs - adj;
    rows.push_back(std::move(r));
  }
  for (int j = 0; j < n; ++j) {
    if (vars[j].upper == kInf) continue;
    Row r;
    r.a.assign(n, 0.0);
    r.a[j] = 1.0;
    r.sense = 'L';
    r.rhs = vars[j].upper - shift[j];
    rows.push_back(std::move(r));
  }
  // Normalize to nonnegative rhs.
  for (auto& r : rows) {
    if (r.rhs < 0) {
      for (double& a : r.a) a = -a;
      r.rhs = -r.rhs;
      if (r.sense == 'L') r.sense = 'G';
      else if (r.sense == 'G') r.sense = 'L';
    }
  }

  const int m = static_cast<int>(rows.size());
  int slack_count = 0, art_count = 0;
  for (const auto& r : rows) {
    if (r.sense != 'E') ++slack_count;
    if (r.sense != 'L') ++art_count;
  }

  Tableau t;
  t.cols = n + slack_count + art_count;
  t.rows.assign(m, std::vector<double>(t.cols + 1, 0.0));
  t.basis.assign(m, -1);
  t.objective.assign(t.cols + 1, 0.0);

  int scol = n, acol = n + slack_count;
  std::vector<int> artificial_cols;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t.rows[i][j] = rows[i].a[j];
    t.rows[i][t.cols] = rows[i].rhs;
    if (rows[i].sense == 'L') {
      t.rows[i][scol] = 1.0;
      t.basis[i] = scol++;
    } else if (rows[i].sense == 'G') {
      t.rows[i][scol++] = -1.0;
      t.rows[i][acol] = 1.0;
      t.basis[i] = acol;
      artificial_cols.push_back(acol++);
    } else {
      t.rows[i][acol] = 1.0;
      t.basis[i] = acol;
      artificial_cols.push_back(acol++);
    }
  }

  std::vector<bool> allowed(t.cols, true);

  if (!artificial_cols.empty()) {
    // Phase 1: maximize -sum(artificials), priced out over the initial basis.
    for (int c : artificial_cols) t.objective[c] = -1.0;
    for (int i = 0; i < m; ++i) {
      if (t.objective[t.basis[i]] != 0.0) {
        double f = t.objective[t.basis[i]];
        for (int j = 0; j <= t.cols; ++j) t.objective[j] -= f * t.rows[i][j];
      }
    }
    if (!run_simplex(t, allowed))
      throw NumericalFailure("oracle phase 1 unbounded");
    // The value cell carries -z, so leftover artificial mass shows up positive.
    if (t.objective[t.cols] > 1e-7) return {Status::Infeasible, 0.0, {}};
    // Drive lingering zero-level artificials out where a pivot exists.
    for (int i = 0; i < m; ++i) {
      if (std::find(artificial_cols.begin(), artificial_cols.end(), t.basis[i]) ==
          artificial_cols.end())
        continue;
      for (int j = 0; j < n + slack_count; ++j) {
        if (std::fabs(t.rows[i][j]) > 1e-7) {
          pivot(t, i, j);
          break;
        }
      }
    }
    for (int c : artificial_cols) allowed[c] = false;
  }

  // Phase 2: restore the real objective, priced out over the current basis.
  std::fill(t.objective.begin(), t.objective.end(), 0.0);
  for (int j = 0; j < n; ++j) t.objective[j] = vars[j].objective;
  for (int i = 0; i < m; ++i) {
    int b = t.basis[i];
    if (b < t.cols && t.objective[b] != 0.0) {
      double f = t.objective[b];
      for (int j = 0; j <= t.cols; ++j) t.objective[j] -= f * t.rows[i][j];
    }
  }
  if (!run_simplex(t, allowed)) return {Status::Unbounded, 0.0, {}};

  LpResult res;
  res.status = Status::Optimal;
  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rows[i][t.cols];
  }
  for (int j = 0; j < n; ++j) res.x[j] += shift[j];
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += vars[j].objective * res.x[j];
  return res;
}

MilpResult enumerate_milp(const milp::MilpModel& model) {
  const auto& vars = model.variables();
  std::vector<int> discrete;
  std::vector<std::vector<double>> choices;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (vars[j].kind == milp::VarKind::Continuous) continue;
    discrete.push_back(j);
    double lo = std::ceil(vars[j].lower - 1e-9);
    double hi = std::floor(vars[j].upper + 1e-9);
    std::vector<double> vals;
    for (double v = lo; v <= hi + 1e-9; v += 1.0) vals.push_back(v);
    if (vals.size() > 4) throw TooLarge("discrete variable with more than 4 feasible values");
    choices.push_back(std::move(vals));
  }
  if (discrete.size() > 12) throw TooLarge("more than 12 discrete variables");
  for (const auto& c : choices) {
    if (c.empty()) return {Status::Infeasible, 0.0, {}};
  }

  MilpResult best;
  best.status = Status::Infeasible;
  bool unbounded = false;

  std::vector<size_t> pick(discrete.size(), 0);

  auto eval = [&](const std::vector<size_t>& sel) {
    milp::MilpModel sub = model;
    // Fix discrete variables by pinning bounds.
    for (size_t k = 0; k < discrete.size(); ++k) {
      sub.set_bounds(discrete[k], choices[k][sel[k]], choices[k][sel[k]]);
    }
    LpResult lp = dense_simplex(sub);
    if (lp.status == Status::Unbounded) {
      unbounded = true;
      return;
    }
    if (lp.status != Status::Optimal) return;
    if (best.status != Status::Optimal || lp.objective > best.objective + 1e-12) {
      best.status = Status::Optimal;
      best.objective = lp.objective;
      best.x = lp.x;
    }
  };

  if (discrete.empty()) {
    eval({});
  } else {
    while (true) {
      eval(pick);
      if (unbounded) break;
      size_t k = 0;
      while (k < pick.size()) {
        if (++pick[k] < choices[k].size()) break;
        pick[k] = 0;
        ++k;
      }
      if (k == pick.size()) break;
    }
  }
  if (unbounded) return {Status::Unbounded, 0.0, {}};
  return best;
}

namespace {

// Greedy unit fill on one machine: cheapest time-per-unit first is exact for
// maximizing a unit count under a single time budget and per-product caps.
int greedy_fill(const DayInstance& inst, int machine, const std::vector<int>& remaining,
                std::map<int, double> y_cap, double hours) {
  const auto& m = inst.machines[machine];
  std::vector<int> order_ids(inst.orders.size());
  for (size_t i = 0; i < inst.orders.size(); ++i) order_ids[i] = static_cast<int>(i);
  std::sort(order_ids.begin(), order_ids.end(), [&](int a, int b) {
    double ta = m.unit_time.count(inst.orders[a].product)
                    ? m.unit_time.at(inst.orders[a].product)
                    : kInf;
    double tb = m.unit_time.count(inst.orders[b].product)
                    ? m.unit_time.at(inst.orders[b].product)
                    : kInf;
    if (ta != tb) return ta < tb;
    return a < b;
  });
  int total = 0;
  for (int oi : order_ids) {
    int f = inst.orders[oi].product;
    auto it = m.unit_time.find(f);
    if (it == m.unit_time.end()) continue;
    double t = it->second;
    double cap = y_cap.count(f) ? y_cap[f] : kInf;
    int can = remaining[oi];
    can = std::min<int>(can, static_cast<int>(std::floor(cap + 1e-9)));
    can = std::min<int>(can, static_cast<int>(std::floor(hours / t + 1e-9)));
    if (can <= 0) continue;
    total += can;
    hours -= can * t;
    if (y_cap.count(f)) y_cap[f] -= can;
  }
  return total;
}

}  // namespace

int best_day_assignment(const DayInstance& inst) {
  if (inst.orders.size() > 3 || inst.machines.size() > 2)
    throw TooLarge("day-assignment oracle caps exceeded");
  for (const auto& o : inst.orders) {
    if (o.quantity < 0 || o.quantity > 100) throw TooLarge("quantities must be in [0,100]");
  }
  if (inst.machines.empty()) return 0;

  const int n = static_cast<int>(inst.orders.size());
  int best = 0;

  // Enumerate every integral allocation on machine 0; fill machine 1 greedily
  // with the remainder (exact for a single remaining budget).
  std::vector<int> alloc(n, 0);
  std::function<void(int, double, std::map<int, double>)> rec =
      [&](int idx, double hours_left, std::map<int, double> y_left) {
        if (idx == n) {
          int placed = 0;
          for (int v : alloc) placed += v;
          std::vector<int> remaining(n);
          for (int i = 0; i < n; ++i) remaining[i] = inst.orders[i].quantity - alloc[i];
          int second = 0;
          if (inst.machines.size() > 1)
            second = greedy_fill(inst, 1, remaining, inst.machines[1].y_cap,
                                 inst.machines[1].capacity_hours);
          best = std::max(best, placed + second);
          return;
        }
        int f = inst.orders[idx].product;
        const auto& m0 = inst.machines[0];
        auto it = m0.unit_time.find(f);
        int hi = 0;
        double t = 0.0;
        if (it != m0.unit_time.end()) {
          t = it->second;
          double cap = y_left.count(f) ? y_left[f] : kInf;
          hi = inst.orders[idx].quantity;
          hi = std::min<int>(hi, static_cast<int>(std::floor(cap + 1e-9)));
          hi = std::min<int>(hi, static_cast<int>(std::floor(hours_left / t + 1e-9)));
        }
        for (int v = 0; v <= hi; ++v) {
          alloc[idx] = v;
          auto y2 = y_left;
          if (y2.count(f)) y2[f] -= v;
          rec(idx + 1, hours_left - v * t, y2);
        }
        alloc[idx] = 0;
      };
  rec(0, inst.machines[0].capacity_hours, inst.machines[0].y_cap);
  return best;
}

}  // namespace mixplan::oracle
