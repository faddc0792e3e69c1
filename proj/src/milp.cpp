#include "mixplan/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <future>
#include <memory>
#include <ostream>
#include <queue>

#include "mixplan/errors.hpp"
#include "mixplan/log.hpp"

namespace mixplan::milp {

namespace {

constexpr double kPivotTol = 1e-9;     // reject pivots smaller than this
constexpr double kDualTol = 1e-8;      // reduced-cost significance
constexpr double kDegenStep = 1e-10;   // step sizes below this count as degenerate
constexpr int kBlandTrigger = 10;      // consecutive degenerate pivots before Bland
constexpr int kRefactorEvery = 250;    // eta-file length bound

double bound_tol(double v) { return 1e-7 * (1.0 + std::fabs(v)); }

/// Dense LU factorization with partial pivoting (row-major, in place).
class LuFactor {
 public:
  void factor(std::vector<double> dense, int m) {
    m_ = m;
    lu_ = std::move(dense);
    perm_.resize(m);
    for (int i = 0; i < m; ++i) perm_[i] = i;
    for (int k = 0; k < m; ++k) {
      int piv = k;
      double best = std::fabs(lu_[k * m + k]);
      for (int i = k + 1; i < m; ++i) {
        double a = std::fabs(lu_[i * m + k]);
        if (a > best) {
          best = a;
          piv = i;
        }
      }
      if (best < 1e-11) throw NumericalFailure("singular basis during refactorization");
      if (piv != k) {
        for (int j = 0; j < m; ++j) std::swap(lu_[k * m + j], lu_[piv * m + j]);
        std::swap(perm_[k], perm_[piv]);
      }
      const double d = lu_[k * m + k];
      for (int i = k + 1; i < m; ++i) {
        double f = lu_[i * m + k] / d;
        lu_[i * m + k] = f;
        if (f == 0.0) continue;
        const double* rk = &lu_[k * m];
        double* ri = &lu_[i * m];
        for (int j = k + 1; j < m; ++j) ri[j] -= f * rk[j];
      }
    }
  }

  // Solves B w = v.
  void solve(std::vector<double>& v, std::vector<double>& scratch) const {
    const int m = m_;
    scratch.resize(m);
    for (int i = 0; i < m; ++i) scratch[i] = v[perm_[i]];
    for (int i = 0; i < m; ++i) {
      double s = scratch[i];
      if (s == 0.0) continue;
      const double* ri = &lu_[i * m];
      for (int j = i + 1; j < m; ++j) scratch[j] -= lu_[j * m + i] * s;
      (void)ri;
    }
    for (int i = m - 1; i >= 0; --i) {
      double s = scratch[i];
      const double* ri = &lu_[i * m];
      for (int j = i + 1; j < m; ++j) s -= ri[j] * scratch[j];
      scratch[i] = s / ri[i];
    }
    v = scratch;
  }

  // Solves B^T y = c.
  void solve_transposed(std::vector<double>& c, std::vector<double>& scratch) const {
    const int m = m_;
    scratch = c;
    // U^T z = c  (forward, non-unit diagonal)
    for (int i = 0; i < m; ++i) {
      double s = scratch[i];
      const double* ri = &lu_[i * m];
      s /= ri[i];
      scratch[i] = s;
      if (s == 0.0) continue;
      for (int j = i + 1; j < m; ++j) scratch[j] -= ri[j] * s;
    }
    // L^T w = z  (backward, unit diagonal)
    for (int i = m - 1; i >= 0; --i) {
      double s = scratch[i];
      if (s == 0.0) continue;
      for (int j = 0; j < i; ++j) scratch[j] -= lu_[i * m + j] * s;
    }
    for (int i = 0; i < m; ++i) c[perm_[i]] = scratch[i];
  }

 private:
  int m_ = 0;
  std::vector<double> lu_;
  std::vector<int> perm_;
};

enum class VStatus : unsigned char { Basic, AtLower, AtUpper, Free };

struct Eta {
  int row;
  std::vector<double> col;  // col[row] = 1/w_r, col[i] = -w_i/w_r
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Normalized instance shared by every node solve: structural columns plus one
/// slack per row (coefficient +1; slack bounds encode the row sense).
struct Norm {
  int n = 0;  // structural variables
  int m = 0;  // rows
  std::vector<std::vector<std::pair<int, double>>> cols;  // structural sparse columns
  std::vector<double> obj;                                // structural objective
  std::vector<double> rhs;
  std::vector<double> lo, up;  // length n + m (slacks appended)
  std::vector<double> root_lo, root_up;

  explicit Norm(const MilpModel& model) {
    n = model.num_variables();
    m = model.num_constraints();
    cols.assign(n, {});
    obj.resize(n);
    lo.resize(n + m);
    up.resize(n + m);
    for (int j = 0; j < n; ++j) {
      const auto& v = model.variables()[j];
      obj[j] = v.objective;
      lo[j] = v.lower;
      up[j] = v.upper;
    }
    rhs.resize(m);
    for (int i = 0; i < m; ++i) {
      const auto& row = model.constraints()[i];
      rhs[i] = row.rhs;
      for (auto [j, a] : row.coeffs) cols[j].push_back({i, a});
      switch (row.sense) {
        case Sense::LE:
          lo[n + i] = 0.0;
          up[n + i] = kInf;
          break;
        case Sense::GE:
          lo[n + i] = -kInf;
          up[n + i] = 0.0;
          break;
        case Sense::EQ:
          lo[n + i] = 0.0;
          up[n + i] = 0.0;
          break;
      }
    }
    root_lo = lo;
    root_up = up;
  }

  int total() const { return n + m; }
};

/// Bounded-variable primal simplex with a dense-LU base factorization and a
/// product-form eta file. Keeps its basis across solves so branch-and-bound
/// nodes restart from the previous vertex.
class Simplex {
 public:
  explicit Simplex(const Norm& norm) : nm_(norm) { reset(); }

  void reset() {
    const int N = nm_.total();
    status_.assign(N, VStatus::AtLower);
    x_.assign(N, 0.0);
    basic_.resize(nm_.m);
    row_of_.assign(N, -1);
    for (int i = 0; i < nm_.m; ++i) {
      basic_[i] = nm_.n + i;
      row_of_[nm_.n + i] = i;
      status_[nm_.n + i] = VStatus::Basic;
    }
    etas_.clear();
    identity_base_ = true;
    cold_ = true;
  }

  /// lo/up must have length n+m (structural bounds possibly tightened by
  /// branching; slack bounds fixed by row senses).
  LpStatus solve(const std::vector<double>& lo, const std::vector<double>& up,
                 std::int64_t iter_cap) {
    lo_ = &lo;
    up_ = &up;
    iter_cap_ = iter_cap;
    iters_ = 0;
    degen_streak_ = 0;
    bland_ = false;

    if (cold_) {
      cold_ = false;
    }
    snap_nonbasic();
    compute_basics();

    for (int repair = 0; repair < 3; ++repair) {
      LpStatus s1 = phase1();
      if (s1 != LpStatus::Optimal) return s1;
      LpStatus s2 = phase2();
      if (s2 == LpStatus::Unbounded) return s2;
      // Fresh recompute; go back to phase 1 if drift broke feasibility.
      refactor();
      compute_basics();
      if (total_infeasibility() <= 1e-7) return LpStatus::Optimal;
      log::debug("simplex: feasibility drift, repair round ", repair + 1);
    }
    throw NumericalFailure("simplex could not hold feasibility after repair rounds");
  }

  double objective() const {
    double z = 0.0;
    for (int j = 0; j < nm_.n; ++j) z += nm_.obj[j] * x_[j];
    return z;
  }

  const std::vector<double>& values() const { return x_; }

 private:
  const Norm& nm_;
  const std::vector<double>* lo_ = nullptr;
  const std::vector<double>* up_ = nullptr;

  std::vector<VStatus> status_;
  std::vector<double> x_;
  std::vector<int> basic_;
  std::vector<int> row_of_;

  LuFactor factor_;
  bool identity_base_ = true;
  std::vector<Eta> etas_;
  bool cold_ = true;

  std::int64_t iter_cap_ = 0;
  std::int64_t iters_ = 0;
  int degen_streak_ = 0;
  bool bland_ = false;

  // scratch
  std::vector<double> work_, scratch_, duals_;

  double lob(int j) const { return (*lo_)[j]; }
  double upb(int j) const { return (*up_)[j]; }

  bool is_fixed(int j) const { return lob(j) == upb(j); }

  void snap_nonbasic() {
    for (int j = 0; j < nm_.total(); ++j) {
      if (status_[j] == VStatus::Basic) continue;
      double l = lob(j), u = upb(j);
      if (l == -kInf && u == kInf) {
        status_[j] = VStatus::Free;
        x_[j] = 0.0;
        continue;
      }
      if (status_[j] == VStatus::AtUpper && u < kInf) {
        x_[j] = u;
      } else if (l > -kInf) {
        status_[j] = VStatus::AtLower;
        x_[j] = l;
      } else {
        status_[j] = VStatus::AtUpper;
        x_[j] = u;
      }
    }
  }

  // w = B^-1 v (dense v, in place)
  void ftran(std::vector<double>& v) {
    if (!identity_base_) factor_.solve(v, scratch_);
    for (const Eta& e : etas_) {
      double t = v[e.row];
      if (t == 0.0) continue;
      const double* c = e.col.data();
      for (int i = 0; i < nm_.m; ++i) v[i] += c[i] * t;
      v[e.row] = c[e.row] * t;
    }
  }

  // y such that y^T B = g^T (dense g, in place)
  void btran(std::vector<double>& g) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const Eta& e = *it;
      double s = 0.0;
      const double* c = e.col.data();
      for (int i = 0; i < nm_.m; ++i) s += c[i] * g[i];
      g[e.row] = s;
    }
    if (!identity_base_) factor_.solve_transposed(g, scratch_);
  }

  double column_dot(int j, const std::vector<double>& y) const {
    if (j >= nm_.n) return y[j - nm_.n];
    double s = 0.0;
    for (auto [r, a] : nm_.cols[j]) s += a * y[r];
    return s;
  }

  void scatter_column(int j, std::vector<double>& v) const {
    std::fill(v.begin(), v.end(), 0.0);
    if (j >= nm_.n) {
      v[j - nm_.n] = 1.0;
    } else {
      for (auto [r, a] : nm_.cols[j]) v[r] = a;
    }
  }

  void compute_basics() {
    std::vector<double> r = nm_.rhs;
    for (int j = 0; j < nm_.total(); ++j) {
      if (status_[j] == VStatus::Basic || x_[j] == 0.0) continue;
      if (j >= nm_.n) {
        r[j - nm_.n] -= x_[j];
      } else {
        for (auto [row, a] : nm_.cols[j]) r[row] -= a * x_[j];
      }
    }
    ftran(r);
    for (int i = 0; i < nm_.m; ++i) x_[basic_[i]] = r[i];
  }

  void refactor() {
    if (nm_.m == 0) {
      etas_.clear();
      identity_base_ = true;
      return;
    }
    std::vector<double> dense(static_cast<size_t>(nm_.m) * nm_.m, 0.0);
    bool ident = true;
    for (int i = 0; i < nm_.m; ++i) {
      int j = basic_[i];
      if (j != nm_.n + i) ident = false;
      if (j >= nm_.n) {
        dense[static_cast<size_t>(j - nm_.n) * nm_.m + i] = 1.0;
      } else {
        for (auto [r, a] : nm_.cols[j]) dense[static_cast<size_t>(r) * nm_.m + i] = a;
      }
    }
    etas_.clear();
    if (ident) {
      identity_base_ = true;
      return;
    }
    factor_.factor(std::move(dense), nm_.m);
    identity_base_ = false;
  }

  double infeasibility(int j) const {
    double v = x_[j];
    double l = lob(j), u = upb(j);
    if (v < l - bound_tol(l)) return l - v;
    if (v > u + bound_tol(u)) return -(v - u);
    return 0.0;  // sign: positive = below lower, negative = above upper
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < nm_.m; ++i) s += std::fabs(infeasibility(basic_[i]));
    return s;
  }

  void bump_iteration(double step) {
    ++iters_;
    if (iters_ > iter_cap_)
      throw NumericalFailure("simplex iteration cap exceeded (" + std::to_string(iter_cap_) + ")");
    if (step <= kDegenStep) {
      if (++degen_streak_ >= kBlandTrigger) bland_ = true;
    } else {
      degen_streak_ = 0;
      bland_ = false;
    }
    if (static_cast<int>(etas_.size()) >= kRefactorEvery) {
      refactor();
      compute_basics();
    }
  }

  struct Entering {
    int j = -1;
    int dir = 0;  // +1 increase, -1 decrease
  };

  /// Dantzig pricing (Bland when anti-cycling is active) against an arbitrary
  /// basic cost vector; phase 1 passes the infeasibility gradient, phase 2 the
  /// true objective.
  Entering price(const std::vector<double>& cost_basic, bool phase2) {
    duals_.assign(nm_.m, 0.0);
    for (int i = 0; i < nm_.m; ++i) duals_[i] = cost_basic[i];
    btran(duals_);

    Entering best;
    double best_score = kDualTol;
    for (int j = 0; j < nm_.total(); ++j) {
      if (status_[j] == VStatus::Basic || is_fixed(j)) continue;
      double cj = (phase2 && j < nm_.n) ? nm_.obj[j] : 0.0;
      double d = cj - column_dot(j, duals_);
      int dir = 0;
      if (status_[j] == VStatus::AtLower && d > kDualTol) dir = +1;
      else if (status_[j] == VStatus::AtUpper && d < -kDualTol) dir = -1;
      else if (status_[j] == VStatus::Free && std::fabs(d) > kDualTol) dir = d > 0 ? +1 : -1;
      if (dir == 0) continue;
      if (bland_) return {j, dir};
      double score = std::fabs(d);
      if (score > best_score + 1e-15) {
        best_score = score;
        best = {j, dir};
      }
    }
    return best;
  }

  struct Ratio {
    double step = kInf;
    int row = -1;          // leaving row; -1 = entering flips to its other bound
    bool to_upper = false;  // which bound the leaver lands on
  };

  /// Min-ratio test. In phase 1 infeasible basics block at the bound they
  /// violate (they re-enter the feasible range there); basics moving deeper
  /// into infeasibility never block because the priced gradient already nets
  /// their growth against the shrinking violations.
  Ratio ratio_test(int j, int dir, const std::vector<double>& w, bool phase1) {
    Ratio best;
    double own = upb(j) - lob(j);
    if (status_[j] == VStatus::Free) own = kInf;
    best.step = own;

    double tmin = own;
    for (int i = 0; i < nm_.m; ++i) {
      double wi = w[i];
      if (std::fabs(wi) < kPivotTol) continue;
      int b = basic_[i];
      double delta = -dir * wi;  // basic value change per unit step
      double v = x_[b];
      double l = lob(b), u = upb(b);
      double inf = phase1 ? infeasibility(b) : 0.0;
      double t;
      if (inf > 0.0) {  // below lower
        if (delta <= 0.0) continue;
        t = (l - v) / delta;
      } else if (inf < 0.0) {  // above upper
        if (delta >= 0.0) continue;
        t = (u - v) / delta;
      } else if (delta > 0.0) {
        if (u == kInf) continue;
        t = (u - v) / delta;
      } else {
        if (l == -kInf) continue;
        t = (l - v) / delta;
      }
      if (t < 0.0) t = 0.0;
      if (t < tmin) tmin = t;
    }

    if (tmin == kInf) return best;  // unbounded direction

    // Second pass: among blocks within tolerance of the minimum pick the most
    // stable pivot (largest |w|); Bland mode picks the lowest variable id.
    best.step = tmin;
    best.row = -1;
    double best_w = 0.0;
    int best_id = std::numeric_limits<int>::max();
    for (int i = 0; i < nm_.m; ++i) {
      double wi = w[i];
      if (std::fabs(wi) < kPivotTol) continue;
      int b = basic_[i];
      double delta = -dir * wi;
      double v = x_[b];
      double l = lob(b), u = upb(b);
      double inf = phase1 ? infeasibility(b) : 0.0;
      double t;
      bool lands_upper;
      if (inf > 0.0) {
        if (delta <= 0.0) continue;
        t = (l - v) / delta;
        lands_upper = false;
      } else if (inf < 0.0) {
        if (delta >= 0.0) continue;
        t = (u - v) / delta;
        lands_upper = true;
      } else if (delta > 0.0) {
        if (u == kInf) continue;
        t = (u - v) / delta;
        lands_upper = true;
      } else {
        if (l == -kInf) continue;
        t = (l - v) / delta;
        lands_upper = false;
      }
      if (t < 0.0) t = 0.0;
      if (t > tmin + 1e-9) continue;
      if (bland_) {
        if (b < best_id) {
          best_id = b;
          best.row = i;
          best.to_upper = lands_upper;
        }
      } else if (std::fabs(wi) > best_w + 1e-15 ||
                 (std::fabs(wi) > best_w - 1e-15 && b < best_id)) {
        best_w = std::fabs(wi);
        best_id = b;
        best.row = i;
        best.to_upper = lands_upper;
      }
    }
    if (best.row == -1) best.step = own;  // only the entering bound blocks
    return best;
  }

  void apply_step(int j, int dir, const std::vector<double>& w, const Ratio& r) {
    double t = std::max(r.step, 0.0);
    if (t > 0.0) {
      for (int i = 0; i < nm_.m; ++i) {
        if (w[i] != 0.0) x_[basic_[i]] -= dir * t * w[i];
      }
      x_[j] += dir * t;
    }
    if (r.row < 0) {
      // bound flip
      status_[j] = (dir > 0) ? VStatus::AtUpper : VStatus::AtLower;
      x_[j] = (dir > 0) ? upb(j) : lob(j);
      bump_iteration(t);
      return;
    }
    int leaver = basic_[r.row];
    status_[leaver] = r.to_upper ? VStatus::AtUpper : VStatus::AtLower;
    x_[leaver] = r.to_upper ? upb(leaver) : lob(leaver);
    row_of_[leaver] = -1;
    basic_[r.row] = j;
    row_of_[j] = r.row;
    status_[j] = VStatus::Basic;

    Eta e;
    e.row = r.row;
    e.col.assign(nm_.m, 0.0);
    double wr = w[r.row];
    for (int i = 0; i < nm_.m; ++i) e.col[i] = -w[i] / wr;
    e.col[r.row] = 1.0 / wr;
    etas_.push_back(std::move(e));
    bump_iteration(t);
  }

  LpStatus phase1() {
    std::vector<double> g(nm_.m, 0.0);
    while (true) {
      double total = 0.0;
      for (int i = 0; i < nm_.m; ++i) {
        double inf = infeasibility(basic_[i]);
        g[i] = inf > 0.0 ? 1.0 : (inf < 0.0 ? -1.0 : 0.0);
        total += std::fabs(inf);
      }
      if (total <= 1e-7) return LpStatus::Optimal;

      Entering e = price(g, /*phase2=*/false);
      if (e.j < 0) return LpStatus::Infeasible;

      work_.assign(nm_.m, 0.0);
      scatter_column(e.j, work_);
      ftran(work_);
      Ratio r = ratio_test(e.j, e.dir, work_, /*phase1=*/true);
      if (r.step == kInf)
        throw NumericalFailure("phase-1 direction unblocked; inconsistent pricing");
      apply_step(e.j, e.dir, work_, r);
    }
  }

  LpStatus phase2() {
    std::vector<double> cb(nm_.m, 0.0);
    while (true) {
      for (int i = 0; i < nm_.m; ++i) {
        int b = basic_[i];
        cb[i] = b < nm_.n ? nm_.obj[b] : 0.0;
      }
      Entering e = price(cb, /*phase2=*/true);
      if (e.j < 0) return LpStatus::Optimal;

      work_.assign(nm_.m, 0.0);
      scatter_column(e.j, work_);
      ftran(work_);
      Ratio r = ratio_test(e.j, e.dir, work_, /*phase1=*/false);
      if (r.step == kInf) return LpStatus::Unbounded;
      apply_step(e.j, e.dir, work_, r);
    }
  }
};

struct Node {
  std::int64_t id = 0;
  int parent = -1;  // index into the arena
  int var = -1;     // branched variable
  double lo = 0.0, hi = 0.0;
  double bound = kInf;  // parent LP objective (upper bound for maximization)
  int depth = 0;
};

struct OpenNode {
  double bound;
  std::int64_t id;
  int arena_index;
  bool operator<(const OpenNode& o) const {
    if (bound != o.bound) return bound < o.bound;
    return id < o.id;  // newest first among equal bounds -> dives
  }
};

std::vector<int> discrete_variables(const MilpModel& model) {
  std::vector<int> idx;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind != VarKind::Continuous) idx.push_back(j);
  }
  return idx;
}

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

int MilpModel::add_variable(std::string name, double lower, double upper, VarKind kind,
                            double objective) {
  Variable v;
  v.name = std::move(name);
  v.lower = lower;
  v.upper = upper;
  v.kind = kind;
  v.objective = objective;
  vars_.push_back(std::move(v));
  return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_constraint(std::string name, std::vector<std::pair<int, double>> coeffs,
                              Sense sense, double rhs) {
  Constraint c;
  c.name = std::move(name);
  c.coeffs = std::move(coeffs);
  c.sense = sense;
  c.rhs = rhs;
  rows_.push_back(std::move(c));
  return static_cast<int>(rows_.size()) - 1;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double z = 0.0;
  for (size_t j = 0; j < vars_.size() && j < x.size(); ++j) z += vars_[j].objective * x[j];
  return z;
}

void MilpModel::validate() const {
  std::vector<std::string> issues;
  for (size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (v.lower > v.upper)
      issues.push_back("variable " + v.name + ": lower > upper");
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
      issues.push_back("variable " + v.name + ": binary bounds must lie in [0,1]");
  }
  for (const auto& row : rows_) {
    for (auto [j, a] : row.coeffs) {
      if (j < 0 || j >= static_cast<int>(vars_.size()))
        issues.push_back("constraint " + row.name + ": coefficient on unknown variable");
      else if (a == 0.0)
        issues.push_back("constraint " + row.name + ": explicit zero coefficient");
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

double max_residual(const MilpModel& model, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : model.constraints()) {
    double act = 0.0;
    for (auto [j, a] : row.coeffs) act += a * x[j];
    double r = 0.0;
    switch (row.sense) {
      case Sense::LE: r = act - row.rhs; break;
      case Sense::GE: r = row.rhs - act; break;
      case Sense::EQ: r = std::fabs(act - row.rhs); break;
    }
    worst = std::max(worst, r);
  }
  for (size_t j = 0; j < model.variables().size(); ++j) {
    const auto& v = model.variables()[j];
    worst = std::max(worst, v.lower - x[j]);
    worst = std::max(worst, x[j] - v.upper);
  }
  return worst;
}

MilpSolution solve_lp(const MilpModel& model) {
  model.validate();
  Norm norm(model);
  Simplex simplex(norm);
  std::int64_t cap = 50LL * (norm.n + norm.m) + 200;

  MilpSolution out;
  out.nodes_explored = 1;
  for (int j = 0; j < norm.n; ++j) {
    if (norm.lo[j] > norm.up[j]) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
  }
  LpStatus s = simplex.solve(norm.lo, norm.up, cap);
  switch (s) {
    case LpStatus::Infeasible:
      out.status = SolveStatus::Infeasible;
      return out;
    case LpStatus::Unbounded:
      out.status = SolveStatus::Unbounded;
      return out;
    case LpStatus::Optimal:
      break;
  }
  out.status = SolveStatus::Optimal;
  out.values.assign(simplex.values().begin(), simplex.values().begin() + norm.n);
  out.objective = model.objective_value(out.values);
  out.gap = 0.0;
  double resid = max_residual(model, out.values);
  if (resid > 1e-6)
    throw NumericalFailure("LP residual " + std::to_string(resid) + " exceeds tolerance");
  return out;
}

namespace {

struct NodeResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = -kInf;
  std::vector<double> values;
};

NodeResult solve_node(Simplex& simplex, const Norm& norm, const std::vector<double>& lo,
                      const std::vector<double>& up, std::int64_t cap) {
  NodeResult res;
  for (int j = 0; j < norm.n; ++j) {
    if (lo[j] > up[j]) {
      res.status = LpStatus::Infeasible;
      return res;
    }
  }
  res.status = simplex.solve(lo, up, cap);
  if (res.status == LpStatus::Optimal) {
    res.values.assign(simplex.values().begin(), simplex.values().begin() + norm.n);
    res.objective = 0.0;
    for (int j = 0; j < norm.n; ++j) res.objective += norm.obj[j] * res.values[j];
  }
  return res;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpLimits& limits) {
  model.validate();
  Norm norm(model);
  std::vector<int> discrete = discrete_variables(model);
  const std::int64_t cap = 50LL * (norm.n + norm.m) + 200;
  const auto t0 = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
           limits.time_limit;
  };

  std::vector<Node> arena;
  arena.push_back({});  // root: no bound change
  arena[0].bound = kInf;

  std::priority_queue<OpenNode> open;
  open.push({kInf, 0, 0});

  bool have_incumbent = false;
  std::vector<double> best_values;
  double best_obj = -kInf;
  std::int64_t explored = 0;
  std::int64_t next_id = 1;
  bool hit_limit = false;

  const int workers = std::max(1, limits.workers);
  std::vector<std::unique_ptr<Simplex>> solvers;
  for (int w = 0; w < workers; ++w) solvers.push_back(std::make_unique<Simplex>(norm));

  std::vector<double> lo = norm.root_lo, up = norm.root_up;
  auto materialize_bounds = [&](int arena_index) {
    lo = norm.root_lo;
    up = norm.root_up;
    static thread_local std::vector<int> path;
    path.clear();
    for (int i = arena_index; i > 0; i = arena[i].parent) path.push_back(i);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const Node& nd = arena[*it];
      lo[nd.var] = std::max(lo[nd.var], nd.lo);
      up[nd.var] = std::min(up[nd.var], nd.hi);
    }
  };

  auto fractionality = [&](const std::vector<double>& x, int j) {
    double f = x[j] - std::floor(x[j]);
    return std::min(f, 1.0 - f);
  };

  bool root_unbounded = false;

  while (!open.empty()) {
    if (explored >= limits.max_nodes || out_of_time()) {
      hit_limit = true;
      break;
    }

    // Collect up to `workers` non-prunable nodes; solve them, then process the
    // results in pop order so the search tree does not depend on thread timing.
    std::vector<OpenNode> batch;
    while (!open.empty() && static_cast<int>(batch.size()) < workers) {
      OpenNode top = open.top();
      open.pop();
      if (have_incumbent && top.bound <= best_obj + 1e-9) continue;  // pruned by bound
      batch.push_back(top);
    }
    if (batch.empty()) break;

    std::vector<NodeResult> results(batch.size());
    if (batch.size() == 1) {
      materialize_bounds(batch[0].arena_index);
      results[0] = solve_node(*solvers[0], norm, lo, up, cap);
    } else {
      std::vector<std::future<NodeResult>> futs;
      std::vector<std::vector<double>> los(batch.size()), ups(batch.size());
      for (size_t b = 0; b < batch.size(); ++b) {
        materialize_bounds(batch[b].arena_index);
        los[b] = lo;
        ups[b] = up;
      }
      for (size_t b = 0; b < batch.size(); ++b) {
        futs.push_back(std::async(std::launch::async,
                                  [&, b] { return solve_node(*solvers[b], norm, los[b], ups[b], cap); }));
      }
      for (size_t b = 0; b < batch.size(); ++b) results[b] = futs[b].get();
    }

    for (size_t b = 0; b < batch.size(); ++b) {
      ++explored;
      const NodeResult& res = results[b];
      const int arena_index = batch[b].arena_index;
      if (res.status == LpStatus::Infeasible) continue;
      if (res.status == LpStatus::Unbounded) {
        root_unbounded = true;
        break;
      }
      if (have_incumbent && res.objective <= best_obj + 1e-9) continue;

      // Most fractional discrete variable; ties to the lowest id.
      int branch_var = -1;
      double worst = limits.integrality_tol;
      for (int j : discrete) {
        double f = fractionality(res.values, j);
        if (f > worst + 1e-15) {
          worst = f;
          branch_var = j;
        }
      }

      if (branch_var < 0) {
        // Integer feasible. Ties resolve to the lexicographically smallest
        // value vector so the reported incumbent is search-order independent.
        if (!have_incumbent || res.objective > best_obj + 1e-12 ||
            (std::fabs(res.objective - best_obj) <= 1e-12 && lex_less(res.values, best_values))) {
          best_obj = res.objective;
          best_values = res.values;
          have_incumbent = true;
        }
        continue;
      }

      double v = res.values[branch_var];
      Node down;
      down.id = next_id++;
      down.parent = arena_index;
      down.var = branch_var;
      down.lo = -kInf;
      down.hi = std::floor(v);
      down.bound = res.objective;
      down.depth = arena[arena_index].depth + 1;
      Node upn = down;
      upn.id = next_id++;
      upn.lo = std::ceil(v);
      upn.hi = kInf;
      arena.push_back(down);
      open.push({down.bound, down.id, static_cast<int>(arena.size()) - 1});
      arena.push_back(upn);
      open.push({upn.bound, upn.id, static_cast<int>(arena.size()) - 1});
    }
    if (root_unbounded) break;
  }

  MilpSolution out;
  out.nodes_explored = explored;
  if (root_unbounded) {
    out.status = SolveStatus::Unbounded;
    return out;
  }

  double open_bound = -kInf;
  while (!open.empty()) {
    open_bound = std::max(open_bound, open.top().bound);
    open.pop();
  }

  if (!have_incumbent) {
    if (hit_limit)
      throw NoIncumbentAtLimit("node/time limit reached with no integer-feasible point");
    out.status = SolveStatus::Infeasible;
    return out;
  }

  out.values = best_values;
  out.objective = model.objective_value(best_values);
  double bound = std::max(best_obj, open_bound);
  out.gap = hit_limit ? std::max(0.0, (bound - best_obj) / std::max(1.0, std::fabs(best_obj)))
                      : 0.0;
  out.status = (out.gap <= limits.gap_tol) ? SolveStatus::Optimal : SolveStatus::Feasible;

  double resid = max_residual(model, out.values);
  if (resid > limits.feasibility_tol)
    throw NumericalFailure("incumbent residual " + std::to_string(resid) +
                           " exceeds feasibility tolerance");
  return out;
}

void write_lp(const MilpModel& model, std::ostream& os) {
  auto name_of = [&](int j) {
    const auto& v = model.variables()[j];
    return v.name.empty() ? "x" + std::to_string(j) : v.name;
  };
  os << "\\ mixplan model dump\nMaximize\n obj:";
  bool first = true;
  for (int j = 0; j < model.num_variables(); ++j) {
    double c = model.variables()[j].objective;
    if (c == 0.0) continue;
    os << (c >= 0 && !first ? " + " : " ") << c << " " << name_of(j);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  int ci = 0;
  for (const auto& row : model.constraints()) {
    std::string rn = row.name.empty() ? "c" + std::to_string(ci) : row.name;
    os << " " << rn << ":";
    bool f2 = true;
    for (auto [j, a] : row.coeffs) {
      os << (a >= 0 && !f2 ? " + " : " ") << a << " " << name_of(j);
      f2 = false;
    }
    if (f2) os << " 0";
    switch (row.sense) {
      case Sense::LE: os << " <= "; break;
      case Sense::GE: os << " >= "; break;
      case Sense::EQ: os << " = "; break;
    }
    os << row.rhs << "\n";
    ++ci;
  }
  os << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[j];
    if (v.lower == v.upper) {
      os << " " << name_of(j) << " = " << v.lower << "\n";
    } else if (v.upper == kInf) {
      os << " " << name_of(j) << " >= " << v.lower << "\n";
    } else {
      os << " " << v.lower << " <= " << name_of(j) << " <= " << v.upper << "\n";
    }
  }
  bool any_gen = false, any_bin = false;
  for (const auto& v : model.variables()) {
    any_gen |= v.kind == VarKind::Integer;
    any_bin |= v.kind == VarKind::Binary;
  }
  if (any_gen) {
    os << "Generals\n";
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variables()[j].kind == VarKind::Integer) os << " " << name_of(j) << "\n";
  }
  if (any_bin) {
    os << "Binaries\n";
    for (int j = 0; j < model.num_variables(); ++j)
      if (model.variables()[j].kind == VarKind::Binary) os << " " << name_of(j) << "\n";
  }
  os << "End\n";
}

}  // namespace mixplan::milp
