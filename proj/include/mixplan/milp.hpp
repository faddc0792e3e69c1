#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mixplan::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary, Integer };

enum class Sense { LE, GE, EQ };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  double objective = 0.0;
};

/// One linear row. Coefficient maps are sparse: no explicit zeros.
struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

/// A bounded-variable MILP, always maximizing.
class MilpModel {
 public:
  int add_variable(std::string name, double lower, double upper, VarKind kind, double objective);
  int add_constraint(std::string name, std::vector<std::pair<int, double>> coeffs, Sense sense,
                     double rhs);

  /// Tightens or replaces a variable's bounds (used to pin values).
  void set_bounds(int var, double lower, double upper) {
    vars_[var].lower = lower;
    vars_[var].upper = upper;
  }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  /// Objective value of an assignment (dense, indexed by variable).
  double objective_value(const std::vector<double>& x) const;

  /// Checks bounds consistency and coefficient hygiene; throws ValidationError.
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

struct MilpLimits {
  std::int64_t max_nodes = 100000;
  double time_limit = 300.0;       // seconds
  double feasibility_tol = 1e-6;
  double integrality_tol = 1e-6;
  double gap_tol = 1e-6;           // relative
  int workers = 1;                 // branch-and-bound node evaluators
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded };

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;  // indexed by variable id
  double objective = 0.0;
  double gap = 0.0;            // relative; 0 for proven optima
  std::int64_t nodes_explored = 0;
};

const char* to_string(SolveStatus s);

/// Solves the LP relaxation (integrality dropped). Returns a vertex solution.
/// Throws NumericalFailure if pivoting stalls beyond 50*(vars+constraints)
/// iterations.
MilpSolution solve_lp(const MilpModel& model);

/// Best-bound branch and bound over the integer/binary variables. Branching
/// picks the most fractional variable (ties: lowest variable id). Hitting the
/// node or time limit with an incumbent yields status Feasible with the
/// remaining gap; with no incumbent it throws NoIncumbentAtLimit.
MilpSolution solve_milp(const MilpModel& model, const MilpLimits& limits = {});

/// Writes the model in LP text format (objective, rows, bounds, generals,
/// binaries). Meant for eyeballing and for feeding external solvers.
void write_lp(const MilpModel& model, std::ostream& os);

/// Worst constraint/bound violation of an assignment, sense-aware. Used as the
/// independent residual check on every returned solution.
double max_residual(const MilpModel& model, const std::vector<double>& x);

}  // namespace mixplan::milp
