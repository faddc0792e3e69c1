#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mixplan/domain.hpp"
#include "mixplan/milp.hpp"

namespace mixplan {

using MachineProductDay = std::tuple<std::string, std::string, int>;
using OrderDay = std::pair<std::string, int>;
using ProductDay = std::pair<std::string, int>;
using MachineDay = std::pair<std::string, int>;

/// One planning window's committed quotas. Scheme A machines are pooled
/// pseudo-resources named "pool:<group>"; everything else uses real ids.
/// The entry_* fields snapshot the rolling state the window started from so a
/// window can be audited (and serialized) standalone.
struct PlanEnvelope {
  SchemeKind scheme = SchemeKind::C;
  int window_start = 1;
  int window_end = 1;
  int frozen_start = 1;
  int frozen_end = 1;

  std::map<MachineProductDay, double> y;           // production quota
  std::map<OrderDay, double> q;                    // shipment quota
  std::map<MachineDay, std::vector<std::string>> x;  // installed molds per day
  std::map<ProductDay, double> p;                  // accessory production
  std::map<ProductDay, double> inventory;          // end-of-day accessory stock
  std::map<std::string, double> outsourced;        // per order, this window's decision
  double objective = 0.0;

  std::map<std::string, double> entry_inventory;
  std::map<std::string, std::string> entry_last_mold;
  std::map<std::string, double> entry_residual;    // remaining order quantity at entry

  bool covers_day(int d) const { return d >= frozen_start && d <= frozen_end; }
};

/// State carried between rolling windows.
struct RollingState {
  std::map<std::string, double> carried_inventory;
  std::map<std::string, double> fulfilled_so_far;
  std::map<std::string, double> committed_outsourcing;
  std::map<std::string, std::string> last_mold;

  static RollingState initial(const Scenario& scenario);
};

/// The MILP plus the index maps needed to read a solution back out.
struct PlannerModel {
  milp::MilpModel model;
  int window_start = 1;
  int window_end = 1;
  SchemeKind scheme = SchemeKind::C;

  std::map<MachineProductDay, int> y_index;
  std::map<OrderDay, int> q_index;
  std::map<ProductDay, int> p_index;
  std::map<ProductDay, int> i_index;
  std::map<std::string, int> u_index;         // deciding orders only
  std::map<std::string, int> short_index;     // deciding orders only
  std::map<std::tuple<std::string, std::string, int>, int> x_index;  // (machine, mold, day)
  std::map<MachineDay, int> delta_index;

  /// Model machines: real ids, or pooled pseudo-machines for scheme A.
  struct ModelMachine {
    std::string id;
    std::string group;
    double day_hours;
    double mold_change_hours;
    std::vector<std::string> members;  // real machine ids behind a pool
  };
  std::vector<ModelMachine> machines;
};

/// Pool id used by scheme A envelopes ("pool:<group>").
std::string pool_id(const std::string& group);

/// Builds the window MILP for the given scheme. Throws EmptyWindow for an
/// empty/inverted window and InconsistentState when the rolling state refers
/// to unknown ids or exceeds order quantities.
PlannerModel build_planning_model(const Scenario& scenario, int window_start, int window_end,
                                  const RollingState& state, const SchemeConfig& config);

/// Solves a built window model and maps the solution into an envelope.
/// Shortfall is penalized, never forbidden, so solver infeasibility is an
/// internal error (SolverError).
PlanEnvelope solve_window(const PlannerModel& pm, const Scenario& scenario,
                          const RollingState& state, const SchemeConfig& config);

/// Rolling horizon: plans [1..W], [S+1..S+W], ... clipped to the horizon,
/// freezing the first S days of each window and carrying inventory, fulfilled
/// quantities, outsourcing commitments, and final mold assignments forward.
std::pair<std::vector<PlanEnvelope>, RollingState> rolling_plan(const Scenario& scenario,
                                                                const SchemeConfig& config);

/// Remaining quantity of an order given the rolling state.
double residual_quantity(const Order& order, const RollingState& state);

}  // namespace mixplan
