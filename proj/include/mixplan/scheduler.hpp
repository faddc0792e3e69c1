#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mixplan/domain.hpp"
#include "mixplan/planner.hpp"

namespace mixplan {

using OrderMachineDay = std::tuple<std::string, std::string, int>;

struct ChangeoverEvent {
  std::string machine;
  int day = 1;
  std::optional<std::string> from_mold;  // empty: no mold was installed before
  std::string to_mold;
  double hours_lost = 0.0;
};

/// Machine-level allocations for the whole horizon plus the mold bookkeeping
/// needed to audit them. accessory_production is filled only by the greedy
/// dispatcher (planned runs read accessory supply from the envelopes).
struct Schedule {
  SchemeKind scheme = SchemeKind::C;
  std::map<OrderMachineDay, double> z;
  std::map<MachineDay, std::vector<std::string>> mold_state;  // molds in first-use order
  std::vector<ChangeoverEvent> changeovers;
  std::map<OrderDay, double> unassigned;  // quota the dispatcher could not place
  std::map<ProductDay, double> accessory_production;
};

/// Priority tuple compared ascending lexicographically.
struct OrderPriority {
  int due = 0;
  int slack = 0;
  double penalty = 0.0;

  auto tie() const { return std::tie(due, slack, penalty); }
  bool operator<(const OrderPriority& o) const { return tie() < o.tie(); }
  bool operator==(const OrderPriority& o) const { return tie() == o.tie(); }
};

OrderPriority priority(const Order& order, int day);

struct Violation {
  enum class Kind {
    Conservation,     // assigned + unassigned != quota
    ProductionCap,    // assigned beyond planned production
    Capacity,         // machine time beyond effective capacity
    Compatibility,    // produced without a matching installed mold
    MoldExclusivity,  // more molds in one day than the scheme allows
    Negative,         // negative allocation
  };
  Kind kind;
  std::string machine, order, product;
  int day = 0;
  double residual = 0.0;
  std::string message;
};

const char* to_string(Violation::Kind k);

/// One dispatched day. prev_products lists what each machine ran on day-1 and
/// which mold it carried, for the stable-machine preference.
struct DayContext {
  std::map<std::string, std::string> installed_mold;           // machine -> mold carried in
  std::map<std::string, std::vector<std::string>> prev_products;  // machine -> products run on d-1
};

/// Dispatches one day of an envelope following the daily heuristic: orders
/// sorted by priority, stable machines preferred, largest remaining capacity
/// wins, quotas and capacities decremented as assignments land. Residue that
/// cannot be placed is recorded in `unassigned`, never dropped.
void schedule_day(const PlanEnvelope& envelope, int day, const Scenario& scenario,
                  const SchemeConfig& config, const DayContext& prev, Schedule& out);

/// Chains schedule_day over the horizon, threading mold state and recording
/// changeover events (one per mold swap, costing the machine's swap hours).
Schedule schedule_horizon(const std::vector<PlanEnvelope>& envelopes, const Scenario& scenario,
                          const SchemeConfig& config);

/// Independent recheck of a schedule against its envelopes: conservation,
/// production ceilings, capacity with changeover losses, compatibility, and
/// per-scheme mold exclusivity. Violations are data, not exceptions.
std::vector<Violation> verify_schedule(const Schedule& schedule,
                                       const std::vector<PlanEnvelope>& envelopes,
                                       const Scenario& scenario);

/// Mold changes charged to a machine-day: inter-day change (first mold of the
/// day vs. the mold carried in) plus, for scheme B, intra-day switches.
int mold_change_count(const Schedule& schedule, const Scenario& scenario,
                      const std::string& machine, int day);

/// Ablation dispatcher: earliest-due-date order of all open orders, no
/// envelopes, molds claimed on demand with one mold per machine-day, and
/// accessories cut same-day against the CNC pool with no look-ahead.
Schedule greedy_noplan(const Scenario& scenario, const SchemeConfig& config);

}  // namespace mixplan
