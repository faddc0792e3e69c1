#pragma once

#include <map>
#include <string>
#include <vector>

#include "mixplan/domain.hpp"
#include "mixplan/planner.hpp"
#include "mixplan/scheduler.hpp"

namespace mixplan {

struct GroupChangeover {
  long total = 0;
  double avg_per_machine = 0.0;
  double hours = 0.0;
  double loss_fraction = 0.0;
};

struct CostComposition {
  double material = 0.0;
  double labor = 0.0;
  double outsourcing = 0.0;
  double delay_penalty = 0.0;

  double total() const { return material + labor + outsourcing + delay_penalty; }
};

struct EvaluationReport {
  double otd = 0.0;
  long late_orders = 0;
  double mean_lateness = 0.0;
  std::map<std::string, double> utilization_per_group;
  std::map<std::string, double> utilization_per_machine;
  std::map<std::string, double> load_variance;  // per group
  std::map<std::string, GroupChangeover> changeover_table;
  double sync_acc = 1.0;
  double profit = 0.0;
  double profit_rate = 0.0;
  double revenue = 0.0;
  CostComposition costs;
  double outsourced_units = 0.0;
  double unassigned_units = 0.0;
  double solver_gap = 0.0;

  double cost_share(double part) const {
    double t = costs.total();
    return t > 0.0 ? part / t : 0.0;
  }
};

/// Fraction of orders fully delivered by their due day (outsourced units count
/// as delivered on the due day), plus the late order ids.
std::pair<double, std::vector<std::string>> on_time_delivery(const Schedule& schedule,
                                                             const std::vector<PlanEnvelope>& envelopes,
                                                             const Scenario& scenario);

/// Accessory synchronization: sum_t min(available_t, need_t) / sum_t need_t.
/// Planned runs credit accessory production plus carried inventory; the
/// greedy dispatcher only gets what it actually cut that day. 1.0 when there
/// is no accessory need at all.
double sync_acc(const Schedule& schedule, const std::vector<PlanEnvelope>& envelopes,
                const Scenario& scenario);

/// Busy hours / available hours per machine and per group. Changeover hours
/// count as neither busy nor capacity-reducing here; they are reported by
/// changeover_report instead.
void utilization(const Schedule& schedule, const std::vector<PlanEnvelope>& envelopes,
                 const Scenario& scenario, std::map<std::string, double>& per_machine,
                 std::map<std::string, double>& per_group, std::map<std::string, double>& variance);

/// Per-group changeover counts, hours, and capacity-loss fractions.
std::map<std::string, GroupChangeover> changeover_report(const Schedule& schedule,
                                                         const Scenario& scenario);

struct Economics {
  double revenue = 0.0;
  double profit = 0.0;
  double profit_rate = 0.0;
  CostComposition costs;
};

/// Profit statement: revenue on delivered units (internal + outsourced),
/// shell and accessory material, flat piece-rate labor, outsourcing fees, and
/// shortfall penalties. Reconciles with the planning objective when the
/// schedule executes the envelope in full.
Economics economics(const Schedule& schedule, const std::vector<PlanEnvelope>& envelopes,
                    const Scenario& scenario);

/// Runs every metric and assembles the full report.
EvaluationReport evaluate(const Schedule& schedule, const std::vector<PlanEnvelope>& envelopes,
                          const Scenario& scenario);

}  // namespace mixplan
