#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mixplan/milp.hpp"

namespace mixplan {

/// Machine groups. G150/G130 are molding machine classes, CNC is the
/// accessory pool; anything else is treated as a custom molding group.
namespace group {
inline const std::string kG150 = "G150";
inline const std::string kG130 = "G130";
inline const std::string kCNC = "CNC";
}  // namespace group

struct Machine {
  std::string id;
  std::string group;                    // G150, G130, CNC, or a custom name
  double day_hours = 24.0;              // three shifts
  double mold_change_hours = 5.0;       // downtime per mold swap
  double unit_time_default = 0.005;     // hours per unit for compatible products
  std::optional<std::string> initial_mold;  // installed before day 1

  bool is_cnc() const { return group == group::kCNC; }
};

struct Mold {
  std::string id;
  std::set<std::string> compatible_machines;
  std::set<std::string> producible_products;
};

struct Product {
  std::string id;
  std::string mold;
  double unit_cost = 0.0;          // currency per shell unit
  double accessory_per_unit = 0.0; // accessory units per shell unit (0 = none)
  double big_m_cap = 0.0;          // production deactivation bound; 0 = derive
  std::map<std::string, double> unit_time_overrides;  // machine id -> hours/unit
};

struct Order {
  std::string id;
  std::string product;
  double quantity = 0.0;
  int release_day = 1;
  int due_day = 1;
  double unit_revenue = 0.0;
  double unit_delay_penalty = 0.0;
  double unit_outsourcing_cost = 0.0;
};

/// Immutable problem instance. Construct, call validate() once, then share
/// freely across threads; nothing here mutates afterwards.
struct Scenario {
  int horizon_days = 1;
  std::vector<Machine> machines;
  std::vector<Mold> molds;
  std::vector<Product> products;
  std::vector<Order> orders;
  double accessory_capacity_per_day = 0.0;  // pooled CNC output, units/day
  std::vector<double> labor_rates;          // exactly three shift piece rates
  int material_lead_days = 3;
  std::map<std::string, double> initial_accessory_inventory;  // product -> units
  double accessory_material_ratio = 0.5;  // accessory material cost = ratio * c_f

  // --- lookups (ids are unique; validate() enforces it) ---
  const Machine* find_machine(const std::string& id) const;
  const Mold* find_mold(const std::string& id) const;
  const Product* find_product(const std::string& id) const;
  const Order* find_order(const std::string& id) const;

  const Machine& machine(const std::string& id) const;
  const Mold& mold(const std::string& id) const;
  const Product& product(const std::string& id) const;
  const Order& order(const std::string& id) const;

  /// Mean of the three shift piece rates; the flat labor charge per shell unit.
  double mean_labor_rate() const;

  /// Total residual demand of a product across all orders.
  double total_demand(const std::string& product_id) const;

  /// Production deactivation bound for a product: the stored cap, or when the
  /// stored cap is zero the tightest derivable one (total demand vs. the best
  /// machine running flat out for the whole horizon).
  double big_m(const Product& f) const;

  /// Checks every invariant and cross-reference; reports all problems at once.
  /// Throws ValidationError when anything fails.
  void validate() const;
};

enum class SchemeKind { A, B, C, GreedyNoPlan };

const char* to_string(SchemeKind s);
SchemeKind scheme_from_string(const std::string& s);

struct SchemeConfig {
  SchemeKind scheme = SchemeKind::C;
  int max_molds_per_day = 3;   // scheme B only
  int window_days = 30;        // rolling window W
  int step_days = 0;           // rolling step S; 0 means "equal to window_days"
  milp::MilpLimits solver_limits;
  bool penalty_descending = false;  // flips the third priority component

  int effective_step() const { return step_days > 0 ? step_days : window_days; }
  void validate(int horizon) const;  // throws ValidationError
};

/// Daily machine-hours left after n mold changes; never negative.
double effective_capacity(const Machine& machine, int n_changeovers);

/// Hours per unit of product f on machine m: the per-machine override when
/// present, otherwise the machine default. Throws IncompatiblePair when the
/// product's mold cannot run on the machine.
double unit_time(const Machine& machine, const Product& product, const Scenario& scenario);

/// True iff the order's product's mold both fits the machine and produces the
/// product. Throws UnknownId on dangling references.
bool is_compatible(const Order& order, const Machine& machine, const Scenario& scenario);

/// Same compatibility test keyed by product, used by the planners/schedulers.
bool product_compatible(const Product& product, const Machine& machine, const Scenario& scenario);

}  // namespace mixplan
