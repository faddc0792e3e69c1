#include "mixplan/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mixplan/errors.hpp"

namespace mixplan {

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, const std::string& id) {
  for (const auto& it : items) {
    if (it.id == id) return &it;
  }
  return nullptr;
}

}  // namespace

const Machine* Scenario::find_machine(const std::string& id) const {
  return find_by_id(machines, id);
}
const Mold* Scenario::find_mold(const std::string& id) const { return find_by_id(molds, id); }
const Product* Scenario::find_product(const std::string& id) const {
  return find_by_id(products, id);
}
const Order* Scenario::find_order(const std::string& id) const { return find_by_id(orders, id); }

const Machine& Scenario::machine(const std::string& id) const {
  if (const auto* m = find_machine(id)) return *m;
  throw UnknownId("machine " + id);
}
const Mold& Scenario::mold(const std::string& id) const {
  if (const auto* m = find_mold(id)) return *m;
  throw UnknownId("mold " + id);
}
const Product& Scenario::product(const std::string& id) const {
  if (const auto* p = find_product(id)) return *p;
  throw UnknownId("product " + id);
}
const Order& Scenario::order(const std::string& id) const {
  if (const auto* o = find_order(id)) return *o;
  throw UnknownId("order " + id);
}

double Scenario::mean_labor_rate() const {
  if (labor_rates.empty()) return 0.0;
  double s = 0.0;
  for (double r : labor_rates) s += r;
  return s / static_cast<double>(labor_rates.size());
}

double Scenario::total_demand(const std::string& product_id) const {
  double total = 0.0;
  for (const auto& o : orders) {
    if (o.product == product_id) total += o.quantity;
  }
  return total;
}

double Scenario::big_m(const Product& f) const {
  if (f.big_m_cap > 0.0) return f.big_m_cap;
  const Mold* k = find_mold(f.mold);
  double best_daily = 0.0;
  if (k) {
    for (const auto& mid : k->compatible_machines) {
      const Machine* m = find_machine(mid);
      if (!m || m->is_cnc()) continue;
      double t = m->unit_time_default;
      auto it = f.unit_time_overrides.find(mid);
      if (it != f.unit_time_overrides.end()) t = it->second;
      if (t > 0.0) best_daily = std::max(best_daily, m->day_hours / t);
    }
  }
  double by_capacity = std::floor(best_daily) * horizon_days;
  double by_demand = total_demand(f.id);
  double cap = std::min(by_demand, by_capacity);
  return cap > 0.0 ? cap : 1.0;
}

void Scenario::validate() const {
  std::vector<std::string> issues;
  auto complain = [&](const std::string& s) { issues.push_back(s); };

  if (horizon_days < 1) complain("scenario: horizon_days must be >= 1");
  if (labor_rates.size() != 3) complain("scenario: labor_rates must have exactly 3 entries");
  for (double r : labor_rates) {
    if (r < 0) complain("scenario: labor rate must be >= 0");
  }
  if (accessory_capacity_per_day < 0) complain("scenario: accessory_capacity_per_day must be >= 0");
  if (material_lead_days < 0) complain("scenario: material_lead_days must be >= 0");
  if (accessory_material_ratio < 0) complain("scenario: accessory_material_ratio must be >= 0");

  auto dup_check = [&](auto const& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& it : items) {
      if (!seen.insert(it.id).second) complain(std::string(what) + " " + it.id + ": duplicate id");
    }
  };
  dup_check(machines, "machine");
  dup_check(molds, "mold");
  dup_check(products, "product");
  dup_check(orders, "order");

  for (const auto& m : machines) {
    if (m.day_hours <= 0) complain("machine " + m.id + ": day_hours must be > 0");
    if (m.mold_change_hours < 0 || m.mold_change_hours >= m.day_hours)
      complain("machine " + m.id + ": mold_change_hours must be in [0, day_hours)");
    if (m.unit_time_default <= 0) complain("machine " + m.id + ": unit_time_default must be > 0");
    if (m.initial_mold && !find_mold(*m.initial_mold))
      complain("machine " + m.id + ": initial_mold references unknown mold " + *m.initial_mold);
  }

  for (const auto& k : molds) {
    if (k.compatible_machines.empty())
      complain("mold " + k.id + ": compatible_machines must be non-empty");
    if (k.producible_products.empty())
      complain("mold " + k.id + ": producible_products must be non-empty");
    for (const auto& mid : k.compatible_machines) {
      if (!find_machine(mid)) complain("mold " + k.id + ": unknown machine " + mid);
    }
    for (const auto& pid : k.producible_products) {
      if (!find_product(pid)) complain("mold " + k.id + ": unknown product " + pid);
    }
  }

  for (const auto& f : products) {
    if (f.unit_cost < 0) complain("product " + f.id + ": unit_cost must be >= 0");
    if (f.accessory_per_unit < 0) complain("product " + f.id + ": accessory_per_unit must be >= 0");
    if (f.big_m_cap < 0) complain("product " + f.id + ": big_m_cap must be >= 0");
    const Mold* k = find_mold(f.mold);
    if (!k) {
      complain("product " + f.id + ": unknown mold " + f.mold);
    } else if (!k->producible_products.count(f.id)) {
      complain("product " + f.id + ": not listed in mold " + f.mold + " producible_products");
    }
    for (const auto& [mid, t] : f.unit_time_overrides) {
      if (!find_machine(mid)) complain("product " + f.id + ": override for unknown machine " + mid);
      if (t <= 0) complain("product " + f.id + ": unit time override must be > 0");
    }
  }

  for (const auto& o : orders) {
    if (o.quantity <= 0) complain("order " + o.id + ": quantity must be > 0");
    if (o.release_day < 1) complain("order " + o.id + ": release_day must be >= 1");
    if (o.release_day > o.due_day) complain("order " + o.id + ": release_day must be <= due_day");
    if (o.due_day > horizon_days) complain("order " + o.id + ": due_day exceeds horizon");
    if (o.unit_revenue < 0) complain("order " + o.id + ": unit_revenue must be >= 0");
    if (o.unit_delay_penalty < 0) complain("order " + o.id + ": unit_delay_penalty must be >= 0");
    if (o.unit_outsourcing_cost < 0)
      complain("order " + o.id + ": unit_outsourcing_cost must be >= 0");
    if (!find_product(o.product)) complain("order " + o.id + ": unknown product " + o.product);
  }

  for (const auto& [pid, units] : initial_accessory_inventory) {
    if (!find_product(pid)) complain("initial inventory: unknown product " + pid);
    if (units < 0) complain("initial inventory for " + pid + ": must be >= 0");
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
}

const char* to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::A: return "A";
    case SchemeKind::B: return "B";
    case SchemeKind::C: return "C";
    case SchemeKind::GreedyNoPlan: return "greedy";
  }
  return "?";
}

SchemeKind scheme_from_string(const std::string& s) {
  if (s == "A" || s == "a") return SchemeKind::A;
  if (s == "B" || s == "b") return SchemeKind::B;
  if (s == "C" || s == "c") return SchemeKind::C;
  if (s == "greedy" || s == "GreedyNoPlan") return SchemeKind::GreedyNoPlan;
  throw ValidationError({"unknown scheme: " + s});
}

void SchemeConfig::validate(int horizon) const {
  std::vector<std::string> issues;
  if (max_molds_per_day < 1) issues.push_back("config: max_molds_per_day must be >= 1");
  int step = effective_step();
  if (window_days < 1) issues.push_back("config: window_days must be >= 1");
  if (step < 1 || step > window_days)
    issues.push_back("config: need 1 <= step_days <= window_days");
  if (window_days > horizon) issues.push_back("config: window_days exceeds horizon");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double effective_capacity(const Machine& machine, int n_changeovers) {
  double left = machine.day_hours - n_changeovers * machine.mold_change_hours;
  return left > 0.0 ? left : 0.0;
}

double unit_time(const Machine& machine, const Product& product, const Scenario& scenario) {
  if (!product_compatible(product, machine, scenario))
    throw IncompatiblePair(machine.id, product.id);
  auto it = product.unit_time_overrides.find(machine.id);
  if (it != product.unit_time_overrides.end()) return it->second;
  return machine.unit_time_default;
}

bool product_compatible(const Product& product, const Machine& machine, const Scenario& scenario) {
  const Mold& k = scenario.mold(product.mold);
  return k.compatible_machines.count(machine.id) > 0 &&
         k.producible_products.count(product.id) > 0;
}

bool is_compatible(const Order& order, const Machine& machine, const Scenario& scenario) {
  const Product& f = scenario.product(order.product);
  if (!scenario.find_machine(machine.id)) throw UnknownId("machine " + machine.id);
  return product_compatible(f, machine, scenario);
}

}  // namespace mixplan
