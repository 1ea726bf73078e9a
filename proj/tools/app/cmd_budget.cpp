#include <sstream>

#include "commands.hpp"
#include "ionbath/core/budget.hpp"
#include "ionbath/core/errors.hpp"
#include "ionbath/core/units.hpp"
#include "ionbath/thermometry/micromotion.hpp"

namespace ionbath::app {

namespace {

// Energies enter and leave the command in one unit: microkelvin (E / k_B) or joule.
struct EnergyUnit {
  std::string name;
  double per_joule = 0.0;
  double to_unit(double joule) const { return joule * per_joule; }
  double to_joule(double value) const { return value / per_joule; }
};

EnergyUnit energy_unit(const KeyValueConfig& cfg) {
  const std::string u = cfg.get_string("budget.unit", "uK");
  if (u == "uK") return {u, 1e6 / constants::boltzmann};
  if (u == "J") return {u, 1.0};
  throw ConfigError("budget.unit must be 'uK' or 'J', got '" + u + "'");
}

// Replaces a row by `<prefix><name>` and `<prefix><name>_sigma` when present.
void override_row(const KeyValueConfig& cfg, const EnergyUnit& unit, const std::string& key, Measured& m) {
  if (cfg.has(key)) m.value = unit.to_joule(cfg.get_double(key));
  if (cfg.has(key + "_sigma")) m.sigma = unit.to_joule(cfg.get_double(key + "_sigma"));
}

std::string csv_line(const std::string& label, std::initializer_list<double> values) {
  std::string line = label;
  for (double v : values) line += "," + io::format_number(v);
  return line + "\n";
}

nlohmann::ordered_json measured_json(const Measured& m, const EnergyUnit& unit) {
  return {{"value", unit.to_unit(m.value)}, {"sigma", unit.to_unit(m.sigma)}};
}

const char* const kMMSlugs[] = {"axial", "quadrature", "vertical", "horizontal"};

thermometry::MMBudget mm_with_overrides(thermometry::MMBudget b, const KeyValueConfig& cfg,
                                        const EnergyUnit& unit, const std::string& prefix) {
  for (std::size_t i = 0; i < b.entries.size() && i < std::size(kMMSlugs); ++i) {
    override_row(cfg, unit, prefix + kMMSlugs[i], b.entries[i].energy);
  }
  return thermometry::mm_budget(b.omega_rad, b.entries);
}

}  // namespace

void cmd_budget(RunContext& ctx) {
  const KeyValueConfig& cfg = ctx.config();
  const EnergyUnit unit = energy_unit(cfg);
  const InteractionModel model = InteractionModel::li_yb();

  EnergyBudget b = EnergyBudget::paper_table();
  override_row(cfg, unit, "budget.radial_secular", b.radial_secular);
  override_row(cfg, unit, "budget.intrinsic_mm", b.intrinsic_mm);
  override_row(cfg, unit, "budget.axial_secular", b.axial_secular);
  override_row(cfg, unit, "budget.excess_mm", b.excess_mm);
  override_row(cfg, unit, "budget.atom_thermal", b.atom_thermal);
  b.correlate_radial_and_intrinsic = cfg.get_bool("budget.correlate_radial_intrinsic", true);
  b.linear_ion_atom_combination = cfg.get_bool("budget.linear_ion_atom", true);
  const BudgetTotals totals = budget_total(b, model);

  std::ostringstream t1;
  t1 << "row,kinetic_" << unit.name << ",kinetic_sigma_" << unit.name << ",collision_" << unit.name
     << ",collision_sigma_" << unit.name << "\n";
  auto row = [&](const std::string& label, const Measured& kin, const Measured& col) {
    t1 << csv_line(label, {unit.to_unit(kin.value), unit.to_unit(kin.sigma), unit.to_unit(col.value),
                           unit.to_unit(col.sigma)});
  };
  for (const BudgetRow& r : totals.rows) row(r.label, r.kinetic, r.collision);
  row("ion_total", totals.ion_kinetic, totals.ion_collision);
  row("total", totals.ion_kinetic, totals.total_collision);
  ctx.write_text("table1.csv", t1.str());

  const auto horizontal = cfg.get_string("budget.horizontal_330", "text");
  if (horizontal != "table" && horizontal != "text") {
    throw ConfigError("budget.horizontal_330 must be 'table' or 'text', got '" + horizontal + "'");
  }
  const std::vector<std::pair<std::string, thermometry::MMBudget>> columns = {
      {"210", mm_with_overrides(thermometry::paper_budget_210(), cfg, unit, "mm210.")},
      {"330", mm_with_overrides(thermometry::paper_budget_330(horizontal == "table"
                                                                  ? thermometry::HorizontalBound::table
                                                                  : thermometry::HorizontalBound::text),
                                cfg, unit, "mm330.")}};
  std::ostringstream t2;
  t2 << "row,omega_khz,energy_" << unit.name << ",sigma_" << unit.name << ",multiplicity,upper_bound\n";
  nlohmann::ordered_json mm = nlohmann::ordered_json::object();
  for (const auto& [freq, budget] : columns) {
    const double khz = std::stod(freq);
    for (std::size_t i = 0; i < budget.entries.size(); ++i) {
      const auto& e = budget.entries[i];
      t2 << csv_line(i < std::size(kMMSlugs) ? kMMSlugs[i] : "row" + std::to_string(i),
                     {khz, unit.to_unit(e.energy.value), unit.to_unit(e.energy.sigma),
                      static_cast<double>(e.multiplicity), e.upper_bound ? 1.0 : 0.0});
    }
    const Measured total = budget.total();
    t2 << csv_line("total", {khz, unit.to_unit(total.value), unit.to_unit(total.sigma), 1.0, 0.0});
    mm[freq + "kHz"] = measured_json(total, unit);
  }
  ctx.write_text("table2.csv", t2.str());

  nlohmann::ordered_json j;
  j["unit"] = unit.name;
  j["ion_kinetic"] = measured_json(totals.ion_kinetic, unit);
  j["ion_collision"] = measured_json(totals.ion_collision, unit);
  j["atom_collision"] = measured_json(totals.atom_collision, unit);
  j["total_collision"] = measured_json(totals.total_collision, unit);
  j["s_wave_energy"] = unit.to_unit(model.s_wave_energy());
  j["collision_to_s_wave_ratio"] = totals.total_collision.value / model.s_wave_energy();
  j["excess_micromotion_totals"] = mm;
  ctx.write_json("budget.json", j);
}

}  // namespace ionbath::app
