#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nscache/tech.hpp"

namespace nscache {

enum class CellKind { SRAM6T, EDRAM1T1C, STTMRAM, GC2T_DG, GC2T_CAA };

std::string_view to_string(CellKind k);
CellKind cell_kind_from(std::string_view s);

inline bool is_charge_cell(CellKind k) {
  return k == CellKind::EDRAM1T1C || k == CellKind::GC2T_DG || k == CellKind::GC2T_CAA;
}
inline bool is_gain_cell(CellKind k) { return k == CellKind::GC2T_DG || k == CellKind::GC2T_CAA; }

struct CellModel {
  CellKind kind = CellKind::SRAM6T;
  std::string name;
  double area_um2 = 0;
  double aspect_ratio = 1.0;  // width (along WL) over height (along BL)
  bool is_beol = false;
  int tiers_per_cell = 1;
  bool needs_refresh = false;
  bool destructive_read = false;
  double vdd = 0;
  double v_boost = 0;
  double v_hold = 0;
  double v_read = 0;
  double c_sn = 0;  // F, constant storage-node capacitance
  // Optional (voltage, capacitance) samples; when non-empty c_sn(v) is
  // linearly interpolated from it instead of the constant.
  std::vector<std::pair<double, double>> c_sn_table;
  double write_pulse_ns = 0;
  double r_on = 0, r_off = 0;  // ohm, MTJ states
  double write_current_a = 0;
  double retention_s = 0;
  double retention_derate = 1.0;
  double write_width_um = 0;
  double read_width_um = 0;
  double sense_margin_fraction = 0.7;
  double write_level_fraction = 0.9;
  int fins_pu = 1, fins_pd = 1, fins_pg = 1;
  DeviceParams write_device;
  DeviceParams read_device;

  double width_um() const;
  double height_um() const;
  double storage_capacitance(double v) const;
};

struct StoredLevelPair {
  double v1 = 0;  // written "1"
  double v2 = 0;  // lowest level still sensed as "1"
};

StoredLevelPair default_levels(const CellModel& cell);

// Drain current in A for a device of `width_um`. Negative v_ds swaps source and
// drain, so the sign of the result follows v_ds.
double compact_current(const DeviceParams& d, double v_gs, double v_ds, double width_um = 1.0);

// t = integral of c(v)/i(v) dv between the two voltages (order-independent),
// adaptive trapezoid to a relative tolerance. Throws if i(v) <= 0 anywhere
// sampled.
double charge_time(const std::function<double(double)>& c_of_v, const std::function<double(double)>& i_of_v,
                   double v_from, double v_to, double rel_tol = 1e-6);

// Write-device charge-up of the storage node from 0 V to levels.v1.
double access_time(const CellModel& cell, const StoredLevelPair& levels);
// Hold-state leakage decay from levels.v1 down to levels.v2.
double retention_time(const CellModel& cell, const StoredLevelPair& levels);

double onoff_decades(double delta_vg, double ss_mv_per_dec);

// Cell write time in seconds: charge cells integrate, STT uses the pulse and
// SRAM returns 0 (its write path is pure circuit delay).
double cell_write_time(const CellModel& cell);

CellModel cell_from_config(const ConfigDocument& doc, const TechNode& tech);
// A built-in cell name ("gc2t_dg_7nm") or a path to a cell file.
CellModel load_cell(std::string_view source, const TechNode& tech);

void validate(const CellModel& cell);

}  // namespace nscache
