#include "nscache/cells.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

namespace nscache {

namespace {

constexpr double kThermalVoltage = 0.0309;  // kT/q at 85 C

struct Interval {
  double a, b, fa, fm, fb;
};

double trapezoid_refine(const std::function<double(double)>& f, const Interval& s, double abs_tol, int depth) {
  const double h = s.b - s.a;
  const double coarse = 0.5 * h * (s.fa + s.fb);
  const double fine = 0.25 * h * (s.fa + 2.0 * s.fm + s.fb);
  if (depth >= 48 || std::abs(fine - coarse) <= 3.0 * abs_tol) return fine;
  const double m = 0.5 * (s.a + s.b);
  const double ml = 0.5 * (s.a + m);
  const double mr = 0.5 * (m + s.b);
  return trapezoid_refine(f, {s.a, m, s.fa, f(ml), s.fm}, 0.5 * abs_tol, depth + 1) +
         trapezoid_refine(f, {m, s.b, s.fm, f(mr), s.fb}, 0.5 * abs_tol, depth + 1);
}

}  // namespace

std::string_view to_string(CellKind k) {
  switch (k) {
    case CellKind::SRAM6T: return "SRAM6T";
    case CellKind::EDRAM1T1C: return "EDRAM1T1C";
    case CellKind::STTMRAM: return "STTMRAM";
    case CellKind::GC2T_DG: return "GC2T_DG";
    case CellKind::GC2T_CAA: return "GC2T_CAA";
  }
  return "?";
}

CellKind cell_kind_from(std::string_view s) {
  if (s == "SRAM6T" || s == "SRAM") return CellKind::SRAM6T;
  if (s == "EDRAM1T1C" || s == "eDRAM" || s == "EDRAM") return CellKind::EDRAM1T1C;
  if (s == "STTMRAM" || s == "STT-MRAM" || s == "MRAM") return CellKind::STTMRAM;
  if (s == "GC2T_DG") return CellKind::GC2T_DG;
  if (s == "GC2T_CAA") return CellKind::GC2T_CAA;
  throw Error("unknown memory cell type '" + std::string(s) + "'");
}

double CellModel::width_um() const { return std::sqrt(area_um2 * aspect_ratio); }
double CellModel::height_um() const { return std::sqrt(area_um2 / aspect_ratio); }

double CellModel::storage_capacitance(double v) const {
  if (c_sn_table.empty()) return c_sn;
  if (v <= c_sn_table.front().first) return c_sn_table.front().second;
  if (v >= c_sn_table.back().first) return c_sn_table.back().second;
  auto hi = std::upper_bound(c_sn_table.begin(), c_sn_table.end(), v,
                             [](double x, const auto& p) { return x < p.first; });
  auto lo = hi - 1;
  const double t = (v - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

StoredLevelPair default_levels(const CellModel& cell) {
  StoredLevelPair l;
  l.v1 = cell.write_level_fraction * cell.vdd;
  l.v2 = cell.sense_margin_fraction * l.v1;
  return l;
}

double compact_current(const DeviceParams& d, double v_gs, double v_ds, double width_um) {
  if (v_ds < 0) return -compact_current(d, v_gs - v_ds, -v_ds, width_um);
  const double ss = d.ss_mv_per_dec * 1e-3;
  const double i_th = d.i_off_per_um * std::pow(10.0, d.vth / ss);
  double i;
  double overdrive = 0;
  if (v_gs <= d.vth || i_th >= d.i_on_per_um) {
    i = d.i_off_per_um * std::pow(10.0, v_gs / ss);
    if (v_gs > d.vth) i = std::min(i, d.i_on_per_um);
  } else {
    overdrive = v_gs - d.vth;
    const double x = std::pow(overdrive / d.overdrive_half, d.alpha_power);
    i = i_th + (d.i_on_per_um - i_th) * x / (1.0 + x);
  }
  const double v_dsat = 2.0 * kThermalVoltage + 0.5 * overdrive;
  return i * (1.0 - std::exp(-v_ds / v_dsat)) * width_um;
}

double charge_time(const std::function<double(double)>& c_of_v, const std::function<double(double)>& i_of_v,
                   double v_from, double v_to, double rel_tol) {
  if (v_from == v_to) return 0.0;
  const double a = std::min(v_from, v_to);
  const double b = std::max(v_from, v_to);
  auto f = [&](double v) {
    const double i = i_of_v(v);
    if (!(i > 0) || !std::isfinite(i))
      throw Error("charge integral does not converge: current vanishes at " + std::to_string(v) + " V");
    return c_of_v(v) / i;
  };
  constexpr int kPanels = 32;
  std::vector<double> fx(2 * kPanels + 1);
  const double h = (b - a) / (2 * kPanels);
  for (int k = 0; k <= 2 * kPanels; ++k) fx[k] = f(a + k * h);
  double scale = 0;
  for (int k = 0; k < 2 * kPanels; ++k) scale += 0.5 * h * (fx[k] + fx[k + 1]);
  const double abs_tol = rel_tol * std::abs(scale) / kPanels;
  double total = 0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + 2 * p * h;
    total += trapezoid_refine(f, {lo, lo + 2 * h, fx[2 * p], fx[2 * p + 1], fx[2 * p + 2]}, abs_tol, 0);
  }
  return total;
}

double access_time(const CellModel& cell, const StoredLevelPair& levels) {
  if (!is_charge_cell(cell.kind)) throw Error("access_time requires a charge-storage cell");
  auto c = [&](double v) { return cell.storage_capacitance(v); };
  auto i = [&](double v_sn) {
    return compact_current(cell.write_device, cell.v_boost - v_sn, cell.vdd - v_sn, cell.write_width_um);
  };
  return charge_time(c, i, 0.0, levels.v1);
}

double retention_time(const CellModel& cell, const StoredLevelPair& levels) {
  if (!is_charge_cell(cell.kind)) throw Error("retention_time requires a charge-storage cell");
  auto c = [&](double v) { return cell.storage_capacitance(v); };
  auto i = [&](double v_sn) { return compact_current(cell.write_device, cell.v_hold, v_sn, cell.write_width_um); };
  return charge_time(c, i, levels.v2, levels.v1);
}

double onoff_decades(double delta_vg, double ss_mv_per_dec) {
  if (!(ss_mv_per_dec > 0)) throw Error("subthreshold swing must be positive");
  return delta_vg / (ss_mv_per_dec * 1e-3);
}

double cell_write_time(const CellModel& cell) {
  switch (cell.kind) {
    case CellKind::SRAM6T: return 0.0;
    case CellKind::STTMRAM: return cell.write_pulse_ns * 1e-9;
    default: return access_time(cell, default_levels(cell));
  }
}

void validate(const CellModel& c) {
  if (!(c.area_um2 > 0)) throw Error("cell area must be positive");
  if (!(c.aspect_ratio > 0)) throw Error("cell aspect ratio must be positive");
  if (c.v_boost < c.vdd) throw Error("VBoost must be at least Vdd");
  if (c.v_hold > 0) throw Error("VHold must not be positive");
  if (c.needs_refresh && !(c.retention_s > 0 && std::isfinite(c.retention_s)))
    throw Error("refreshing cell needs a finite positive retention");
  if (c.destructive_read && c.kind != CellKind::EDRAM1T1C) throw Error("only 1T1C eDRAM reads destructively");
  if (c.tiers_per_cell < 1) throw Error("TiersPerCell must be at least 1");
  if (!(c.retention_derate > 0 && c.retention_derate <= 1)) throw Error("RetentionDerate must be in (0, 1]");
  if (is_charge_cell(c.kind)) {
    if (!(c.c_sn > 0)) throw Error("charge cell needs a positive storage capacitance");
    if (!(c.write_width_um > 0) || !(c.read_width_um > 0)) throw Error("access device widths must be positive");
    if (!(c.sense_margin_fraction > 0 && c.sense_margin_fraction < 1))
      throw Error("SenseMarginFraction must be in (0, 1)");
  }
  if (c.kind == CellKind::STTMRAM && !(c.r_off > c.r_on && c.r_on > 0))
    throw Error("STT-MRAM needs 0 < ResistanceOn < ResistanceOff");
}

CellModel cell_from_config(const ConfigDocument& doc, const TechNode& tech) {
  CellModel c;
  c.name = std::filesystem::path(doc.source).stem().string();
  try {
    c.kind = cell_kind_from(doc.string("MemoryCellType"));
  } catch (const Error& e) {
    doc.fail("MemoryCellType", e.what());
  }
  c.area_um2 = doc.number("CellArea");
  c.aspect_ratio = doc.number_or("CellAspectRatio", 1.0);
  c.vdd = tech.vdd;
  c.v_read = doc.number_or("ReadVoltage", tech.vdd);
  c.v_boost = doc.number_or("VBoost", tech.vdd);
  c.v_hold = doc.number_or("VHold", 0.0);
  c.sense_margin_fraction = doc.number_or("SenseMarginFraction", 0.7);
  c.write_level_fraction = doc.number_or("WriteLevelFraction", 0.9);
  c.retention_derate = doc.number_or("RetentionDerate", 1.0);
  const double w_min = tech.circuit.min_nmos_width_um;

  switch (c.kind) {
    case CellKind::SRAM6T:
      c.fins_pu = static_cast<int>(doc.integer_or("SRAMFinsPU", 1));
      c.fins_pd = static_cast<int>(doc.integer_or("SRAMFinsPD", 1));
      c.fins_pg = static_cast<int>(doc.integer_or("SRAMFinsPG", 1));
      c.write_device = c.read_device = at_temperature(tech.logic_n, tech);
      c.write_width_um = c.read_width_um = c.fins_pg * w_min;
      c.retention_s = std::numeric_limits<double>::infinity();
      break;
    case CellKind::EDRAM1T1C:
      c.write_device = c.read_device = at_temperature(tech.logic_n, tech);
      c.write_width_um = c.read_width_um = doc.number_or("WriteDeviceWidth", w_min);
      c.c_sn = doc.number("SNCapacitance");
      c.needs_refresh = true;
      c.destructive_read = true;
      break;
    case CellKind::STTMRAM:
      c.write_device = c.read_device = at_temperature(tech.logic_n, tech);
      c.write_width_um = c.read_width_um = doc.number_or("WriteDeviceWidth", 2 * w_min);
      c.write_pulse_ns = doc.number("WritePulseWidth");
      c.r_on = doc.number("ResistanceOn");
      c.r_off = doc.number("ResistanceOff");
      c.write_current_a = doc.number("WriteCurrent");
      c.retention_s = doc.number_or("Retention", 3.15e8);
      break;
    case CellKind::GC2T_DG:
    case CellKind::GC2T_CAA: {
      c.is_beol = doc.boolean_or("IsBEOL", true);
      c.tiers_per_cell = static_cast<int>(doc.integer_or("TiersPerCell", 2));
      c.write_device = at_temperature(tech.access_aos_write, tech);
      c.read_device = at_temperature(tech.access_aos_read, tech);
      c.write_width_um = doc.number("WriteDeviceWidth");
      c.read_width_um = doc.number("ReadDeviceWidth");
      const DeviceCaps rd = device_caps(c.read_device, c.read_width_um);
      const DeviceCaps wr = device_caps(c.write_device, c.write_width_um);
      c.c_sn = doc.number_or("SNCapacitance", rd.c_gate + rd.c_gs + rd.c_gd + wr.c_gs);
      c.needs_refresh = true;
      break;
    }
  }
  if (c.kind == CellKind::SRAM6T && doc.has("Retention")) doc.fail("Retention", "SRAM cells do not take a retention");
  if (is_charge_cell(c.kind)) {
    if (doc.has("Retention")) {
      c.retention_s = doc.number("Retention");
    } else {
      try {
        c.retention_s = 1.0;  // placeholder so the remaining invariants can be checked first
        validate(c);
        c.retention_s = retention_time(c, default_levels(c));
      } catch (const Error& e) {
        throw Error(std::string("cell ") + c.name + ": " + e.what(), doc.source);
      }
    }
  }
  try {
    validate(c);
  } catch (const Error& e) {
    throw Error(std::string("cell ") + c.name + ": " + e.what(), doc.source);
  }
  return c;
}

CellModel load_cell(std::string_view source, const TechNode& tech) {
  std::filesystem::path path(source);
  if (!std::filesystem::exists(path)) {
    path = data_dir() / "cells" / (std::string(source) + ".cell");
    if (!std::filesystem::exists(path)) throw Error("unknown memory cell '" + std::string(source) + "'");
  }
  return cell_from_config(load_config(path), tech);
}

}  // namespace nscache
