#include "nscache/mat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nscache/error.hpp"

namespace nscache {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

// Per-cell capacitance each line sees.
struct CellLoads {
  double wl_read = 0, wl_write = 0;
  double bl_read = 0, bl_write = 0;
};

CellLoads cell_loads(const MatDesign& d) {
  const CellModel& c = d.cell;
  const WireLayer& m1 = d.tech->local_layer();
  const double wire_wl = c.width_um() * m1.c_per_um;
  const double wire_bl = c.height_um() * m1.c_per_um;
  const DeviceCaps wr = device_caps(c.write_device, c.write_width_um);
  const DeviceCaps rd = device_caps(c.read_device, c.read_width_um);
  CellLoads l;
  switch (c.kind) {
    case CellKind::SRAM6T:
      l.wl_read = l.wl_write = 2.0 * wr.c_gate + wire_wl;
      l.bl_read = l.bl_write = wr.c_gd + wire_bl;
      break;
    case CellKind::EDRAM1T1C:
    case CellKind::STTMRAM:
      l.wl_read = l.wl_write = wr.c_gate + wire_wl;
      l.bl_read = l.bl_write = wr.c_gd + wire_bl;
      break;
    case CellKind::GC2T_DG:
    case CellKind::GC2T_CAA:
      l.wl_write = wr.c_gate + wr.c_gs + wr.c_gd + wire_wl;
      l.wl_read = rd.c_gs + 0.5 * rd.c_gate + wire_wl;
      l.bl_write = wr.c_gd + wire_bl;
      l.bl_read = rd.c_gd + wire_bl;
      break;
  }
  return l;
}

// Driver-end delay of a line split into parallel branches behind a lumped
// extra RC (MIV + extension wire). Unsplit with no extras this is R*C/2.
double line_delay(double r_line, double c_line, int branches, double extra_r, double extra_c) {
  const double rb = r_line / branches;
  const double cb = c_line / branches;
  return extra_r * (0.5 * extra_c + c_line) + 0.5 * rb * cb;
}

}  // namespace

int physical_columns(int n_cols, double ecc_ratio) {
  return n_cols + static_cast<int>(std::ceil(n_cols * ecc_ratio - 1e-9));
}

void validate(const MatDesign& d) {
  if (d.tech == nullptr) throw Error("mat: technology not set");
  char buf[160];
  if (!is_pow2(d.n_rows) || !is_pow2(d.n_cols) || d.n_rows < 32 || d.n_cols < 32 || d.n_rows > 1024 ||
      d.n_cols > 1024) {
    std::snprintf(buf, sizeof buf, "mat: %dx%d outside the 32..1024 power-of-two range", d.n_rows, d.n_cols);
    throw Error(buf);
  }
  if (!is_pow2(d.bl_mux) || !is_pow2(d.sa_mux)) throw Error("mat: mux degrees must be powers of two >= 1");
  if (d.bl_mux * d.sa_mux > d.n_cols) throw Error("mat: total mux degree exceeds the column count");
  if (!is_pow2(d.wl_segmentation) || d.wl_segmentation > d.n_cols / 8)
    throw Error("mat: wordline segmentation must be a power of two leaving >= 8 columns per segment");
  if (d.reference_rows < 0) throw Error("mat: negative reference rows");
  if (d.folded_bitline && is_charge_cell(d.cell.kind) && d.reference_rows < 1)
    throw Error("mat: folded bitline with a charge cell needs a reference row per partition");
  if (is_gain_cell(d.cell.kind) && d.sa_mux != 1) throw Error("mat: gain-cell mats use unmuxed sense amplifiers");
  if (d.ecc_ratio < 0 || d.ecc_ratio > 1) throw Error("mat: ECC ratio must be in [0, 1]");
  if (!(d.sense_leakage_budget > 0)) throw Error("mat: sense leakage budget must be positive");
}

MatPPA build_mat(const MatDesign& design) { return build_mat(design, LineParasitics{}); }

MatPPA build_mat(const MatDesign& d, const LineParasitics& lines) {
  validate(d);
  if (lines.wl_branches < 1 || lines.bl_branches < 1) throw Error("mat: line branch count must be >= 1");
  const TechNode& tech = *d.tech;
  const CellModel& cell = d.cell;
  const CellKind kind = cell.kind;
  const bool gain = is_gain_cell(kind);
  const double v = tech.vdd;
  const double vs = tech.circuit.sense_voltage;
  const WireLayer& m1 = tech.local_layer();
  const double c_min = min_inverter_cap(tech);

  const int parts = d.folded_bitline ? 2 : 1;
  const int ref_rows = d.folded_bitline ? d.reference_rows : 0;
  const int rows_phys = d.n_rows + parts * ref_rows;
  const int rows_per_bl = d.n_rows / parts + ref_rows;
  const int cp = physical_columns(d.n_cols, d.ecc_ratio);
  const int seg = d.wl_segmentation;
  const int cols_seg = cp / seg;

  MatPPA m;
  m.physical_rows = rows_phys;
  m.physical_cols = cp;
  m.data_out_bits = cp / (d.bl_mux * d.sa_mux);
  m.array_width_um = cp * cell.width_um();
  m.array_height_um = rows_phys * cell.height_um();
  m.wordlines = rows_phys * seg * (gain ? 2 : 1);
  m.bitlines = cp * (gain ? 2 : 1);

  // Line parasitics.
  const CellLoads cl = cell_loads(d);
  const double r_wl = cols_seg * cell.width_um() * m1.r_per_um;
  const double c_rwl = cols_seg * cl.wl_read + lines.wl_extra_c;
  const double c_wwl = cols_seg * cl.wl_write + lines.wl_extra_c;
  const double r_bl = rows_per_bl * cell.height_um() * m1.r_per_um;
  const double c_rbl = rows_per_bl * cl.bl_read + lines.bl_extra_c;
  const double c_wbl = rows_per_bl * cl.bl_write + lines.bl_extra_c;
  // Dual-sided precharge and write drive halve the effective line RC.
  const double bl_rc_factor = gain ? 0.5 : 1.0;
  const double t_rwl = line_delay(r_wl, c_rwl - lines.wl_extra_c, lines.wl_branches, lines.wl_extra_r, lines.wl_extra_c);
  const double t_wwl = line_delay(r_wl, c_wwl - lines.wl_extra_c, lines.wl_branches, lines.wl_extra_r, lines.wl_extra_c);
  const double t_rbl_wire =
      bl_rc_factor * line_delay(r_bl, c_rbl - lines.bl_extra_c, lines.bl_branches, lines.bl_extra_r, lines.bl_extra_c);
  const double t_wbl_wire =
      bl_rc_factor * line_delay(r_bl, c_wbl - lines.bl_extra_c, lines.bl_branches, lines.bl_extra_r, lines.bl_extra_c);

  auto add = [&](const std::string& name, const PeripheralPPA& p, double e_read, double e_write) {
    m.components.push_back({name, p.area_um2, p.leakage_w, e_read, e_write, false});
  };
  // Drivers are laid out for the planar line (`layout_load`); stacking
  // parasitics on top of it change delay and switching energy only.
  auto periph = [&](PeripheralKind k, int fan_in, int count, double load, double vh = 0, double vl = 0,
                    double layout_load = -1) {
    PeripheralParams pp;
    pp.fan_in = std::max(1, fan_in);
    pp.count = std::max(1, count);
    pp.c_load = load;
    pp.v_high = vh;
    pp.v_low = vl;
    PeripheralResult r = peripheral_ppa(k, pp, tech);
    if (layout_load >= 0 && layout_load != load) {
      pp.c_load = layout_load;
      const PeripheralResult laid = peripheral_ppa(k, pp, tech);
      r.ppa.area_um2 = laid.ppa.area_um2;
      r.ppa.leakage_w = laid.ppa.leakage_w;
    }
    m.driver_stages_max = std::max(m.driver_stages_max, r.chain_stages);
    return r.ppa;
  };
  const double c_rwl0 = c_rwl - lines.wl_extra_c, c_wwl0 = c_wwl - lines.wl_extra_c;
  const double c_rbl0 = c_rbl - lines.bl_extra_c, c_wbl0 = c_wbl - lines.bl_extra_c;

  const int addr_bits = std::max(1, log2i(d.n_rows));
  const int row_drivers = rows_phys * seg;
  double row_area = 0;
  double t_row_read = 0, t_row_write = 0;
  double e_row_read = 0, e_row_write = 0;
  double e_ls = 0;

  if (!gain) {
    const PeripheralPPA dec = periph(PeripheralKind::RowDecoder, addr_bits, row_drivers, c_rwl, 0, 0, c_rwl0);
    const double e_ref = ref_rows > 0 ? ref_rows * dec.dynamic_energy_j : 0;
    e_row_read = dec.dynamic_energy_j + e_ref;
    e_row_write = dec.dynamic_energy_j;
    t_row_read = t_row_write = dec.delay_s;
    row_area += dec.area_um2;
    add("row_decoder", dec, e_row_read, e_row_write);
  } else {
    // Separate read and write decoders fed simultaneously.
    const PeripheralPPA rdec = periph(PeripheralKind::RowDecoder, addr_bits, rows_phys, 0);
    const PeripheralPPA rwl = periph(PeripheralKind::TristateWLDriver, 1, row_drivers, c_rwl, 0, 0, c_rwl0);
    const PeripheralPPA wdec = periph(PeripheralKind::RowDecoder, addr_bits, d.n_rows, 0);
    const PeripheralPPA ls =
        periph(PeripheralKind::LevelShifter, 1, d.n_rows * seg, c_wwl, cell.v_boost, cell.v_hold, c_wwl0);
    const double e_rwl = rwl.dynamic_energy_j * (1 + ref_rows);
    t_row_read = rdec.delay_s + rwl.delay_s;
    t_row_write = wdec.delay_s + ls.delay_s;
    e_row_read = rdec.dynamic_energy_j + e_rwl;
    e_ls = ls.dynamic_energy_j;
    e_row_write = wdec.dynamic_energy_j + e_ls;
    row_area += rdec.area_um2 + rwl.area_um2 + wdec.area_um2 + ls.area_um2;
    add("read_row_decoder", rdec, rdec.dynamic_energy_j, 0);
    add("rwl_tristate_driver", rwl, e_rwl, 0);
    add("write_row_decoder", wdec, 0, wdec.dynamic_energy_j);
    add("wwl_level_shifter", ls, 0, e_ls);
    const double vb2 = cell.v_boost * cell.v_boost, vh2 = cell.v_hold * cell.v_hold;
    m.e_write_boost_j = e_ls * vb2 / (vb2 + vh2);
    m.e_write_hold_j = e_ls * vh2 / (vb2 + vh2);
  }

  // Column periphery.
  const int n_sa = cp / d.bl_mux;
  const PeripheralKind sa_kind = kind == CellKind::STTMRAM ? PeripheralKind::SenseAmpCurrent : PeripheralKind::SenseAmpVoltage;
  const PeripheralPPA sa = periph(sa_kind, 1, n_sa, 0);
  const PeripheralPPA blmux = periph(PeripheralKind::Mux, d.bl_mux, cp / d.bl_mux, c_min);
  const PeripheralPPA samux = periph(PeripheralKind::Mux, d.sa_mux, std::max(1, cp / (d.bl_mux * d.sa_mux)), c_min);
  double col_area = sa.area_um2 + blmux.area_um2 + samux.area_um2;

  // Write drivers and prechargers; gain cells drive both ends of separate
  // read and write bitlines.
  PeripheralPPA pre, wdrv;
  double e_wdrv_col = 0;
  if (gain) {
    pre = periph(PeripheralKind::PrechargerWriteDriver, 1, 2 * cp, 0.5 * c_rbl, 0, 0, 0.5 * c_rbl0);
    wdrv = periph(PeripheralKind::PrechargerWriteDriver, 1, 2 * cp, 0.5 * c_wbl, 0, 0, 0.5 * c_wbl0);
    e_wdrv_col = wdrv.dynamic_energy_j / cp;
    col_area += pre.area_um2 + wdrv.area_um2;
  } else {
    wdrv = periph(PeripheralKind::PrechargerWriteDriver, 1, cp, c_wbl, 0, 0, c_wbl0);
    e_wdrv_col = wdrv.dynamic_energy_j / cp;
    col_area += wdrv.area_um2;
  }

  // Bitline sensing.
  const StoredLevelPair lv = default_levels(cell);
  double t_sense_bl = 0;
  double e_bl_read = 0;
  switch (kind) {
    case CellKind::SRAM6T: {
      const double i_cell = 0.5 * compact_current(cell.read_device, v, v, cell.read_width_um);
      t_sense_bl = c_rbl * vs / i_cell + t_rbl_wire;
      e_bl_read = cp * c_rbl * v * vs;
      break;
    }
    case CellKind::EDRAM1T1C: {
      const double csn = cell.storage_capacitance(lv.v1);
      const double dv = 0.5 * v * csn / (csn + c_rbl);
      if (dv < vs) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "mat: charge-sharing signal %.3g V below the %.3g V sense threshold", dv, vs);
        throw Error(buf);
      }
      const double i_acc = compact_current(cell.write_device, cell.v_boost - 0.5 * v, 0.5 * v, cell.write_width_um);
      const double r_acc = 0.5 * v / i_acc;
      t_sense_bl = 2.2 * r_acc * (csn * c_rbl / (csn + c_rbl)) + t_rbl_wire;
      e_bl_read = cp * c_rbl * v * 0.5 * v;
      break;
    }
    case CellKind::STTMRAM: {
      const double vr = cell.v_read;
      const double r_acc = vr / compact_current(cell.read_device, v, vr, cell.read_width_um);
      const double di = vr / (cell.r_on + r_acc) - vr / (cell.r_off + r_acc);
      t_sense_bl = c_rbl * vs / di + t_rbl_wire;
      const double i_avg = 0.5 * (vr / (cell.r_on + r_acc) + vr / (cell.r_off + r_acc));
      e_bl_read = n_sa * (c_rbl * vr * vr + vr * i_avg * t_sense_bl);
      break;
    }
    case CellKind::GC2T_DG:
    case CellKind::GC2T_CAA: {
      const double i_read = compact_current(cell.read_device, lv.v2, v, cell.read_width_um);
      const double i_leak = std::fabs(compact_current(cell.read_device, lv.v1 - v, vs, cell.read_width_um));
      const double leak_total = (rows_per_bl - 1) * i_leak;
      if (leak_total >= d.sense_leakage_budget * i_read) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "mat: unselected-cell leakage %.3g A on a %d-cell read bitline exceeds %.3g of the %.3g A read "
                      "current",
                      leak_total, rows_per_bl, d.sense_leakage_budget, i_read);
        throw Error(buf);
      }
      t_sense_bl = c_rbl * vs / i_read + t_rbl_wire;
      e_bl_read = cp * c_rbl * v * vs;
      break;
    }
  }

  // Per written column energy beyond the driver.
  double e_cell_col = 0;
  int cols_written = cp / d.bl_mux;
  switch (kind) {
    case CellKind::SRAM6T: e_cell_col = 2.0 * c_min * v * v; break;
    case CellKind::EDRAM1T1C:
      e_cell_col = cell.storage_capacitance(lv.v1) * lv.v1 * v;
      cols_written = cp;  // the opened row must be rewritten in full
      break;
    case CellKind::STTMRAM: e_cell_col = cell.write_current_a * v * cell.write_pulse_ns * 1e-9; break;
    case CellKind::GC2T_DG:
    case CellKind::GC2T_CAA:
      e_cell_col = cell.storage_capacitance(lv.v1) * lv.v1 * v;
      cols_written = cp;  // the write wordline opens every cell on the row
      break;
  }
  const double e_write_cols = cols_written * (e_wdrv_col + e_cell_col);
  const double e_restore = cell.destructive_read ? cp * (e_wdrv_col + e_cell_col) : 0.0;

  const double e_sa = sa.dynamic_energy_j;
  const double e_mux = blmux.dynamic_energy_j + samux.dynamic_energy_j;
  add("sense_amp", sa, e_sa, 0);
  if (d.bl_mux > 1) add("bitline_mux", blmux, blmux.dynamic_energy_j, 0);
  if (d.sa_mux > 1) add("output_mux", samux, samux.dynamic_energy_j, 0);
  if (gain) add("rbl_precharger", pre, 0, 0);
  add(gain ? "wbl_write_driver" : "precharger_write_driver", wdrv, e_restore, e_write_cols);

  // Array.
  const double n_cells = static_cast<double>(rows_phys) * cp;
  double cell_leak = 0;
  switch (kind) {
    case CellKind::SRAM6T: {
      const DeviceParams& n = cell.write_device;
      cell_leak = n_cells * tech.circuit.sram_cell_leak_devices * n.i_off_per_um * cell.fins_pd *
                  tech.circuit.min_nmos_width_um * v;
      break;
    }
    case CellKind::EDRAM1T1C:
    case CellKind::GC2T_DG:
    case CellKind::GC2T_CAA:
      cell_leak = n_cells * std::fabs(compact_current(cell.write_device, cell.v_hold, lv.v1, cell.write_width_um)) * v;
      break;
    case CellKind::STTMRAM: cell_leak = 0; break;
  }
  const double array_area = m.array_width_um * m.array_height_um;
  m.components.push_back({"array", array_area, cell_leak, e_bl_read, 0, cell.is_beol});

  // Timing.
  MatTiming& t = m.timing;
  t.t_decode = t_row_read;
  t.t_wordline = t_rwl;
  t.t_bitline = t_sense_bl;
  t.t_sense = sa.delay_s;
  t.t_mux = blmux.delay_s + samux.delay_s;
  t.t_write_row = t_row_write + t_wwl;
  t.t_write_drive = wdrv.delay_s + t_wbl_wire;
  t.t_cell_write = kind == CellKind::SRAM6T ? 2.0 * stage_delay(tech, 1.0, 2.0 * c_min) : cell_write_time(cell);
  const double t_precharge = gain ? pre.delay_s : wdrv.delay_s;
  t.t_restore = cell.destructive_read ? wdrv.delay_s + t_wbl_wire + t.t_cell_write : 0.0;

  m.t_read_s = t.t_decode + t.t_wordline + t.t_bitline + t.t_sense + t.t_mux;
  m.t_write_s = std::max(t.t_write_row, t.t_write_drive) + t.t_cell_write;
  m.t_cycle_s = m.t_read_s + t_precharge + t.t_restore;

  // Energy.
  m.e_read_j = e_row_read + e_bl_read + e_sa + e_mux + e_restore;
  m.e_write_j = e_row_write + e_write_cols;
  if (kind == CellKind::EDRAM1T1C) {
    m.e_refresh_row_j = e_row_read + e_bl_read + e_sa + e_restore;
  } else if (gain) {
    m.e_refresh_row_j = e_row_read + e_bl_read + e_sa + m.e_write_j;
  }

  // Leakage and area.
  m.cell_leakage_w = cell_leak;
  m.leakage_w = 0;
  for (const auto& c : m.components) m.leakage_w += c.leakage_w;
  m.periph_area_um2 = row_area + col_area;
  const double row_w = row_area / m.array_height_um;
  const double col_h = col_area / m.array_width_um;
  m.width_um = m.array_width_um + row_w;
  m.height_um = m.array_height_um + col_h;
  if (cell.is_beol) {
    m.area_feol_um2 = m.periph_area_um2;
    m.area_beol_um2 = array_area;
  } else {
    m.area_feol_um2 = m.periph_area_um2 + array_area;
    m.area_beol_um2 = 0;
  }
  m.refresh.needs = cell.needs_refresh;
  if (cell.needs_refresh) {
    m.refresh.t_retention_s = cell.retention_s;
    // Reference rows are rewritten on every access; only data rows age.
    m.refresh.n_rows = d.n_rows;
  }
  return m;
}

RefreshParams refresh_params(const MatPPA& mat, double derate) {
  if (!mat.refresh.needs) throw Error("refresh_params: mat does not need refresh");
  if (!(derate > 0) || derate > 1) throw Error("refresh_params: derate must be in (0, 1]");
  if (mat.refresh.n_rows < 1) throw Error("refresh_params: mat has no rows");
  return {derate * mat.refresh.t_retention_s / mat.refresh.n_rows, mat.refresh.n_rows};
}

}  // namespace nscache
